#pragma once

#include "mailguard/environment.hpp"

#include <string>
#include <vector>

namespace mailguard {

// Email fields as they appear in an assembled prompt context.
struct ContextEmail {
  std::string sender;
  std::string subject;
  std::string body;
};

// Renders the user task plus raw emails into the prompt block shown to
// content-reading agents.
std::string assemble_email_context(const std::string& user_task,
                                   const std::vector<Email>& emails);

// Best-effort inverse of assemble_email_context; used by the scripted model.
std::vector<ContextEmail> parse_email_context(const std::string& context);

} // namespace mailguard

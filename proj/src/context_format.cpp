#include "mailguard/context_format.hpp"

#include <sstream>

namespace mailguard {

std::string assemble_email_context(const std::string& user_task,
                                   const std::vector<Email>& emails) {
  std::ostringstream out;
  out << "User task: " << user_task << "\n\n";
  out << "Inbox (" << emails.size() << " messages):\n";
  for (std::size_t i = 0; i < emails.size(); ++i) {
    const auto& email = emails[i];
    out << "\n--- EMAIL " << (i + 1) << " ---\n";
    out << "From: " << email.sender << "\n";
    out << "Subject: " << email.subject << "\n";
    out << "Body:\n" << email.body << "\n";
    out << "--- END EMAIL " << (i + 1) << " ---\n";
  }
  return out.str();
}

std::vector<ContextEmail> parse_email_context(const std::string& context) {
  std::vector<ContextEmail> emails;
  std::size_t cursor = 0;
  for (;;) {
    const std::size_t begin = context.find("--- EMAIL ", cursor);
    if (begin == std::string::npos) break;
    const std::size_t header_end = context.find("---\n", begin);
    if (header_end == std::string::npos) break;
    std::size_t pos = header_end + 4;

    ContextEmail email;
    if (context.compare(pos, 6, "From: ") != 0) break;
    pos += 6;
    std::size_t eol = context.find('\n', pos);
    if (eol == std::string::npos) break;
    email.sender = context.substr(pos, eol - pos);
    pos = eol + 1;

    if (context.compare(pos, 9, "Subject: ") != 0) break;
    pos += 9;
    eol = context.find('\n', pos);
    if (eol == std::string::npos) break;
    email.subject = context.substr(pos, eol - pos);
    pos = eol + 1;

    if (context.compare(pos, 6, "Body:\n") != 0) break;
    pos += 6;
    const std::size_t body_end = context.find("\n--- END EMAIL ", pos);
    if (body_end == std::string::npos) break;
    email.body = context.substr(pos, body_end - pos);

    emails.push_back(std::move(email));
    cursor = body_end + 1;
  }
  return emails;
}

} // namespace mailguard

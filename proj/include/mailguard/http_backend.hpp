#pragma once

#include "mailguard/agent.hpp"

#include <memory>
#include <string>

namespace mailguard {

struct HttpBackendOptions {
  // Base URL of an OpenAI-compatible endpoint, e.g. "http://localhost:8080/v1".
  // The request goes to <endpoint>/chat/completions.
  std::string endpoint;
  std::string model;
  // Name of the environment variable holding the API key. Credentials are
  // never accepted via config files or CLI arguments.
  std::string credentials_env = "MAILGUARD_API_KEY";
  int max_retries = 3;
  int initial_backoff_ms = 250;
  int timeout_seconds = 60;
};

// Stateless per-request client; safe for concurrent use from parallel
// episodes. Temperature is fixed to 0. Throws BackendError on non-2xx after
// retries and on unparseable tool-call payloads (recorded verbatim).
std::unique_ptr<ModelBackend> http_backend(const HttpBackendOptions& options);

} // namespace mailguard

#include "mailguard/http_backend.hpp"

#include "mailguard/common.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace mailguard {

namespace {

using nlohmann::json;

struct EndpointParts {
  std::string base;        // scheme://host[:port]
  std::string path_prefix; // leading path, no trailing slash
};

EndpointParts parse_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos ||
      (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0)) {
    throw BackendError("endpoint must be an http(s) URL: " + endpoint);
  }
  const auto slash = endpoint.find('/', scheme_end + 3);
  EndpointParts parts;
  if (slash == std::string::npos) {
    parts.base = endpoint;
  } else {
    parts.base = endpoint.substr(0, slash);
    parts.path_prefix = endpoint.substr(slash);
    while (!parts.path_prefix.empty() && parts.path_prefix.back() == '/')
      parts.path_prefix.pop_back();
  }
  return parts;
}

json tool_schema_json(const ToolSchema& schema) {
  json properties = json::object();
  json required = json::array();
  for (const auto& param : schema.params) {
    properties[param] = {{"type", "string"}};
    required.push_back(param);
  }
  return {{"type", "function"},
          {"function",
           {{"name", schema.name},
            {"description", schema.description},
            {"parameters",
             {{"type", "object"}, {"properties", properties}, {"required", required}}}}}};
}

json build_request_body(const std::string& model, const BackendRequest& request) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  messages.push_back({{"role", "user"}, {"content", request.visible_context}});

  std::size_t fallback_id = 0;
  for (const auto& exchange : request.history) {
    std::string call_id = exchange.call.call_id.empty()
                              ? "call_" + std::to_string(fallback_id)
                              : exchange.call.call_id;
    ++fallback_id;
    json args = json::object();
    for (const auto& [key, value] : exchange.call.arguments) args[key] = value;
    messages.push_back(
        {{"role", "assistant"},
         {"content", nullptr},
         {"tool_calls",
          json::array({{{"id", call_id},
                        {"type", "function"},
                        {"function",
                         {{"name", exchange.call.tool_name}, {"arguments", args.dump()}}}}})}});
    messages.push_back(
        {{"role", "tool"}, {"tool_call_id", call_id}, {"content", exchange.result.payload}});
  }

  json body;
  body["model"] = model;
  body["temperature"] = 0;
  body["messages"] = std::move(messages);
  if (!request.tools.empty()) {
    json tools = json::array();
    for (const auto& schema : request.tools) tools.push_back(tool_schema_json(schema));
    body["tools"] = std::move(tools);
  }
  return body;
}

std::map<std::string, std::string> parse_arguments(const std::string& raw) {
  json args;
  try {
    args = json::parse(raw);
  } catch (const json::parse_error&) {
    throw BackendError("unparseable tool-call payload: " + raw);
  }
  if (!args.is_object()) throw BackendError("unparseable tool-call payload: " + raw);
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : args.items()) {
    out[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return out;
}

ModelTurn parse_response(const std::string& body) {
  json obj;
  try {
    obj = json::parse(body);
  } catch (const json::parse_error&) {
    throw BackendError("unparseable completion response: " + body);
  }
  if (!obj.contains("choices") || !obj["choices"].is_array() || obj["choices"].empty())
    throw BackendError("completion response has no choices: " + body);
  const json& message = obj["choices"][0].value("message", json::object());

  ModelTurn turn;
  if (message.contains("tool_calls") && message["tool_calls"].is_array() &&
      !message["tool_calls"].empty()) {
    for (const auto& tc : message["tool_calls"]) {
      const json& fn = tc.value("function", json::object());
      ToolCallRequest call;
      call.tool_name = fn.value("name", "");
      call.call_id = tc.value("id", "");
      if (call.tool_name.empty())
        throw BackendError("unparseable tool-call payload: " + tc.dump());
      call.arguments = parse_arguments(fn.value("arguments", "{}"));
      turn.tool_calls.push_back(std::move(call));
    }
    return turn;
  }
  if (message.contains("content") && message["content"].is_string()) {
    turn.final_text = message["content"].get<std::string>();
    return turn;
  }
  throw BackendError("completion response has neither content nor tool calls: " + body);
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

class HttpBackend final : public ModelBackend {
public:
  explicit HttpBackend(HttpBackendOptions options)
      : options_(std::move(options)), parts_(parse_endpoint(options_.endpoint)) {}

  ModelTurn next_turn(const BackendRequest& request) override {
    const std::string payload = build_request_body(options_.model, request).dump();
    const std::string path = parts_.path_prefix + "/chat/completions";

    httplib::Headers headers;
    if (const char* key = std::getenv(options_.credentials_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    int backoff_ms = options_.initial_backoff_ms;
    int retries = 0;
    std::string last_error;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
        ++retries;
      }
      // A fresh client per request keeps the backend free of shared state.
      httplib::Client client(parts_.base);
      client.set_connection_timeout(options_.timeout_seconds, 0);
      client.set_read_timeout(options_.timeout_seconds, 0);
      client.set_write_timeout(options_.timeout_seconds, 0);

      auto res = client.Post(path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 200 && res->status < 300) {
        ModelTurn turn = parse_response(res->body);
        turn.retries = retries;
        return turn;
      }
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      if (!retryable_status(res->status)) break;
    }
    throw BackendError("backend request failed after " + std::to_string(retries) +
                       " retries: " + last_error);
  }

private:
  HttpBackendOptions options_;
  EndpointParts parts_;
};

} // namespace

std::unique_ptr<ModelBackend> http_backend(const HttpBackendOptions& options) {
  return std::make_unique<HttpBackend>(options);
}

} // namespace mailguard

#pragma once

#include "mailguard/environment.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mailguard {

struct AgentConfig {
  std::string name; // "reader" | "actor" | "single"
  std::string system_prompt;
  std::set<std::string> tool_allowlist;
  std::size_t max_turns = 8;
};

struct ToolSchema {
  std::string name;
  std::string description;
  std::vector<std::string> params; // string-typed parameters
};

// Schemas for the four environment tools, filtered to an allowlist.
std::vector<ToolSchema> tool_schemas_for(const std::set<std::string>& allowlist);

// One completed call/result exchange fed back to the backend.
struct ToolExchange {
  ToolCallRequest call;
  ToolResult result;
};

struct BackendRequest {
  std::string system_prompt;
  std::string visible_context;
  std::vector<ToolSchema> tools;
  std::vector<ToolExchange> history;
};

struct ModelTurn {
  std::optional<std::string> final_text;
  std::vector<ToolCallRequest> tool_calls;
  int retries = 0; // transport retries spent producing this turn

  bool is_final() const { return final_text.has_value(); }
};

// Black-box model interface: a turn is either a final answer or tool calls.
class ModelBackend {
public:
  virtual ~ModelBackend() = default;
  virtual ModelTurn next_turn(const BackendRequest& request) = 0;
};

enum class TraceEventKind {
  prompt_assembled,
  model_turn,
  tool_call,
  tool_result,
  blocked_call,
  final_answer,
};

std::string to_string(TraceEventKind kind);

struct AgentTraceEvent {
  TraceEventKind kind;
  nlohmann::ordered_json data;
};

struct AgentTrace {
  std::string agent;
  std::vector<AgentTraceEvent> events;
  std::size_t blocked_calls = 0;
  std::set<std::string> executed_tools; // tools that reached exec_tool
  std::optional<std::string> final_answer;
  bool exhausted = false; // stopped on max_turns instead of a final answer
};

// Invoked after each executed (non-blocked) tool call. A returned string
// replaces the agent's visible context for subsequent turns.
using ToolHook =
    std::function<std::optional<std::string>(const ToolCallRequest&, const ToolResult&,
                                             EpisodeState&)>;

// True iff the tool is on the agent's allowlist. Disallowed calls are never
// executed; they surface to the model as a "tool not available" result.
bool enforce_registry(const AgentConfig& config, const ToolCallRequest& call);

// Turn loop: ask the backend, enforce the registry, execute tools, feed
// results back, stop on a final answer or after max_turns.
AgentTrace run_agent(const AgentConfig& config, ModelBackend& backend, EpisodeState& state,
                     const std::string& visible_context, const ToolHook& on_tool = {});

} // namespace mailguard

#include "mailguard/agent.hpp"

#include "mailguard/common.hpp"

namespace mailguard {

namespace {

using nlohmann::ordered_json;

const std::vector<ToolSchema>& all_tool_schemas() {
  static const std::vector<ToolSchema> schemas = {
      {"send_email", "Send an email.", {"to", "subject", "body"}},
      {"store_summary", "Store the summary document for the next stage.", {"text"}},
      {"get_pending_summary", "Fetch the stored summary document.", {}},
      {"store_result", "Record the final task result.", {"text"}},
  };
  return schemas;
}

ordered_json call_json(const ToolCallRequest& call) {
  ordered_json args = ordered_json::object();
  for (const auto& [key, value] : call.arguments) args[key] = value;
  ordered_json obj;
  obj["tool"] = call.tool_name;
  obj["args"] = std::move(args);
  return obj;
}

void log_event(AgentTrace& trace, EpisodeState& state, TraceEventKind kind,
               ordered_json data) {
  data["agent"] = trace.agent;
  state.transcript.push_back({to_string(kind), data});
  trace.events.push_back({kind, std::move(data)});
}

} // namespace

std::string to_string(TraceEventKind kind) {
  switch (kind) {
    case TraceEventKind::prompt_assembled: return "prompt_assembled";
    case TraceEventKind::model_turn: return "model_turn";
    case TraceEventKind::tool_call: return "tool_call";
    case TraceEventKind::tool_result: return "tool_result";
    case TraceEventKind::blocked_call: return "blocked_call";
    case TraceEventKind::final_answer: return "final_answer";
  }
  return "unknown";
}

std::vector<ToolSchema> tool_schemas_for(const std::set<std::string>& allowlist) {
  std::vector<ToolSchema> out;
  for (const auto& schema : all_tool_schemas()) {
    if (allowlist.count(schema.name)) out.push_back(schema);
  }
  return out;
}

bool enforce_registry(const AgentConfig& config, const ToolCallRequest& call) {
  return config.tool_allowlist.count(call.tool_name) > 0;
}

AgentTrace run_agent(const AgentConfig& config, ModelBackend& backend, EpisodeState& state,
                     const std::string& visible_context, const ToolHook& on_tool) {
  if (config.max_turns < 1) throw Error("run_agent: max_turns must be >= 1");

  AgentTrace trace;
  trace.agent = config.name;

  BackendRequest request;
  request.system_prompt = config.system_prompt;
  request.visible_context = visible_context;
  request.tools = tool_schemas_for(config.tool_allowlist);

  for (std::size_t turn = 0; turn < config.max_turns; ++turn) {
    log_event(trace, state, TraceEventKind::prompt_assembled,
              {{"turn", turn}, {"context_bytes", request.visible_context.size()}});

    const ModelTurn model_turn = backend.next_turn(request);

    ordered_json turn_data;
    turn_data["turn"] = turn;
    turn_data["final"] = model_turn.is_final();
    turn_data["tool_calls"] = model_turn.tool_calls.size();
    if (model_turn.retries > 0) turn_data["retries"] = model_turn.retries;
    log_event(trace, state, TraceEventKind::model_turn, std::move(turn_data));

    if (model_turn.is_final()) {
      trace.final_answer = model_turn.final_text;
      log_event(trace, state, TraceEventKind::final_answer, {{"text", *model_turn.final_text}});
      return trace;
    }

    for (const auto& call : model_turn.tool_calls) {
      if (!enforce_registry(config, call)) {
        ++trace.blocked_calls;
        ordered_json data = call_json(call);
        data["reason"] = "tool not available";
        log_event(trace, state, TraceEventKind::blocked_call, std::move(data));
        request.history.push_back({call, {ToolStatus::blocked, "tool not available"}});
        continue;
      }

      log_event(trace, state, TraceEventKind::tool_call, call_json(call));
      const ToolResult result = exec_tool(state, call);
      trace.executed_tools.insert(call.tool_name);
      log_event(trace, state, TraceEventKind::tool_result,
                {{"tool", call.tool_name},
                 {"status", to_string(result.status)},
                 {"payload", result.payload}});
      request.history.push_back({call, result});

      if (on_tool) {
        if (auto new_context = on_tool(call, result, state)) {
          request.visible_context = std::move(*new_context);
        }
      }
    }
  }

  trace.exhausted = true;
  return trace;
}

} // namespace mailguard

#pragma once

#include "mailguard/agent.hpp"
#include "mailguard/validator.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace mailguard {

enum class PipelineKind {
  baseline,            // single agent, send_email, raw emails in context
  full_pipeline,       // reader/actor split + schema + scan
  two_agent_only,      // reader/actor split, free-form hand-off, no validation
  json_validator_only, // single agent, stores a validated summary, keeps raw context
};

std::string to_string(PipelineKind kind);
PipelineKind pipeline_kind_from_string(std::string_view s);

// Text the actor receives in place of a summary that failed validation under
// enforce-reject (or failed schema validation outright).
inline constexpr const char* kRefusalNotice = "summary unavailable: validation failed";

struct PipelineConfig {
  PipelineKind kind = PipelineKind::baseline;
  // Only meaningful for full_pipeline and json_validator_only.
  std::optional<ValidatorMode> validator_mode;
  // json_validator_only variant: replace the agent's context with the stored
  // summary instead of keeping raw emails visible.
  bool replace_context = false;
  std::size_t retrieval_k = 5;
  bool force_include_attack = true;
  std::size_t max_turns = 8;
  // Empty strings select the built-in defaults.
  std::string reader_prompt;
  std::string actor_prompt;
  std::string single_prompt;
};

// Validates the kind/validator_mode pairing; audit is filled in for the
// validating configurations when no mode is given.
PipelineConfig make_pipeline_config(PipelineKind kind,
                                    std::optional<ValidatorMode> mode = std::nullopt);

std::string default_reader_prompt(bool structured_json);
std::string default_actor_prompt();
std::string default_single_prompt();
std::string default_json_single_prompt();

struct EpisodeResult {
  std::string attack_id;
  int scenario = 0;
  PipelineKind config = PipelineKind::baseline;
  bool success = false;
  std::size_t blocked_calls = 0;
  std::optional<bool> leak; // isolation configurations only
  bool errored = false;
  std::uint32_t seed = 0;
  std::string transcript_ref;

  bool operator==(const EpisodeResult&) const = default;
};

nlohmann::ordered_json to_json(const EpisodeResult& result);
EpisodeResult episode_result_from_json(const nlohmann::json& obj);

// Observables kept alongside the result so tests can assert on structure.
struct EpisodeRun {
  EpisodeResult result;
  std::vector<AgentTrace> traces;
  std::string actor_context;      // empty for single-agent configurations
  std::string stored_summary_raw; // summary as stored, before validation
};

// Executes one freshly built episode under the given configuration.
EpisodeRun run_episode(const PipelineConfig& config, EpisodeState& state, ModelBackend& backend,
                       const PatternSet& patterns, std::uint32_t seed,
                       const std::string& transcript_ref = "");

} // namespace mailguard

#pragma once

#include "mailguard/http_backend.hpp"
#include "mailguard/pipeline.hpp"
#include "mailguard/scripted_backend.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mailguard {

struct BackendDescriptor {
  enum class Kind { scripted, http };
  Kind kind = Kind::scripted;
  ScriptedModelRules scripted; // summary style is set per pipeline configuration
  HttpBackendOptions http;
};

struct RunSpec {
  PipelineConfig pipeline;
  std::filesystem::path corpus_path;
  std::set<int> scenarios{1, 2, 3, 4};
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  BackendDescriptor backend;
  std::filesystem::path output_dir;
  std::filesystem::path benign_pool_path; // empty: bundled default
  std::filesystem::path patterns_path;    // empty: bundled default
  std::string attacker_address = kDefaultAttackerAddress;
};

struct CampaignSummary {
  std::filesystem::path results_path;
  std::size_t executed = 0;
  std::size_t skipped = 0; // episodes already present in the results file
};

// Replays every matching attack once. Results are appended as JSON lines in
// corpus order, flushed incrementally; rerunning over an existing output
// directory skips attacks whose results are already present.
CampaignSummary run_campaign(const RunSpec& spec);

// All four configurations over the same pool, baseline first.
std::map<PipelineKind, CampaignSummary> run_ablation(const RunSpec& base);

std::vector<EpisodeResult> load_results(const std::filesystem::path& path);

std::filesystem::path results_path_for(const std::filesystem::path& output_dir,
                                       PipelineKind kind);

} // namespace mailguard

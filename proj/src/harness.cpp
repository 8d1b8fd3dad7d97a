#include "mailguard/harness.hpp"

#include "mailguard/common.hpp"
#include "mailguard/data_paths.hpp"
#include "mailguard/text_util.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <unistd.h>

namespace mailguard {

namespace {

constexpr std::size_t kFsyncBatch = 32;

// Appends JSON lines in item-index order regardless of worker completion
// order, so results files are byte-stable across parallelism levels.
class OrderedWriter {
public:
  OrderedWriter(const std::filesystem::path& path, std::size_t expected)
      : expected_(expected) {
    file_ = std::fopen(path.string().c_str(), "a");
    if (!file_) throw CampaignError("cannot open results file for append: " + path.string());
  }

  ~OrderedWriter() {
    if (file_) {
      flush_sync();
      std::fclose(file_);
    }
  }

  void deliver(std::size_t index, std::string line) {
    std::lock_guard<std::mutex> lock(mutex_);
    pending_.emplace(index, std::move(line));
    while (true) {
      auto it = pending_.find(next_);
      if (it == pending_.end()) break;
      std::fwrite(it->second.data(), 1, it->second.size(), file_);
      std::fputc('\n', file_);
      pending_.erase(it);
      ++next_;
      if (next_ % kFsyncBatch == 0) flush_sync();
    }
  }

  std::size_t written() const { return next_; }

private:
  void flush_sync() {
    std::fflush(file_);
    ::fsync(fileno(file_));
  }

  std::FILE* file_ = nullptr;
  std::size_t expected_;
  std::size_t next_ = 0;
  std::map<std::size_t, std::string> pending_;
  std::mutex mutex_;
};

std::string budget_secret_for(std::uint32_t episode_seed) {
  std::mt19937 rng(episode_seed ^ 0x5EC2E75Bu);
  std::string secret = "BUDGET-";
  for (int i = 0; i < 6; ++i) secret += static_cast<char>('0' + bounded_uniform(rng, 10));
  return secret;
}

std::unique_ptr<ModelBackend> make_backend(const RunSpec& spec) {
  if (spec.backend.kind == BackendDescriptor::Kind::http) {
    if (spec.backend.http.endpoint.empty())
      throw CampaignError("http backend requires an endpoint");
    return http_backend(spec.backend.http);
  }
  ScriptedModelRules rules = spec.backend.scripted;
  rules.summary_style = (spec.pipeline.kind == PipelineKind::two_agent_only)
                            ? SummaryStyle::free_form
                            : SummaryStyle::structured_json;
  return scripted_backend(rules);
}

void write_transcript(const std::filesystem::path& path, const EpisodeState& state) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CampaignError("cannot write transcript: " + path.string());
  for (const auto& event : state.transcript) {
    nlohmann::ordered_json line;
    line["event"] = event.kind;
    line["data"] = event.data;
    out << line.dump() << '\n';
  }
}

EpisodeResult errored_result(const AttackRecord& attack, PipelineKind kind,
                             std::uint32_t seed, const std::string& transcript_ref) {
  EpisodeResult result;
  result.attack_id = attack.id;
  result.scenario = attack.scenario;
  result.config = kind;
  result.success = false;
  result.errored = true;
  result.seed = seed;
  result.transcript_ref = transcript_ref;
  return result;
}

// Drops a truncated trailing line left behind by an interrupted run.
std::vector<EpisodeResult> load_results_tolerant(const std::filesystem::path& path,
                                                 bool repair) {
  std::ifstream in(path);
  if (!in) throw CampaignError("cannot read results file: " + path.string());
  std::vector<EpisodeResult> results;
  std::vector<std::string> good_lines;
  std::string line;
  std::size_t line_no = 0;
  bool truncated_tail = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      results.push_back(episode_result_from_json(nlohmann::json::parse(line)));
      good_lines.push_back(line);
    } catch (const std::exception& e) {
      if (in.peek() == EOF) {
        truncated_tail = true;
        break;
      }
      throw CampaignError(path.string() + " line " + std::to_string(line_no) +
                          ": " + e.what());
    }
  }
  in.close();
  if (truncated_tail && repair) {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& good : good_lines) out << good << '\n';
  }
  return results;
}

} // namespace

std::filesystem::path results_path_for(const std::filesystem::path& output_dir,
                                       PipelineKind kind) {
  return output_dir / ("results-" + to_string(kind) + ".jsonl");
}

std::vector<EpisodeResult> load_results(const std::filesystem::path& path) {
  return load_results_tolerant(path, /*repair=*/false);
}

CampaignSummary run_campaign(const RunSpec& spec) {
  if (spec.parallelism < 1) throw CampaignError("parallelism must be >= 1");
  if (spec.scenarios.empty()) throw CampaignError("scenario set must be non-empty");

  const auto corpus = load_corpus(spec.corpus_path);
  const auto pool = load_benign_pool(
      spec.benign_pool_path.empty() ? default_benign_pool_path() : spec.benign_pool_path);
  const PatternSet patterns = spec.patterns_path.empty()
                                  ? PatternSet::defaults()
                                  : PatternSet::load(spec.patterns_path);

  std::filesystem::create_directories(spec.output_dir);
  const std::string kind_name = to_string(spec.pipeline.kind);
  std::filesystem::create_directories(spec.output_dir / kind_name);
  const auto results_path = results_path_for(spec.output_dir, spec.pipeline.kind);

  std::unordered_set<std::string> done;
  if (std::filesystem::exists(results_path)) {
    for (const auto& prior : load_results_tolerant(results_path, /*repair=*/true)) {
      if (prior.config != spec.pipeline.kind)
        throw CampaignError("existing results file holds a different configuration: " +
                            results_path.string());
      done.insert(prior.attack_id);
    }
  }

  struct Item {
    const AttackRecord* attack;
  };
  std::vector<Item> items;
  std::size_t skipped = 0;
  for (const auto& attack : corpus) {
    if (!spec.scenarios.count(attack.scenario)) continue;
    if (done.count(attack.id)) {
      ++skipped;
      continue;
    }
    items.push_back({&attack});
  }

  OrderedWriter writer(results_path, items.size());
  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr fatal;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t index = cursor.fetch_add(1);
      if (index >= items.size()) return;
      const AttackRecord& attack = *items[index].attack;
      const std::uint32_t episode_seed = derive_episode_seed(spec.seed, attack.id);
      const std::string transcript_ref = kind_name + "/" + attack.id + ".jsonl";

      EpisodeResult result;
      try {
        const std::string secret =
            attack.scenario == 4 ? budget_secret_for(episode_seed) : std::string();
        const ScenarioSpec scenario_spec =
            make_scenario_spec(attack.scenario, spec.attacker_address, secret);
        EpisodeState state = build_episode(scenario_spec, attack, pool, episode_seed);
        auto backend = make_backend(spec);
        EpisodeRun run = run_episode(spec.pipeline, state, *backend, patterns, episode_seed,
                                     transcript_ref);
        write_transcript(spec.output_dir / transcript_ref, state);
        result = std::move(run.result);
      } catch (const Error& e) {
        result = errored_result(attack, spec.pipeline.kind, episode_seed, transcript_ref);
        EpisodeState error_state;
        error_state.transcript.push_back(
            {"episode_error", nlohmann::ordered_json{{"attack_id", attack.id},
                                                     {"error", e.what()}}});
        try {
          write_transcript(spec.output_dir / transcript_ref, error_state);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!fatal) fatal = std::current_exception();
          return;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!fatal) fatal = std::current_exception();
        return;
      }
      writer.deliver(index, to_json(result).dump());
    }
  };

  if (spec.parallelism == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    const std::size_t n = std::min(spec.parallelism, std::max<std::size_t>(items.size(), 1));
    threads.reserve(n);
    for (std::size_t i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  CampaignSummary summary;
  summary.results_path = results_path;
  summary.executed = writer.written();
  summary.skipped = skipped;
  return summary;
}

std::map<PipelineKind, CampaignSummary> run_ablation(const RunSpec& base) {
  constexpr PipelineKind kOrder[] = {
      PipelineKind::baseline,
      PipelineKind::json_validator_only,
      PipelineKind::two_agent_only,
      PipelineKind::full_pipeline,
  };
  std::map<PipelineKind, CampaignSummary> summaries;
  for (PipelineKind kind : kOrder) {
    RunSpec spec = base;
    const bool validating =
        kind == PipelineKind::full_pipeline || kind == PipelineKind::json_validator_only;
    spec.pipeline = make_pipeline_config(
        kind, validating ? base.pipeline.validator_mode : std::nullopt);
    spec.pipeline.replace_context = base.pipeline.replace_context;
    spec.pipeline.retrieval_k = base.pipeline.retrieval_k;
    spec.pipeline.force_include_attack = base.pipeline.force_include_attack;
    spec.pipeline.max_turns = base.pipeline.max_turns;
    summaries[kind] = run_campaign(spec);
  }
  return summaries;
}

} // namespace mailguard

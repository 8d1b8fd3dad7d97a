#include "mailguard/cli.hpp"

#include "mailguard/common.hpp"
#include "mailguard/data_paths.hpp"
#include "mailguard/harness.hpp"
#include "mailguard/report.hpp"
#include "mailguard/synth.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace mailguard {

namespace {

struct RunFlags {
  std::string config;
  std::string backend = "scripted";
  std::string endpoint;
  std::string model;
  std::string credentials_env = "MAILGUARD_API_KEY";
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  std::vector<int> scenarios{1, 2, 3, 4};
  std::string validator_mode = "audit";
  std::string corpus;
  std::string out_dir;
  std::string benign_pool;
  std::string patterns;
  std::string attacker = kDefaultAttackerAddress;
  bool scripted_verbatim = false;
  bool replace_context = false;
  bool no_force_attack = false;
  std::size_t max_turns = 8;
  std::size_t retrieval_k = 5;
  std::string reader_prompt;
  std::string actor_prompt;
  std::string single_prompt;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags, bool with_config) {
  if (with_config) {
    cmd->add_option("--config", flags.config, "Pipeline configuration")
        ->required()
        ->check(CLI::IsMember({"baseline", "pipeline", "two-agent", "json-validator"}));
  }
  cmd->add_option("--corpus", flags.corpus, "Attack corpus (JSON lines)")->required();
  cmd->add_option("--out", flags.out_dir, "Output directory for results and transcripts")
      ->required();
  cmd->add_option("--backend", flags.backend, "Model backend")
      ->check(CLI::IsMember({"scripted", "http"}));
  cmd->add_option("--endpoint", flags.endpoint, "Chat-completions base URL (http backend)");
  cmd->add_option("--model", flags.model, "Model name (http backend)");
  cmd->add_option("--credentials-env", flags.credentials_env,
                  "Environment variable holding the API key");
  cmd->add_option("--seed", flags.seed, "Run seed");
  cmd->add_option("--parallelism", flags.parallelism, "Worker count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--scenarios", flags.scenarios, "Scenario subset, e.g. 1,2,3,4")
      ->delimiter(',');
  cmd->add_option("--validator-mode", flags.validator_mode, "Validator mode")
      ->check(CLI::IsMember({"audit", "reject", "sanitize"}));
  cmd->add_option("--benign-pool", flags.benign_pool, "Benign email pool (JSON lines)");
  cmd->add_option("--patterns", flags.patterns, "Validator pattern file");
  cmd->add_option("--attacker", flags.attacker, "Attacker address used as the success oracle");
  cmd->add_flag("--scripted-verbatim", flags.scripted_verbatim,
                "Scripted reader copies raw bodies into its summary");
  cmd->add_flag("--replace-context", flags.replace_context,
                "json-validator: replace raw context with the stored summary");
  cmd->add_flag("--no-force-attack", flags.no_force_attack,
                "Do not force the attack email into retrieval results");
  cmd->add_option("--max-turns", flags.max_turns, "Agent turn budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--retrieval-k", flags.retrieval_k, "Retrieval depth for RAG scenarios")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--reader-prompt", flags.reader_prompt, "Override reader system prompt");
  cmd->add_option("--actor-prompt", flags.actor_prompt, "Override actor system prompt");
  cmd->add_option("--single-prompt", flags.single_prompt, "Override single-agent system prompt");
}

RunSpec spec_from_flags(const RunFlags& flags, PipelineKind kind) {
  const bool validating =
      kind == PipelineKind::full_pipeline || kind == PipelineKind::json_validator_only;
  RunSpec spec;
  spec.pipeline = make_pipeline_config(
      kind, validating ? std::optional(validator_mode_from_string(flags.validator_mode))
                       : std::nullopt);
  spec.pipeline.replace_context = flags.replace_context;
  spec.pipeline.max_turns = flags.max_turns;
  spec.pipeline.retrieval_k = flags.retrieval_k;
  spec.pipeline.force_include_attack = !flags.no_force_attack;
  spec.pipeline.reader_prompt = flags.reader_prompt;
  spec.pipeline.actor_prompt = flags.actor_prompt;
  spec.pipeline.single_prompt = flags.single_prompt;

  spec.corpus_path = flags.corpus;
  spec.output_dir = flags.out_dir;
  if (!flags.benign_pool.empty()) spec.benign_pool_path = flags.benign_pool;
  if (!flags.patterns.empty()) spec.patterns_path = flags.patterns;
  spec.seed = flags.seed;
  spec.parallelism = flags.parallelism;
  spec.attacker_address = flags.attacker;

  if (flags.scenarios.empty()) throw CampaignError("scenario set must be non-empty");
  for (int scenario : flags.scenarios) {
    if (scenario < 1 || scenario > 4)
      throw CampaignError("scenario must be in 1..4: " + std::to_string(scenario));
  }
  spec.scenarios = std::set<int>(flags.scenarios.begin(), flags.scenarios.end());

  if (flags.backend == "http") {
    spec.backend.kind = BackendDescriptor::Kind::http;
    spec.backend.http.endpoint = flags.endpoint;
    spec.backend.http.model = flags.model;
    spec.backend.http.credentials_env = flags.credentials_env;
  } else {
    spec.backend.kind = BackendDescriptor::Kind::scripted;
    spec.backend.scripted.verbatim_copy = flags.scripted_verbatim;
  }
  return spec;
}

std::map<PipelineKind, std::vector<EpisodeResult>> collect_results(
    const std::filesystem::path& dir) {
  std::map<PipelineKind, std::vector<EpisodeResult>> by_config;
  for (PipelineKind kind :
       {PipelineKind::baseline, PipelineKind::json_validator_only,
        PipelineKind::two_agent_only, PipelineKind::full_pipeline}) {
    const auto path = results_path_for(dir, kind);
    if (std::filesystem::exists(path)) by_config[kind] = load_results(path);
  }
  return by_config;
}

int cmd_corpus_stats(const std::string& path, std::ostream& out) {
  const auto records = load_corpus(path);
  const CorpusStats stats = corpus_stats(records);
  out << "total: " << stats.total << "\n";
  for (int scenario = 1; scenario <= 4; ++scenario) {
    auto it = stats.per_scenario.find(scenario);
    out << "scenario " << scenario << ": " << (it == stats.per_scenario.end() ? 0 : it->second)
        << "\n";
  }
  out << "duplicate body groups: " << stats.duplicate_groups << "\n";
  return 0;
}

int cmd_corpus_dedup(const std::string& in_path, const std::string& out_path,
                     std::ostream& out) {
  const auto records = load_corpus(in_path);
  const auto unique = dedup_by_body(records);
  write_corpus(unique, out_path);
  out << "kept " << unique.size() << " of " << records.size() << " records -> " << out_path
      << "\n";
  return 0;
}

int cmd_corpus_gen(const SynthOptions& options, const std::string& out_path,
                   std::ostream& out) {
  const auto records = generate_trigger_corpus(options);
  write_corpus(records, out_path);
  out << "wrote " << records.size() << " attacks -> " << out_path << "\n";
  return 0;
}

int cmd_run(const RunFlags& flags, std::ostream& out) {
  const PipelineKind kind = pipeline_kind_from_string(flags.config);
  const RunSpec spec = spec_from_flags(flags, kind);
  const CampaignSummary summary = run_campaign(spec);
  out << "config " << to_string(kind) << ": executed " << summary.executed << " episode(s), "
      << summary.skipped << " already present\n";
  out << "results: " << summary.results_path.string() << "\n\n";

  std::map<PipelineKind, std::vector<EpisodeResult>> by_config;
  by_config[kind] = load_results(summary.results_path);
  out << render_markdown(build_report(by_config));
  return 0;
}

int cmd_ablate(const RunFlags& flags, std::ostream& out) {
  // Build the base spec for a validating kind so the validator mode is
  // carried; run_ablation swaps the kind per configuration.
  const RunSpec base = spec_from_flags(flags, PipelineKind::full_pipeline);
  const auto summaries = run_ablation(base);
  for (const auto& [kind, summary] : summaries) {
    out << "config " << to_string(kind) << ": executed " << summary.executed
        << " episode(s), " << summary.skipped << " already present\n";
  }
  out << "\n" << render_markdown(build_report(collect_results(base.output_dir)));
  return 0;
}

int cmd_report(const std::string& dir, const std::string& format, const std::string& out_file,
               std::optional<std::size_t> normalize, std::ostream& out) {
  const auto by_config = collect_results(dir);
  if (by_config.empty())
    throw CampaignError("no results-*.jsonl files found under " + dir);
  const ReportTables tables = build_report(by_config, normalize);
  if (!out_file.empty()) {
    write_report(tables, out_file, format);
    out << "wrote " << format << " report -> " << out_file << "\n";
  } else if (format == "csv") {
    out << render_csv(tables);
  } else {
    out << render_markdown(tables);
  }
  return 0;
}

int cmd_validate(const std::string& path, const std::string& patterns_path,
                 const std::string& mode_name, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read summary file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  const PatternSet patterns =
      patterns_path.empty() ? PatternSet::defaults() : PatternSet::load(patterns_path);

  SummaryDoc doc;
  try {
    doc = validate_schema(buffer.str());
  } catch (const SchemaError& e) {
    out << "schema: invalid (" << e.what() << ")\n";
    out << "verdict: reject\n";
    return 0;
  }
  out << "schema: ok\n";

  const ValidatorReport report = scan(doc, patterns);
  static const char* kClassNames[] = {"email literals", "tool-call syntax", "trigger phrases"};
  for (int cls = 1; cls <= 3; ++cls) {
    std::size_t count = 0;
    for (const auto& match : report.matches) {
      if (static_cast<int>(match.cls) == cls) ++count;
    }
    out << "class " << cls << " (" << kClassNames[cls - 1] << "): " << count << " match(es)\n";
    for (const auto& match : report.matches) {
      if (static_cast<int>(match.cls) == cls)
        out << "  [" << match.field << "] " << match.span_text << "\n";
    }
  }

  const ValidatorMode mode = validator_mode_from_string(mode_name);
  const auto [result_doc, verdict] = apply_mode(doc, report, mode, patterns);
  out << "verdict: " << to_string(verdict) << "\n";
  if (verdict == Verdict::sanitized) out << serialize_summary(result_doc) << "\n";
  return 0;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Email-assistant prompt-injection defense testbed"};
  app.set_config("--config-file", "", "Key-value config file (TOML syntax); CLI overrides it");
  app.require_subcommand(1);

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus utilities");
  corpus_cmd->require_subcommand(1);

  std::string stats_file;
  auto* stats_cmd = corpus_cmd->add_subcommand("stats", "Per-scenario corpus counts");
  stats_cmd->add_option("file", stats_file, "Corpus file")->required();

  std::string dedup_in, dedup_out;
  auto* dedup_cmd = corpus_cmd->add_subcommand("dedup", "Deduplicate by body");
  dedup_cmd->add_option("file", dedup_in, "Corpus file")->required();
  dedup_cmd->add_option("-o,--out", dedup_out, "Output file")->required();

  SynthOptions synth_options;
  std::string gen_out;
  std::vector<int> gen_scenarios{1, 2, 3, 4};
  auto* gen_cmd = corpus_cmd->add_subcommand("gen", "Generate a canonical-trigger corpus");
  gen_cmd->add_option("-o,--out", gen_out, "Output file")->required();
  gen_cmd->add_option("--count", synth_options.count, "Number of attacks");
  gen_cmd->add_option("--seed", synth_options.seed, "Generator seed");
  gen_cmd->add_option("--scenarios", gen_scenarios, "Scenario subset")->delimiter(',');
  gen_cmd->add_option("--attacker", synth_options.attacker_address, "Trigger target address");

  // run / ablate
  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Replay a corpus under one configuration");
  add_run_flags(run_cmd, run_flags, /*with_config=*/true);

  RunFlags ablate_flags;
  auto* ablate_cmd =
      app.add_subcommand("ablate", "Replay a corpus under all four configurations");
  add_run_flags(ablate_cmd, ablate_flags, /*with_config=*/false);

  // report
  std::string report_dir, report_format = "markdown", report_out;
  std::size_t report_normalize = 0;
  auto* report_cmd = app.add_subcommand("report", "Recompute tables from results files");
  report_cmd->add_option("dir", report_dir, "Run directory with results-*.jsonl")->required();
  report_cmd->add_option("--format", report_format, "Output format")
      ->check(CLI::IsMember({"markdown", "csv"}));
  report_cmd->add_option("--out", report_out, "Write the report to a file");
  report_cmd->add_option("--normalize", report_normalize,
                         "Also render ASR normalized to this full-corpus size");

  // validate
  std::string validate_file, validate_patterns, validate_mode = "audit";
  auto* validate_cmd = app.add_subcommand("validate", "Run the validator on a summary file");
  validate_cmd->add_option("file", validate_file, "File holding one summary document")
      ->required();
  validate_cmd->add_option("--patterns", validate_patterns, "Validator pattern file");
  validate_cmd->add_option("--validator-mode", validate_mode, "Validator mode")
      ->check(CLI::IsMember({"audit", "reject", "sanitize"}));

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mailguard");
  for (const auto& arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::stringstream capture_out, capture_err;
    const int code = app.exit(e, capture_out, capture_err);
    out << capture_out.str();
    err << capture_err.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (corpus_cmd->parsed()) {
      if (stats_cmd->parsed()) return cmd_corpus_stats(stats_file, out);
      if (dedup_cmd->parsed()) return cmd_corpus_dedup(dedup_in, dedup_out, out);
      if (gen_cmd->parsed()) {
        synth_options.scenarios = gen_scenarios;
        return cmd_corpus_gen(synth_options, gen_out, out);
      }
    }
    if (run_cmd->parsed()) return cmd_run(run_flags, out);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_flags, out);
    if (report_cmd->parsed()) {
      return cmd_report(report_dir, report_format, report_out,
                        report_normalize == 0
                            ? std::nullopt
                            : std::optional<std::size_t>(report_normalize),
                        out);
    }
    if (validate_cmd->parsed())
      return cmd_validate(validate_file, validate_patterns, validate_mode, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 1;
}

} // namespace mailguard

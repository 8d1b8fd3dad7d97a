#include "mailguard/report.hpp"

#include "mailguard/common.hpp"

#include <fstream>
#include <sstream>

namespace mailguard {

namespace {

constexpr PipelineKind kRowOrder[] = {
    PipelineKind::baseline,
    PipelineKind::json_validator_only,
    PipelineKind::two_agent_only,
    PipelineKind::full_pipeline,
};

bool isolation_config(PipelineKind kind) {
  return kind == PipelineKind::full_pipeline || kind == PipelineKind::two_agent_only;
}

std::string scenario_cell(const std::map<int, AsrCell>& per_scenario, int scenario) {
  auto it = per_scenario.find(scenario);
  if (it == per_scenario.end() || it->second.total == 0) return "-";
  const auto& cell = it->second;
  const std::string pct = (cell.successes == cell.total && cell.total > 0)
                              ? "100"
                              : format_percent(cell.successes, cell.total, 1);
  return pct + "% (" + std::to_string(cell.successes) + "/" + std::to_string(cell.total) + ")";
}

} // namespace

std::string config_display_name(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::baseline: return "Baseline";
    case PipelineKind::json_validator_only: return "JSON Validator Only";
    case PipelineKind::two_agent_only: return "Two-Agent Only";
    case PipelineKind::full_pipeline: return "Pipeline (full)";
  }
  return "Baseline";
}

ReportTables build_report(const std::map<PipelineKind, std::vector<EpisodeResult>>& by_config,
                          std::optional<std::size_t> normalize_to) {
  ReportTables tables;
  tables.normalize_to = normalize_to;

  const std::vector<EpisodeResult>* baseline = nullptr;
  if (auto it = by_config.find(PipelineKind::baseline); it != by_config.end())
    baseline = &it->second;

  for (PipelineKind kind : kRowOrder) {
    auto it = by_config.find(kind);
    if (it == by_config.end()) continue;
    ConfigReport row;
    row.kind = kind;
    const std::vector<EpisodeResult>* reference =
        (baseline && kind != PipelineKind::baseline) ? baseline : nullptr;
    try {
      row.table = compute_asr(it->second, reference);
    } catch (const CampaignError&) {
      // Baseline does not cover these ids; report without the improvement column.
      row.table = compute_asr(it->second);
    }
    if (isolation_config(kind)) {
      try {
        row.leak_rate = compute_leak_rate(it->second);
      } catch (const CampaignError&) {
        row.leak_rate = std::nullopt;
      }
    }
    tables.configs.push_back(std::move(row));
  }
  return tables;
}

std::string render_markdown(const ReportTables& tables) {
  std::ostringstream out;

  bool any_errored = false;
  for (const auto& row : tables.configs) {
    if (row.table.overall.errored > 0) any_errored = true;
  }

  out << "## Ablation\n\n";
  out << "| Configuration | ASR | Succ. | Def. | Improv. |";
  if (any_errored) out << " ASR excl. errored |";
  out << "\n";
  out << "|---|---:|---:|---:|---:|";
  if (any_errored) out << "---:|";
  out << "\n";
  for (const auto& row : tables.configs) {
    const auto& cell = row.table.overall;
    out << "| " << config_display_name(row.kind) << " | " << render_asr2(cell.asr()) << "% | "
        << cell.successes << " | " << render_rate1(cell.defense_rate()) << "% | ";
    if (row.kind == PipelineKind::baseline || !row.table.improvement.has_value()) {
      out << "-";
    } else {
      // Display-rounded value first, exact value alongside.
      out << format_improvement_display(cell, tables.configs.front().table.overall)
          << " (exact " << format_improvement_exact(*row.table.improvement) << ")";
    }
    out << " |";
    if (any_errored) {
      if (cell.errored > 0 && cell.total > cell.errored) {
        out << " " << render_asr2(cell.asr_excluding_errored()) << "% |";
      } else {
        out << " - |";
      }
    }
    out << "\n";
  }

  out << "\n## Per-scenario ASR\n\n| Sc. |";
  for (const auto& row : tables.configs) out << " " << config_display_name(row.kind) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < tables.configs.size(); ++i) out << "---:|";
  out << "\n";
  for (int scenario = 1; scenario <= 4; ++scenario) {
    out << "| " << scenario << " |";
    for (const auto& row : tables.configs) {
      out << " " << scenario_cell(row.table.per_scenario, scenario) << " |";
    }
    out << "\n";
  }

  bool any_leak = false;
  for (const auto& row : tables.configs) {
    if (row.leak_rate.has_value()) any_leak = true;
  }
  if (any_leak) {
    out << "\n## Injection leak rate into stored summaries\n\n";
    out << "| Configuration | Leak rate |\n|---|---:|\n";
    for (const auto& row : tables.configs) {
      if (!row.leak_rate.has_value()) continue;
      out << "| " << config_display_name(row.kind) << " | "
          << render_rate1(*row.leak_rate) << "% (" << row.leak_rate->num << "/"
          << row.leak_rate->den << ") |\n";
    }
  }

  if (tables.normalize_to.has_value()) {
    out << "\n## Normalized to the full corpus (" << *tables.normalize_to << " attacks)\n\n";
    out << "| Configuration | ASR (normalized) |\n|---|---:|\n";
    for (const auto& row : tables.configs) {
      const Fraction normalized = compute_normalized_asr(
          row.table.overall.successes, row.table.overall.total, *tables.normalize_to);
      out << "| " << config_display_name(row.kind) << " | " << render_normalized(normalized)
          << "% |\n";
    }
  }

  return out.str();
}

std::string render_csv(const ReportTables& tables) {
  std::ostringstream out;
  out << "config,scope,successes,total,errored\n";
  for (const auto& row : tables.configs) {
    const std::string name = to_string(row.kind);
    const auto& overall = row.table.overall;
    out << name << ",overall," << overall.successes << "," << overall.total << ","
        << overall.errored << "\n";
    for (const auto& [scenario, cell] : row.table.per_scenario) {
      out << name << ",scenario-" << scenario << "," << cell.successes << "," << cell.total
          << "," << cell.errored << "\n";
    }
    if (row.leak_rate.has_value()) {
      out << name << ",leak," << row.leak_rate->num << "," << row.leak_rate->den << ",0\n";
    }
  }
  return out.str();
}

void write_report(const ReportTables& tables, const std::filesystem::path& path,
                  const std::string& format) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CampaignError("cannot write report file: " + path.string());
  if (format == "markdown") {
    out << render_markdown(tables);
  } else if (format == "csv") {
    out << render_csv(tables);
  } else {
    throw Error("unknown report format: " + format);
  }
}

} // namespace mailguard

#pragma once

#include "mailguard/metrics.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mailguard {

struct ConfigReport {
  PipelineKind kind = PipelineKind::baseline;
  ASRTable table;
  std::optional<Fraction> leak_rate; // isolation configurations only
};

struct ReportTables {
  std::vector<ConfigReport> configs;        // ablation row order
  std::optional<std::size_t> normalize_to;  // full corpus size, when requested
};

std::string config_display_name(PipelineKind kind);

// Builds ablation rows (improvement against the baseline rows when present
// and comparable) plus leak rates for the isolation configurations.
ReportTables build_report(const std::map<PipelineKind, std::vector<EpisodeResult>>& by_config,
                          std::optional<std::size_t> normalize_to = std::nullopt);

std::string render_markdown(const ReportTables& tables);

// One row per (config, scope) with integer counts; scopes are "overall",
// "scenario-N", and "leak".
std::string render_csv(const ReportTables& tables);

void write_report(const ReportTables& tables, const std::filesystem::path& path,
                  const std::string& format);

} // namespace mailguard

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mailguard {

// One replayable injection payload.
struct AttackRecord {
  std::string id;
  int scenario = 0; // 1..4
  std::string subject;
  std::string body; // the injection payload
  std::string sender;
  std::string source_tag;

  bool operator==(const AttackRecord&) const = default;
};

struct CorpusStats {
  std::size_t total = 0;
  std::map<int, std::size_t> per_scenario;
  std::size_t duplicate_groups = 0; // body-equivalence classes with >1 member
};

// The body-equivalence key used for deduplication: trim + collapse internal
// whitespace runs, case-sensitive.
std::string normalize_body(std::string_view body);

// Reads a line-delimited JSON corpus (one record per line). Unknown keys are
// tolerated; errors name the offending line.
std::vector<AttackRecord> load_corpus(const std::filesystem::path& path);

// Writes records as line-delimited JSON with only the schema keys.
void write_corpus(const std::vector<AttackRecord>& records, const std::filesystem::path& path);

// Keeps the first record of each body-equivalence class, in first-occurrence
// order.
std::vector<AttackRecord> dedup_by_body(const std::vector<AttackRecord>& records);

// Returns the records whose id is in successful_ids, preserving input order.
// Every id in successful_ids must name a record.
std::vector<AttackRecord> filter_to_pool(const std::vector<AttackRecord>& records,
                                         const std::set<std::string>& successful_ids);

CorpusStats corpus_stats(const std::vector<AttackRecord>& records);

} // namespace mailguard

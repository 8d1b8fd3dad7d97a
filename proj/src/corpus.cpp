#include "mailguard/corpus.hpp"

#include "mailguard/common.hpp"
#include "mailguard/text_util.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace mailguard {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw CorpusError("line " + std::to_string(line) + ": " + what);
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) fail_line(line, std::string("missing field ") + key);
  if (!obj[key].is_string()) fail_line(line, std::string("field ") + key + " must be a string");
  return obj[key].get<std::string>();
}

AttackRecord parse_record(const json& obj, std::size_t line) {
  if (!obj.is_object()) fail_line(line, "record must be a JSON object");

  AttackRecord rec;
  rec.id = require_string(obj, "id", line);
  if (rec.id.empty()) fail_line(line, "id must be non-empty");

  if (!obj.contains("scenario")) fail_line(line, "missing field scenario");
  if (!obj["scenario"].is_number_integer())
    fail_line(line, "field scenario must be an integer");
  rec.scenario = obj["scenario"].get<int>();
  if (rec.scenario < 1 || rec.scenario > 4)
    fail_line(line, "scenario must be in 1..4 (got " + std::to_string(rec.scenario) + ")");

  rec.subject = require_string(obj, "subject", line);
  rec.body = require_string(obj, "body", line);
  if (rec.body.empty()) fail_line(line, "body must be non-empty");
  rec.sender = require_string(obj, "sender", line);
  if (obj.contains("source_tag")) {
    if (!obj["source_tag"].is_string())
      fail_line(line, "field source_tag must be a string");
    rec.source_tag = obj["source_tag"].get<std::string>();
  }
  return rec;
}

} // namespace

std::string normalize_body(std::string_view body) {
  return collapse_whitespace(body);
}

std::vector<AttackRecord> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read corpus file: " + path.string());

  std::vector<AttackRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_line(line_no, std::string("malformed JSON: ") + e.what());
    }
    AttackRecord rec = parse_record(obj, line_no);
    if (!seen_ids.insert(rec.id).second)
      fail_line(line_no, "duplicate id: " + rec.id);
    records.push_back(std::move(rec));
  }
  return records;
}

void write_corpus(const std::vector<AttackRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CorpusError("cannot write corpus file: " + path.string());
  for (const auto& rec : records) {
    ordered_json obj;
    obj["id"] = rec.id;
    obj["scenario"] = rec.scenario;
    obj["subject"] = rec.subject;
    obj["body"] = rec.body;
    obj["sender"] = rec.sender;
    if (!rec.source_tag.empty()) obj["source_tag"] = rec.source_tag;
    out << obj.dump() << '\n';
  }
}

std::vector<AttackRecord> dedup_by_body(const std::vector<AttackRecord>& records) {
  std::vector<AttackRecord> out;
  std::unordered_set<std::string> seen;
  out.reserve(records.size());
  for (const auto& rec : records) {
    if (seen.insert(normalize_body(rec.body)).second) out.push_back(rec);
  }
  return out;
}

std::vector<AttackRecord> filter_to_pool(const std::vector<AttackRecord>& records,
                                         const std::set<std::string>& successful_ids) {
  std::unordered_set<std::string> known;
  known.reserve(records.size());
  for (const auto& rec : records) known.insert(rec.id);
  for (const auto& id : successful_ids) {
    if (!known.count(id)) throw CorpusError("unknown id in pool selection: " + id);
  }
  std::vector<AttackRecord> out;
  for (const auto& rec : records) {
    if (successful_ids.count(rec.id)) out.push_back(rec);
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<AttackRecord>& records) {
  CorpusStats stats;
  stats.total = records.size();
  std::unordered_map<std::string, std::size_t> groups;
  for (const auto& rec : records) {
    ++stats.per_scenario[rec.scenario];
    ++groups[normalize_body(rec.body)];
  }
  for (const auto& [body, count] : groups) {
    if (count > 1) ++stats.duplicate_groups;
  }
  return stats;
}

} // namespace mailguard

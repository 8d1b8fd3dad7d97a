#include "mailguard/validator.hpp"

#include "mailguard/common.hpp"
#include "mailguard/data_paths.hpp"
#include "mailguard/text_util.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>

namespace mailguard {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kRedacted = "[REDACTED]";

std::regex compile_pattern(PatternClass cls, const std::string& source) {
  auto flags = std::regex::ECMAScript;
  if (cls == PatternClass::trigger_phrase) flags |= std::regex::icase;
  try {
    return std::regex(source, flags);
  } catch (const std::regex_error& e) {
    throw PatternError("pattern does not compile: '" + source + "': " + e.what());
  }
}

struct FieldRef {
  std::string name;
  const std::string* text;
};

std::vector<FieldRef> doc_fields(const SummaryDoc& doc) {
  std::vector<FieldRef> fields{
      {"sender", &doc.sender},
      {"subject", &doc.subject},
      {"body_summary", &doc.body_summary},
  };
  for (std::size_t i = 0; i < doc.action_items.size(); ++i) {
    fields.push_back({"action_items[" + std::to_string(i) + "]", &doc.action_items[i]});
  }
  return fields;
}

void scan_field(const std::string& field_name, const std::string& text,
                const PatternSet& patterns, ValidatorReport& report) {
  for (const auto& pattern : patterns.patterns()) {
    auto begin = std::sregex_iterator(text.begin(), text.end(), pattern.re);
    auto end = std::sregex_iterator();
    for (auto it = begin; it != end; ++it) {
      if (it->length(0) == 0) continue;
      report.flags[static_cast<int>(pattern.cls) - 1] = true;
      report.matches.push_back({pattern.cls, pattern.source, it->str(0), field_name});
    }
  }
}

// Replaces every matched span (all patterns, merged intervals) with the
// redaction marker.
std::string sanitize_text(const std::string& text, const PatternSet& patterns) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& pattern : patterns.patterns()) {
    auto begin = std::sregex_iterator(text.begin(), text.end(), pattern.re);
    auto end = std::sregex_iterator();
    for (auto it = begin; it != end; ++it) {
      if (it->length(0) == 0) continue;
      const auto pos = static_cast<std::size_t>(it->position(0));
      spans.emplace_back(pos, pos + static_cast<std::size_t>(it->length(0)));
    }
  }
  if (spans.empty()) return text;
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& span : spans) {
    if (!merged.empty() && span.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, span.second);
    } else {
      merged.push_back(span);
    }
  }
  std::string out;
  out.reserve(text.size());
  std::size_t cursor = 0;
  for (const auto& [begin, end] : merged) {
    out.append(text, cursor, begin - cursor);
    out.append(kRedacted);
    cursor = end;
  }
  out.append(text, cursor, text.size() - cursor);
  return out;
}

SummaryDoc sanitize_doc(SummaryDoc doc, const PatternSet& patterns) {
  // Repeat until the scan is clean; replacement text never matches the
  // default classes, so this settles in one round for realistic inputs.
  for (int round = 0; round < 8; ++round) {
    ValidatorReport report = scan(doc, patterns);
    if (!report.any_flag()) break;
    doc.sender = sanitize_text(doc.sender, patterns);
    doc.subject = sanitize_text(doc.subject, patterns);
    doc.body_summary = sanitize_text(doc.body_summary, patterns);
    for (auto& item : doc.action_items) item = sanitize_text(item, patterns);
  }
  return doc;
}

bool any_pattern_matches(const std::string& text, const PatternSet& patterns) {
  for (const auto& pattern : patterns.patterns()) {
    if (std::regex_search(text, pattern.re)) return true;
  }
  return false;
}

bool shared_run_at_least(const std::string& normalized_attack, const std::string& field_text,
                         std::size_t threshold) {
  return longest_common_substring(normalized_attack, collapse_whitespace(field_text)) >= threshold;
}

} // namespace

PatternSet PatternSet::from_lines(const std::vector<std::string>& lines) {
  PatternSet set;
  std::set<std::string> seen_sources;
  std::size_t line_no = 0;
  for (const auto& raw : lines) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos)
      throw PatternError("pattern line " + std::to_string(line_no) +
                         ": expected <class><TAB><regex>");
    const std::string cls_text = trim(raw.substr(0, tab));
    const std::string source = raw.substr(tab + 1);
    if (cls_text.size() != 1 || cls_text[0] < '1' || cls_text[0] > '3')
      throw PatternError("pattern line " + std::to_string(line_no) +
                         ": class must be 1, 2, or 3");
    if (source.empty())
      throw PatternError("pattern line " + std::to_string(line_no) + ": empty regex");
    if (!seen_sources.insert(source).second)
      throw PatternError("pattern line " + std::to_string(line_no) +
                         ": pattern appears in more than one rule: '" + source + "'");
    const auto cls = static_cast<PatternClass>(cls_text[0] - '0');
    set.patterns_.push_back({cls, source, compile_pattern(cls, source)});
  }
  return set;
}

PatternSet PatternSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PatternError("cannot read pattern file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return from_lines(lines);
}

PatternSet PatternSet::defaults() {
  return load(default_patterns_path());
}

std::vector<std::string> PatternSet::sources_for(PatternClass cls) const {
  std::vector<std::string> out;
  for (const auto& pattern : patterns_) {
    if (pattern.cls == cls) out.push_back(pattern.source);
  }
  return out;
}

std::string to_string(ValidatorMode mode) {
  switch (mode) {
    case ValidatorMode::audit: return "audit";
    case ValidatorMode::enforce_reject: return "reject";
    case ValidatorMode::enforce_sanitize: return "sanitize";
  }
  return "audit";
}

ValidatorMode validator_mode_from_string(std::string_view s) {
  if (s == "audit") return ValidatorMode::audit;
  if (s == "reject") return ValidatorMode::enforce_reject;
  if (s == "sanitize") return ValidatorMode::enforce_sanitize;
  throw Error("unknown validator mode: " + std::string(s));
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::reject: return "reject";
    case Verdict::sanitized: return "sanitized";
  }
  return "pass";
}

SummaryDoc validate_schema(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("not valid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaError("not a JSON object");

  static const char* kStringFields[] = {"sender", "subject", "body_summary"};
  for (const char* field : kStringFields) {
    if (!obj.contains(field)) throw SchemaError(std::string("missing field ") + field);
    if (!obj[field].is_string())
      throw SchemaError(std::string("field ") + field + " must be a string");
  }
  if (!obj.contains("action_items")) throw SchemaError("missing field action_items");
  if (!obj["action_items"].is_array())
    throw SchemaError("field action_items must be an array of strings");
  for (const auto& item : obj["action_items"]) {
    if (!item.is_string())
      throw SchemaError("field action_items must be an array of strings");
  }
  for (const auto& [key, value] : obj.items()) {
    if (key != "sender" && key != "subject" && key != "body_summary" && key != "action_items")
      throw SchemaError("unexpected field " + key);
  }

  SummaryDoc doc;
  doc.sender = obj["sender"].get<std::string>();
  doc.subject = obj["subject"].get<std::string>();
  doc.body_summary = obj["body_summary"].get<std::string>();
  doc.action_items = obj["action_items"].get<std::vector<std::string>>();
  return doc;
}

std::string serialize_summary(const SummaryDoc& doc) {
  ordered_json obj;
  obj["sender"] = doc.sender;
  obj["subject"] = doc.subject;
  obj["body_summary"] = doc.body_summary;
  obj["action_items"] = doc.action_items;
  return obj.dump();
}

ValidatorReport scan(const SummaryDoc& doc, const PatternSet& patterns) {
  ValidatorReport report;
  for (const auto& field : doc_fields(doc)) {
    scan_field(field.name, *field.text, patterns, report);
  }
  return report;
}

std::pair<SummaryDoc, Verdict> apply_mode(const SummaryDoc& doc, const ValidatorReport& report,
                                          ValidatorMode mode, const PatternSet& patterns) {
  switch (mode) {
    case ValidatorMode::audit:
      return {doc, Verdict::pass};
    case ValidatorMode::enforce_reject:
      return {doc, report.any_flag() ? Verdict::reject : Verdict::pass};
    case ValidatorMode::enforce_sanitize:
      if (!report.any_flag()) return {doc, Verdict::pass};
      return {sanitize_doc(doc, patterns), Verdict::sanitized};
  }
  return {doc, Verdict::pass};
}

bool leak_detect(const SummaryDoc& doc, const std::string& attack_body,
                 const PatternSet& patterns, std::size_t threshold) {
  if (threshold < 1) throw Error("leak_detect: threshold must be >= 1");
  if (scan(doc, patterns).any_flag()) return true;
  const std::string normalized_attack = collapse_whitespace(attack_body);
  for (const auto& field : doc_fields(doc)) {
    if (shared_run_at_least(normalized_attack, *field.text, threshold)) return true;
  }
  return false;
}

bool leak_detect_text(const std::string& summary_text, const std::string& attack_body,
                      const PatternSet& patterns, std::size_t threshold) {
  if (threshold < 1) throw Error("leak_detect: threshold must be >= 1");
  if (any_pattern_matches(summary_text, patterns)) return true;
  return shared_run_at_least(collapse_whitespace(attack_body), summary_text, threshold);
}

} // namespace mailguard

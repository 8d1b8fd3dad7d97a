#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace mailguard {

// The structured hand-off document. Exactly these four fields.
struct SummaryDoc {
  std::string sender;
  std::string subject;
  std::string body_summary;
  std::vector<std::string> action_items;

  bool operator==(const SummaryDoc&) const = default;
};

enum class PatternClass : int {
  email_literal = 1,   // email address literals
  toolcall_syntax = 2, // tool-call syntax fragments
  trigger_phrase = 3,  // injection trigger phrases (matched case-insensitively)
};

struct CompiledPattern {
  PatternClass cls;
  std::string source;
  std::regex re;
};

// Pattern file grammar: UTF-8 text, one rule per line as
// `<class-number><TAB><regex>`; `#` starts a comment line; blank lines are
// ignored. Class 3 rules are compiled case-insensitively.
class PatternSet {
public:
  static PatternSet from_lines(const std::vector<std::string>& lines);
  static PatternSet load(const std::filesystem::path& path);
  // Parses data/default_patterns.txt from the data directory (see
  // default_data_dir in harness.hpp).
  static PatternSet defaults();

  const std::vector<CompiledPattern>& patterns() const { return patterns_; }
  std::vector<std::string> sources_for(PatternClass cls) const;

private:
  std::vector<CompiledPattern> patterns_;
};

struct PatternMatch {
  PatternClass cls;
  std::string pattern;   // regex source
  std::string span_text; // the matched text
  std::string field;     // "sender" | "subject" | "body_summary" | "action_items[i]"
};

enum class Verdict { pass, reject, sanitized };

struct ValidatorReport {
  std::array<bool, 3> flags{}; // index 0 = class 1
  std::vector<PatternMatch> matches;
  Verdict verdict = Verdict::pass;

  bool flag(PatternClass cls) const { return flags[static_cast<int>(cls) - 1]; }
  bool any_flag() const { return flags[0] || flags[1] || flags[2]; }
};

enum class ValidatorMode { audit, enforce_reject, enforce_sanitize };

std::string to_string(ValidatorMode mode);
ValidatorMode validator_mode_from_string(std::string_view s);
std::string to_string(Verdict verdict);

// Strict parse: a single JSON object with exactly the four fields, correct
// types. Throws SchemaError naming the missing/extra/wrongly-typed field.
SummaryDoc validate_schema(const std::string& text);

// Canonical serialization: fixed field order, no extraneous whitespace.
// Round-trips through validate_schema.
std::string serialize_summary(const SummaryDoc& doc);

// Runs every pattern against every string field (action_items element-wise).
ValidatorReport scan(const SummaryDoc& doc, const PatternSet& patterns);

// audit: doc unchanged, pass. enforce_reject: reject when flagged.
// enforce_sanitize: every matched span replaced by "[REDACTED]".
std::pair<SummaryDoc, Verdict> apply_mode(const SummaryDoc& doc, const ValidatorReport& report,
                                          ValidatorMode mode, const PatternSet& patterns);

// True when the scan flags fire or a >= threshold-character run of the
// whitespace-normalized attack body appears in any normalized field.
bool leak_detect(const SummaryDoc& doc, const std::string& attack_body,
                 const PatternSet& patterns, std::size_t threshold = 24);

// Same rule over a free-form summary text (single field).
bool leak_detect_text(const std::string& summary_text, const std::string& attack_body,
                      const PatternSet& patterns, std::size_t threshold = 24);

} // namespace mailguard

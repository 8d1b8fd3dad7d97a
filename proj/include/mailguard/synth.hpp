#pragma once

#include "mailguard/corpus.hpp"
#include "mailguard/scripted_backend.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mailguard {

struct SynthOptions {
  std::size_t count = 200;
  std::vector<int> scenarios{1, 2, 3, 4}; // assigned round-robin
  std::uint64_t seed = 0;
  std::string attacker_address = kDefaultAttackerAddress;
};

// Canonical-trigger attack corpus: every body embeds one parseable trigger
// directive; scenario-4 bodies ask for the budget figure via the
// placeholder token so exfiltration is expressible.
std::vector<AttackRecord> generate_trigger_corpus(const SynthOptions& options);

// Obfuscated renderings of a directive (base64, split tokens, spaced-out)
// for validator stress tests. None of them parse as a canonical trigger.
std::vector<std::string> obfuscated_trigger_variants(const TriggerDirective& directive);

} // namespace mailguard

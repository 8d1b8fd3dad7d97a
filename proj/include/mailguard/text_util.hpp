#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace mailguard {

// Strips leading/trailing ASCII whitespace.
std::string trim(std::string_view s);

// Trims, then collapses every internal whitespace run to a single space.
std::string collapse_whitespace(std::string_view s);

// ASCII lowercase.
std::string to_lower(std::string_view s);

// Case-folded alphanumeric token runs, in order of appearance.
std::vector<std::string> tokenize_folded(std::string_view s);

// Length of the longest common substring of a and b.
std::size_t longest_common_substring(std::string_view a, std::string_view b);

// Uniform draw from [0, n) via rejection sampling; identical sequence on
// every platform for a given generator state. n must be > 0.
std::uint32_t bounded_uniform(std::mt19937& rng, std::uint32_t n);

std::uint64_t fnv1a64(std::string_view s);

// Per-episode seed: stable under reordering of the corpus and across runs.
std::uint32_t derive_episode_seed(std::uint64_t run_seed, std::string_view attack_id);

} // namespace mailguard

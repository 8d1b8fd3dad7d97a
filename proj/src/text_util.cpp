#include "mailguard/text_util.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace mailguard {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

} // namespace

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_run = false;
  for (char c : s) {
    if (is_space(c)) {
      in_run = true;
      continue;
    }
    if (in_run && !out.empty()) out.push_back(' ');
    in_run = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> tokenize_folded(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t longest_common_substring(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) return 0;
  // Rolling single-row DP over the shorter string.
  if (b.size() > a.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0; // row[j-1] from the previous iteration of i
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t prev = row[j];
      row[j] = (a[i - 1] == b[j - 1]) ? diag + 1 : 0;
      best = std::max(best, row[j]);
      diag = prev;
    }
  }
  return best;
}

std::uint32_t bounded_uniform(std::mt19937& rng, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("bounded_uniform: n must be > 0");
  // Accept r >= (2^32 mod n); then r mod n is exactly uniform.
  const std::uint32_t threshold = (-n) % n;
  for (;;) {
    const std::uint32_t r = rng();
    if (r >= threshold) return r % n;
  }
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint32_t derive_episode_seed(std::uint64_t run_seed, std::string_view attack_id) {
  std::uint64_t h = fnv1a64(attack_id);
  h ^= run_seed * 0x9E3779B97F4A7C15ULL;
  // splitmix64 finalizer
  h ^= h >> 30;
  h *= 0xBF58476D1CE4E5B9ULL;
  h ^= h >> 27;
  h *= 0x94D049BB133111EBULL;
  h ^= h >> 31;
  return static_cast<std::uint32_t>(h);
}

} // namespace mailguard

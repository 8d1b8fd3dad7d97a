#include "mailguard/text_util.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace mailguard;

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(trim("\t\n x \r\n") == "x");
  CHECK(trim("") == "");
  CHECK(trim("   ") == "");
}

TEST_CASE("collapse_whitespace trims and squeezes runs") {
  CHECK(collapse_whitespace("a  b") == "a b");
  CHECK(collapse_whitespace("  a \t\n b  c ") == "a b c");
  CHECK(collapse_whitespace("abc") == "abc");
  CHECK(collapse_whitespace("") == "");
  CHECK(collapse_whitespace(" \t ") == "");
}

TEST_CASE("tokenize_folded lowercases alnum runs") {
  const auto tokens = tokenize_folded("Quarterly BUDGET: review-2024!");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0] == "quarterly");
  CHECK(tokens[1] == "budget");
  CHECK(tokens[2] == "review");
  CHECK(tokens[3] == "2024");
}

TEST_CASE("longest_common_substring matches the brute-force oracle") {
  CHECK(longest_common_substring("", "abc") == 0);
  CHECK(longest_common_substring("abc", "abc") == 3);
  CHECK(longest_common_substring("xabcy", "zabcw") == 3);

  std::mt19937 rng(42);
  for (int iteration = 0; iteration < 200; ++iteration) {
    std::string a, b;
    const auto len_a = bounded_uniform(rng, 40);
    const auto len_b = bounded_uniform(rng, 40);
    for (std::uint32_t i = 0; i < len_a; ++i)
      a.push_back(static_cast<char>('a' + bounded_uniform(rng, 3)));
    for (std::uint32_t i = 0; i < len_b; ++i)
      b.push_back(static_cast<char>('a' + bounded_uniform(rng, 3)));
    CHECK(longest_common_substring(a, b) == mailguard::testing::lcs_bruteforce(a, b));
  }
}

TEST_CASE("bounded_uniform stays in range and is deterministic") {
  std::mt19937 a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    const auto va = bounded_uniform(a, 10);
    const auto vb = bounded_uniform(b, 10);
    CHECK(va == vb);
    CHECK(va < 10);
  }
  std::mt19937 c(1);
  CHECK(bounded_uniform(c, 1) == 0);
}

TEST_CASE("derive_episode_seed depends on both run seed and id") {
  CHECK(derive_episode_seed(7, "a-1") == derive_episode_seed(7, "a-1"));
  CHECK(derive_episode_seed(7, "a-1") != derive_episode_seed(8, "a-1"));
  CHECK(derive_episode_seed(7, "a-1") != derive_episode_seed(7, "a-2"));
}

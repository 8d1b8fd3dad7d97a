#include "mailguard/corpus.hpp"

#include "mailguard/common.hpp"
#include "mailguard/text_util.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace mailguard;
using mailguard::testing::TempDir;

namespace {

const char* kThreeLineFixture =
    R"({"id":"a-1","scenario":1,"subject":"s1","body":"first body","sender":"x@evil.example"}
{"id":"a-2","scenario":2,"subject":"s2","body":"second body","sender":"y@evil.example"}
{"id":"a-3","scenario":4,"subject":"s3","body":"third body","sender":"z@evil.example"}
)";

// Seeded corpus with deliberate duplicate bodies and whitespace variants.
std::vector<AttackRecord> random_corpus(std::mt19937& rng) {
  static const char* kBodies[] = {"alpha beta", "alpha  beta", " gamma", "delta epsilon",
                                  "zeta", "eta theta iota"};
  const std::size_t n = bounded_uniform(rng, 12);
  std::vector<AttackRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    records.push_back(mailguard::testing::make_attack(
        "r-" + std::to_string(i), static_cast<int>(bounded_uniform(rng, 4)) + 1,
        kBodies[bounded_uniform(rng, 6)]));
  }
  return records;
}

} // namespace

TEST_CASE("load_corpus: empty file yields empty list") {
  TempDir dir;
  const auto path = dir.write_file("empty.jsonl", "");
  CHECK(load_corpus(path).empty());
}

TEST_CASE("load_corpus: three-line fixture in file order") {
  TempDir dir;
  const auto path = dir.write_file("three.jsonl", kThreeLineFixture);
  const auto records = load_corpus(path);
  REQUIRE(records.size() == 3);
  CHECK(records[0].id == "a-1");
  CHECK(records[1].id == "a-2");
  CHECK(records[2].id == "a-3");
  CHECK(records[2].scenario == 4);
  CHECK(records[0].body == "first body");
}

TEST_CASE("load_corpus: error cases name the line") {
  TempDir dir;

  SUBCASE("scenario out of range on line 2") {
    const auto path = dir.write_file(
        "bad.jsonl",
        R"({"id":"a-1","scenario":1,"subject":"s","body":"b","sender":"x@e.example"}
{"id":"a-2","scenario":5,"subject":"s","body":"b2","sender":"x@e.example"}
)");
    CHECK_THROWS_WITH_AS(load_corpus(path),
                         doctest::Contains("line 2"), CorpusError);
  }
  SUBCASE("malformed JSON") {
    const auto path = dir.write_file("bad.jsonl", "{not json}\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 1"), CorpusError);
  }
  SUBCASE("missing field") {
    const auto path = dir.write_file(
        "bad.jsonl", R"({"id":"a-1","scenario":1,"subject":"s","sender":"x@e.example"})");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("missing field body"),
                         CorpusError);
  }
  SUBCASE("duplicate id") {
    const auto path = dir.write_file(
        "bad.jsonl",
        R"({"id":"a-1","scenario":1,"subject":"s","body":"b","sender":"x@e.example"}
{"id":"a-1","scenario":1,"subject":"s","body":"c","sender":"x@e.example"}
)");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("duplicate id"), CorpusError);
  }
  SUBCASE("empty body") {
    const auto path = dir.write_file(
        "bad.jsonl", R"({"id":"a-1","scenario":1,"subject":"s","body":"","sender":"x@e.example"})");
    CHECK_THROWS_AS(load_corpus(path), CorpusError);
  }
  SUBCASE("unreadable file") {
    CHECK_THROWS_AS(load_corpus(dir.path() / "missing.jsonl"), CorpusError);
  }
}

TEST_CASE("load_corpus: unknown keys are tolerated, write drops them") {
  TempDir dir;
  const auto path = dir.write_file(
      "extra.jsonl",
      R"({"id":"a-1","scenario":1,"subject":"s","body":"b","sender":"x@e.example","rank":3})");
  const auto records = load_corpus(path);
  REQUIRE(records.size() == 1);

  const auto out_path = dir.path() / "out.jsonl";
  write_corpus(records, out_path);
  const std::string written = mailguard::testing::read_file(out_path);
  CHECK(written.find("rank") == std::string::npos);
  CHECK(load_corpus(out_path) == records);
}

TEST_CASE("dedup_by_body keeps the first of each equivalence class") {
  SUBCASE("exact duplicate") {
    std::vector<AttackRecord> records{
        mailguard::testing::make_attack("a-1", 1, "same body"),
        mailguard::testing::make_attack("a-2", 2, "same body"),
    };
    const auto unique = dedup_by_body(records);
    REQUIRE(unique.size() == 1);
    CHECK(unique[0].id == "a-1");
  }
  SUBCASE("whitespace-collapsed bodies are equivalent") {
    // "a  b" and "a b" collapse to the same key.
    std::vector<AttackRecord> records{
        mailguard::testing::make_attack("a-1", 1, "a  b"),
        mailguard::testing::make_attack("a-2", 1, "a b"),
    };
    CHECK(dedup_by_body(records).size() == 1);
    CHECK(normalize_body("a  b") == normalize_body("a b"));
    CHECK(normalize_body("  a b ") == "a b");
  }
  SUBCASE("case differences are preserved") {
    std::vector<AttackRecord> records{
        mailguard::testing::make_attack("a-1", 1, "Alpha"),
        mailguard::testing::make_attack("a-2", 1, "alpha"),
    };
    CHECK(dedup_by_body(records).size() == 2);
  }
}

TEST_CASE("dedup properties over randomized corpora") {
  std::mt19937 rng(2024);
  for (int iteration = 0; iteration < 300; ++iteration) {
    const auto records = random_corpus(rng);
    const auto once = dedup_by_body(records);
    const auto twice = dedup_by_body(once);
    CHECK(once == twice);              // idempotent
    CHECK(once.size() <= records.size()); // never grows
    std::set<std::string> input_ids, output_ids;
    for (const auto& rec : records) input_ids.insert(rec.id);
    for (const auto& rec : once) output_ids.insert(rec.id);
    for (const auto& id : output_ids) CHECK(input_ids.count(id) == 1);
  }
}

TEST_CASE("filter_to_pool") {
  std::vector<AttackRecord> records;
  for (int i = 1; i <= 5; ++i)
    records.push_back(
        mailguard::testing::make_attack("a-" + std::to_string(i), 1, "body " + std::to_string(i)));

  SUBCASE("empty selection yields empty pool") {
    CHECK(filter_to_pool(records, {}).empty());
  }
  SUBCASE("selects exactly the named records in input order") {
    const auto pool = filter_to_pool(records, {"a-4", "a-2"});
    REQUIRE(pool.size() == 2);
    CHECK(pool[0].id == "a-2");
    CHECK(pool[1].id == "a-4");
  }
  SUBCASE("unknown id is an error") {
    CHECK_THROWS_WITH_AS(filter_to_pool(records, {"a-9"}), doctest::Contains("a-9"),
                         CorpusError);
  }
  SUBCASE("length equals selection size when all ids are present") {
    std::mt19937 rng(5);
    for (int iteration = 0; iteration < 50; ++iteration) {
      std::set<std::string> ids;
      for (const auto& rec : records) {
        if (bounded_uniform(rng, 2) == 0) ids.insert(rec.id);
      }
      CHECK(filter_to_pool(records, ids).size() == ids.size());
    }
  }
}

TEST_CASE("corpus_stats") {
  SUBCASE("empty corpus") {
    const auto stats = corpus_stats({});
    CHECK(stats.total == 0);
    CHECK(stats.per_scenario.empty());
    CHECK(stats.duplicate_groups == 0);
  }
  SUBCASE("fixture counts") {
    std::vector<AttackRecord> records{
        mailguard::testing::make_attack("a-1", 1, "b1"),
        mailguard::testing::make_attack("a-2", 1, "b2"),
        mailguard::testing::make_attack("a-3", 4, "b3"),
    };
    const auto stats = corpus_stats(records);
    CHECK(stats.total == 3);
    CHECK(stats.per_scenario.at(1) == 2);
    CHECK(stats.per_scenario.at(4) == 1);
    CHECK(stats.per_scenario.count(2) == 0);
  }
  SUBCASE("duplicate groups counted by normalized body") {
    std::vector<AttackRecord> records{
        mailguard::testing::make_attack("a-1", 1, "x  y"),
        mailguard::testing::make_attack("a-2", 2, "x y"),
        mailguard::testing::make_attack("a-3", 3, "unique"),
    };
    CHECK(corpus_stats(records).duplicate_groups == 1);
  }
  SUBCASE("per-scenario counts partition the total") {
    std::mt19937 rng(77);
    for (int iteration = 0; iteration < 100; ++iteration) {
      const auto records = random_corpus(rng);
      const auto stats = corpus_stats(records);
      std::size_t sum = 0;
      for (const auto& [scenario, count] : stats.per_scenario) sum += count;
      CHECK(sum == stats.total);
      CHECK(stats.total == records.size());
    }
  }
}

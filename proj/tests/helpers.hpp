#pragma once

#include "mailguard/agent.hpp"
#include "mailguard/corpus.hpp"
#include "mailguard/environment.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace mailguard::testing {

class TempDir {
public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("mailguard-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write_file(const std::string& name, const std::string& content) const {
    const auto file_path = path_ / name;
    std::filesystem::create_directories(file_path.parent_path());
    std::ofstream out(file_path, std::ios::trunc);
    out << content;
    return file_path;
  }

private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

inline AttackRecord make_attack(std::string id, int scenario, std::string body,
                                std::string subject = "Quick request",
                                std::string sender = "outside@vendor.example") {
  AttackRecord rec;
  rec.id = std::move(id);
  rec.scenario = scenario;
  rec.subject = std::move(subject);
  rec.body = std::move(body);
  rec.sender = std::move(sender);
  return rec;
}

inline Email make_email(std::string sender, std::string subject, std::string body) {
  Email email;
  email.sender = std::move(sender);
  email.recipient = "user@corp.example";
  email.subject = std::move(subject);
  email.body = std::move(body);
  return email;
}

inline std::vector<Email> small_pool(std::size_t n) {
  std::vector<Email> pool;
  for (std::size_t i = 0; i < n; ++i) {
    pool.push_back(make_email("colleague" + std::to_string(i) + "@corp.example",
                              "Note " + std::to_string(i),
                              "Routine update number " + std::to_string(i) +
                                  " about ongoing work."));
  }
  return pool;
}

// Cubic brute-force longest-common-substring, the independent check for the
// DP implementation.
inline std::size_t lcs_bruteforce(const std::string& a, const std::string& b) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t len = 0;
      while (i + len < a.size() && j + len < b.size() && a[i + len] == b[j + len]) ++len;
      if (len > best) best = len;
    }
  }
  return best;
}

// Backend that replays a fixed sequence of turns.
class SequenceBackend final : public ModelBackend {
public:
  explicit SequenceBackend(std::vector<ModelTurn> turns) : turns_(std::move(turns)) {}

  ModelTurn next_turn(const BackendRequest&) override {
    if (index_ >= turns_.size()) {
      ModelTurn done;
      done.final_text = "done";
      return done;
    }
    return turns_[index_++];
  }

private:
  std::vector<ModelTurn> turns_;
  std::size_t index_ = 0;
};

inline ModelTurn tool_turn(std::string tool, std::map<std::string, std::string> args = {}) {
  ModelTurn turn;
  turn.tool_calls.push_back({std::move(tool), std::move(args), ""});
  return turn;
}

inline ModelTurn final_turn(std::string text) {
  ModelTurn turn;
  turn.final_text = std::move(text);
  return turn;
}

} // namespace mailguard::testing

#include "mailguard/data_paths.hpp"

#include <cstdlib>

#ifndef MAILGUARD_DEFAULT_DATA_DIR
#define MAILGUARD_DEFAULT_DATA_DIR "data"
#endif

namespace mailguard {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("MAILGUARD_DATA_DIR"); env && *env) {
    return std::filesystem::path(env);
  }
  return std::filesystem::path(MAILGUARD_DEFAULT_DATA_DIR);
}

std::filesystem::path default_patterns_path() {
  return default_data_dir() / "default_patterns.txt";
}

std::filesystem::path default_benign_pool_path() {
  return default_data_dir() / "benign_pool.jsonl";
}

} // namespace mailguard

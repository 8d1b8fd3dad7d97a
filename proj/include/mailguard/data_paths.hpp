#pragma once

#include <filesystem>

namespace mailguard {

// Resolution order: MAILGUARD_DATA_DIR environment variable, then the
// compiled-in repository data directory.
std::filesystem::path default_data_dir();

std::filesystem::path default_patterns_path();
std::filesystem::path default_benign_pool_path();

} // namespace mailguard

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pasaug {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataError = 2;

// Default output directory when --out-dir is not given.
inline constexpr const char* kOutDirEnv = "PASAUG_OUT_DIR";

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(const std::string& bytes);

// Entry point for the `pasaug` tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace pasaug

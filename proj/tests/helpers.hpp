#pragma once
// Shared test utilities: temp directories, file helpers and running the
// CLI binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace testutil {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir; removed by the caller (or
// left for inspection on failure).
inline fs::path make_temp_dir(const std::string& prefix) {
  static std::mt19937_64 rng(std::random_device{}());
  for (int attempt = 0; attempt < 100; ++attempt) {
    fs::path dir = fs::temp_directory_path() /
                   (prefix + "_" + std::to_string(rng()));
    std::error_code ec;
    if (fs::create_directory(dir, ec)) return dir;
  }
  throw std::runtime_error("could not create temp dir");
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

// Runs a shell command, capturing combined output.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  const fs::path capture = make_temp_dir("cedu_cmd") / "out.txt";
  const std::string full = command + " > " + capture.string() + " 2>&1";
  const int status = std::system(full.c_str());
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  std::ifstream in(capture);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  std::error_code ec;
  fs::remove_all(capture.parent_path(), ec);
  return result;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace testutil

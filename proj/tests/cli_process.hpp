#pragma once

// Runs the sdqz binary through the shell and captures its output.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace sdqz::testing {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("sdqz-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunResult run_cli(const std::string& args, const TempDir& dir, const std::string& env = "") {
  std::string out = dir / "stdout.txt", err = dir / "stderr.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(SDQZ_CLI_PATH) + "' " + args + " >'" +
                    out + "' 2>'" + err + "'";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Value of `key=` in a space-separated key=value line.
inline std::string field(const std::string& line, const std::string& key) {
  std::string pat = key + "=";
  std::size_t pos = 0;
  while ((pos = line.find(pat, pos)) != std::string::npos) {
    if (pos == 0 || line[pos - 1] == ' ') {
      std::size_t end = line.find_first_of(" \n", pos);
      return line.substr(pos + pat.size(), end == std::string::npos ? std::string::npos : end - pos - pat.size());
    }
    pos += pat.size();
  }
  return {};
}

}  // namespace sdqz::testing

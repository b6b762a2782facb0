#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "zeroline/synthgen.hpp"

namespace zltest {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("zeroline_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Default 800 px template, rendered once per process.
inline const zeroline::TargetTemplate& default_template() {
  static const zeroline::TargetTemplate t = zeroline::render_template();
  return t;
}

inline std::vector<std::uint8_t> slurp(const std::filesystem::path& p) { return zeroline::read_file_bytes(p); }

}  // namespace zltest

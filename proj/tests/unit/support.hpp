#ifndef HINV_TEST_SUPPORT_HPP
#define HINV_TEST_SUPPORT_HPP

#include <array>
#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "hinv/geometry.hpp"

namespace hinv::test {

inline std::shared_ptr<const Grid> line(double lo, double hi, int nodes) {
  return std::make_shared<const Grid>(Box::interval(lo, hi), std::array<int, 2>{nodes, 1});
}

inline std::shared_ptr<const Grid> square(double lo, double hi, int nodes) {
  return std::make_shared<const Grid>(Box::rectangle(lo, hi, lo, hi), std::array<int, 2>{nodes, nodes});
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hinv-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
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

}  // namespace hinv::test

#endif

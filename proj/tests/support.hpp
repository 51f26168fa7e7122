#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "rdsv/rttm.hpp"

namespace rdsv::test {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rdsv_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Random non-overlapping timeline on a 1 ms grid; gaps allowed.
inline Annotation random_timeline(std::mt19937_64& gen, const std::string& file_id, int max_segments, double max_end,
                                  int n_labels) {
  std::uniform_int_distribution<int> count(1, max_segments);
  std::uniform_int_distribution<int> label(0, n_labels - 1);
  const int n = count(gen);
  const long long total_ms = static_cast<long long>(max_end * 1000.0);
  const long long slot = total_ms / n;
  Annotation a{file_id, {}};
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<long long> start(i * slot, i * slot + slot / 2);
    const long long s = start(gen);
    std::uniform_int_distribution<long long> len(1, (i + 1) * slot - s);
    const long long l = len(gen);
    a.add(s / 1000.0, l / 1000.0, "S" + std::to_string(label(gen)));
  }
  a.sort();
  return a;
}

}  // namespace rdsv::test

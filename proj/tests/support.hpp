#pragma once

#include <unistd.h>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "brd/corpus.hpp"
#include "brd/random.hpp"

namespace brd::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("brd_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
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

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << s;
}

/// Corpus with the given per-type counts and unique placeholder texts.
inline std::vector<LabeledRecord> synthetic_records(const std::array<std::size_t, 4>& counts, std::uint64_t seed) {
  std::vector<LabeledRecord> out;
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t i = 0; i < counts[t]; ++i) {
      out.push_back(make_record(0, "row " + std::to_string(t) + " " + std::to_string(i), kAllRacismTypes[t]));
    }
  }
  shuffle(out, rng);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = i;
  return out;
}

inline std::filesystem::path data_dir() { return BRD_DATA_DIR; }

}  // namespace brd::test

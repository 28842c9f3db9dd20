#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brd {

enum class RacismType : std::uint8_t { Representational, Ideological, Discursive, Normal };

/// Class 0 = non-racism, class 1 = racism.
enum class BinaryLabel : std::uint8_t { NonRacism = 0, Racism = 1 };

inline constexpr std::array<RacismType, 4> kAllRacismTypes = {
    RacismType::Representational, RacismType::Ideological, RacismType::Discursive,
    RacismType::Normal};

constexpr BinaryLabel to_binary_label(RacismType t) noexcept {
  return t == RacismType::Normal ? BinaryLabel::NonRacism : BinaryLabel::Racism;
}

constexpr int class_index(BinaryLabel l) noexcept { return static_cast<int>(l); }

/// Case-insensitive; throws Error(Schema) for anything but the four names.
RacismType parse_racism_type(std::string_view s);
std::optional<RacismType> try_parse_racism_type(std::string_view s) noexcept;
std::string_view to_string(RacismType t) noexcept;
std::string_view to_string(BinaryLabel l) noexcept;

struct LabeledRecord {
  std::size_t id = 0;
  std::string text;
  RacismType racism_type = RacismType::Normal;
  BinaryLabel binary_label = BinaryLabel::NonRacism;
};

/// Builds a record with the binary label derived from `t`.
LabeledRecord make_record(std::size_t id, std::string text, RacismType t);

struct LoadedDataset {
  std::vector<LabeledRecord> records;
  std::size_t duplicate_texts = 0;  // rows whose text exactly repeats an earlier row
};

/// Reads a comma-separated UTF-8 file with header `text,label`. Quoted fields may
/// contain commas, newlines and doubled quotes. An optional leading `id` column
/// (as written by the preprocess stage) is honoured when present.
LoadedDataset load_dataset(const std::filesystem::path& path);
LoadedDataset parse_dataset(std::string_view contents, const std::string& source = "<memory>");

/// Writes `id,text,label` rows with RFC-4180 quoting.
void write_dataset(const std::filesystem::path& path, const std::vector<LabeledRecord>& records);

struct ClassDistribution {
  std::array<std::size_t, 4> by_type{};    // indexed by RacismType
  std::array<std::size_t, 2> by_binary{};  // indexed by BinaryLabel
  std::size_t total = 0;

  std::size_t count(RacismType t) const { return by_type[static_cast<std::size_t>(t)]; }
  std::size_t count(BinaryLabel l) const { return by_binary[static_cast<std::size_t>(l)]; }
};

ClassDistribution class_distribution(const std::vector<LabeledRecord>& records);

struct DatasetSplit {
  std::vector<LabeledRecord> train;
  std::vector<LabeledRecord> test;
  std::uint64_t seed = 42;
  double ratio = 0.8;
  bool stratified = true;
};

/// round-half-up of ratio * n.
std::size_t train_count(std::size_t n, double ratio);

/// Deterministic shuffled split. With `stratify`, each binary class is shuffled and
/// split independently so its train share is within one record of `ratio`; the
/// overall train size is still exactly train_count(N, ratio).
DatasetSplit split_train_test(const std::vector<LabeledRecord>& records, double ratio = 0.8,
                              std::uint64_t seed = 42, bool stratify = true);

/// `id,partition` audit manifest.
void write_split_manifest(const std::filesystem::path& path, const DatasetSplit& split);

struct SplitManifest {
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
};
SplitManifest read_split_manifest(const std::filesystem::path& path);

}  // namespace brd

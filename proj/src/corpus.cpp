#include "brd/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "brd/error.hpp"
#include "brd/random.hpp"
#include "csv.hpp"

namespace brd {

namespace {

std::string lower_trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::optional<RacismType> try_parse_racism_type(std::string_view s) noexcept {
  const std::string v = lower_trim(s);
  if (v == "representational") return RacismType::Representational;
  if (v == "ideological") return RacismType::Ideological;
  if (v == "discursive") return RacismType::Discursive;
  if (v == "normal") return RacismType::Normal;
  return std::nullopt;
}

RacismType parse_racism_type(std::string_view s) {
  if (auto t = try_parse_racism_type(s)) return *t;
  throw Error(ErrorKind::Schema, "unknown racism type '" + std::string(s) + "'");
}

std::string_view to_string(RacismType t) noexcept {
  switch (t) {
    case RacismType::Representational: return "representational";
    case RacismType::Ideological: return "ideological";
    case RacismType::Discursive: return "discursive";
    case RacismType::Normal: return "normal";
  }
  return "normal";
}

std::string_view to_string(BinaryLabel l) noexcept {
  return l == BinaryLabel::Racism ? "racism" : "non-racism";
}

LabeledRecord make_record(std::size_t id, std::string text, RacismType t) {
  return LabeledRecord{id, std::move(text), t, to_binary_label(t)};
}

LoadedDataset parse_dataset(std::string_view contents, const std::string& source) {
  const auto rows = csv::parse(contents, source);
  if (rows.empty()) throw Error(ErrorKind::Schema, source + ": missing header `text,label`");

  std::vector<std::string> header;
  for (const auto& f : rows.front().fields) header.push_back(lower_trim(f));
  const bool with_id = header == std::vector<std::string>{"id", "text", "label"};
  if (!with_id && header != std::vector<std::string>{"text", "label"}) {
    throw Error(ErrorKind::Schema, source + ": expected header `text,label`");
  }
  const std::size_t width = header.size();
  const std::size_t text_col = with_id ? 1 : 0;

  LoadedDataset out;
  out.records.reserve(rows.size() - 1);
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = source + ":" + std::to_string(row.line) + ": ";
    if (row.fields.size() != width) {
      throw Error(ErrorKind::Schema, where + "expected " + std::to_string(width) + " fields, got " +
                                         std::to_string(row.fields.size()));
    }
    const std::string& text = row.fields[text_col];
    if (blank(text)) throw Error(ErrorKind::Schema, where + "empty text");
    const auto type = try_parse_racism_type(row.fields[width - 1]);
    if (!type) {
      throw Error(ErrorKind::Schema, where + "unknown label '" + row.fields[width - 1] + "'");
    }
    std::size_t id = out.records.size();
    if (with_id) {
      try {
        std::size_t used = 0;
        id = std::stoul(row.fields[0], &used);
        if (used != row.fields[0].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(ErrorKind::Schema, where + "bad id '" + row.fields[0] + "'");
      }
    }
    if (!seen.insert(text).second) ++out.duplicate_texts;
    out.records.push_back(make_record(id, text, *type));
  }
  return out;
}

LoadedDataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

void write_dataset(const std::filesystem::path& path, const std::vector<LabeledRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "id,text,label\n";
  for (const auto& r : records) {
    out << r.id << ',' << csv::quote(r.text) << ',' << to_string(r.racism_type) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

ClassDistribution class_distribution(const std::vector<LabeledRecord>& records) {
  ClassDistribution d;
  for (const auto& r : records) {
    ++d.by_type[static_cast<std::size_t>(r.racism_type)];
    ++d.by_binary[static_cast<std::size_t>(to_binary_label(r.racism_type))];
  }
  d.total = records.size();
  return d;
}

std::size_t train_count(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

DatasetSplit split_train_test(const std::vector<LabeledRecord>& records, double ratio,
                              std::uint64_t seed, bool stratify) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorKind::Input, "split ratio must lie strictly between 0 and 1");
  }
  if (records.size() < 2) throw Error(ErrorKind::Input, "need at least 2 records to split");

  std::mt19937_64 rng(seed);
  const std::size_t target = train_count(records.size(), ratio);
  std::vector<std::size_t> train_pos;
  std::vector<std::size_t> test_pos;

  if (!stratify) {
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    train_pos.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(target));
    test_pos.assign(order.begin() + static_cast<std::ptrdiff_t>(target), order.end());
  } else {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < records.size(); ++i) {
      by_class[class_index(records[i].binary_label)].push_back(i);
    }
    for (int c = 0; c < 2; ++c) {
      if (by_class[c].empty()) {
        throw Error(ErrorKind::Input, std::string("degenerate class: no '") +
                                          std::string(to_string(static_cast<BinaryLabel>(c))) +
                                          "' records to stratify");
      }
    }
    // Per-class quotas rounded half-up, then nudged so they sum to the global
    // target; each quota stays within one record of ratio * class size.
    std::array<double, 2> exact{};
    std::array<std::size_t, 2> quota{};
    for (int c = 0; c < 2; ++c) {
      exact[c] = ratio * static_cast<double>(by_class[c].size());
      quota[c] = train_count(by_class[c].size(), ratio);
    }
    while (quota[0] + quota[1] > target) {
      const int c = (quota[0] - exact[0]) >= (quota[1] - exact[1]) ? 0 : 1;
      --quota[c];
    }
    while (quota[0] + quota[1] < target) {
      const int c = (exact[0] - quota[0]) >= (exact[1] - quota[1]) ? 0 : 1;
      ++quota[c];
    }
    for (int c = 0; c < 2; ++c) {
      auto& idx = by_class[c];
      shuffle(idx, rng);
      train_pos.insert(train_pos.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
      test_pos.insert(test_pos.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]), idx.end());
    }
    // Interleave the classes again.
    shuffle(train_pos, rng);
    shuffle(test_pos, rng);
  }

  DatasetSplit split;
  split.seed = seed;
  split.ratio = ratio;
  split.stratified = stratify;
  split.train.reserve(train_pos.size());
  split.test.reserve(test_pos.size());
  for (auto i : train_pos) split.train.push_back(records[i]);
  for (auto i : test_pos) split.test.push_back(records[i]);
  return split;
}

void write_split_manifest(const std::filesystem::path& path, const DatasetSplit& split) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "id,partition\n";
  for (const auto& r : split.train) out << r.id << ",train\n";
  for (const auto& r : split.test) out << r.id << ",test\n";
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

SplitManifest read_split_manifest(const std::filesystem::path& path) {
  const auto rows = csv::parse(read_file(path), path.string());
  if (rows.empty() || rows[0].fields != std::vector<std::string>{"id", "partition"}) {
    throw Error(ErrorKind::Schema, path.string() + ": expected header `id,partition`");
  }
  SplitManifest m;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = path.string() + ":" + std::to_string(rows[r].line) + ": ";
    if (f.size() != 2) throw Error(ErrorKind::Schema, where + "expected 2 fields");
    std::size_t id = 0;
    try {
      id = std::stoul(f[0]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Schema, where + "bad id '" + f[0] + "'");
    }
    if (f[1] == "train") {
      m.train_ids.push_back(id);
    } else if (f[1] == "test") {
      m.test_ids.push_back(id);
    } else {
      throw Error(ErrorKind::Schema, where + "unknown partition '" + f[1] + "'");
    }
  }
  return m;
}

}  // namespace brd

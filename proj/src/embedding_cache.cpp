#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <algorithm>

#include "brd/embeddings.hpp"
#include "brd/error.hpp"

namespace brd {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

template <typename T>
void put_le(std::vector<char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

template <typename T>
T get_le(std::span<const char> bytes, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  if (pos + sizeof(U) > bytes.size()) {
    throw Error(ErrorKind::Format, "embedding cache is truncated at byte " + std::to_string(pos));
  }
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    bits |= static_cast<U>(static_cast<unsigned char>(bytes[pos + b])) << (8 * b);
  }
  pos += sizeof(U);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::vector<char> serialize_cache(const EmbeddingCache& cache) {
  if (cache.rows.empty()) throw Error(ErrorKind::Input, "refusing to write an empty embedding cache");
  const std::uint32_t dim = cache.spec.dimension;
  std::vector<char> out;
  out.reserve(12 + cache.rows.size() * (8 + 4 * static_cast<std::size_t>(dim)));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le(out, static_cast<std::uint32_t>(cache.rows.size()));
  put_le(out, dim);
  for (std::size_t i = 0; i < cache.rows.size(); ++i) {
    const auto& row = cache.rows[i];
    if (row.values.size() != dim) {
      throw Error(ErrorKind::Config, "cache row " + std::to_string(i) + " has " +
                                         std::to_string(row.values.size()) + " values, expected " +
                                         std::to_string(dim));
    }
    put_le(out, row.source_hash);
    for (float f : row.values) put_le(out, f);
  }
  return out;
}

void write_cache(const EmbeddingCache& cache, const std::filesystem::path& path) {
  const auto bytes = serialize_cache(cache);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

EmbeddingCache deserialize_cache(std::span<const char> bytes,
                                 std::optional<std::uint32_t> expected_dimension) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::Format, "not an embedding cache (bad magic)");
  }
  std::size_t pos = 4;
  const auto count = get_le<std::uint32_t>(bytes, pos);
  const auto dim = get_le<std::uint32_t>(bytes, pos);
  if (expected_dimension && dim != *expected_dimension) {
    throw Error(ErrorKind::Config, "embedding cache has dimension " + std::to_string(dim) +
                                       ", expected " + std::to_string(*expected_dimension));
  }
  const std::size_t need = 12 + static_cast<std::size_t>(count) * (8 + 4 * static_cast<std::size_t>(dim));
  if (bytes.size() < need) {
    throw Error(ErrorKind::Format, "embedding cache is truncated: " + std::to_string(bytes.size()) +
                                       " bytes, header promises " + std::to_string(need));
  }
  if (bytes.size() > need) throw Error(ErrorKind::Format, "embedding cache has trailing bytes");

  EmbeddingCache cache;
  cache.spec.dimension = dim;
  cache.spec.provider_name = "unknown";
  cache.rows.resize(count);
  for (auto& row : cache.rows) {
    row.source_hash = get_le<std::uint64_t>(bytes, pos);
    row.values.resize(dim);
    for (auto& f : row.values) f = get_le<float>(bytes, pos);
  }
  return cache;
}

EmbeddingCache read_cache(const std::filesystem::path& path,
                          std::optional<std::uint32_t> expected_dimension) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open embedding cache " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_cache(bytes, expected_dimension);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::size_t> stale_rows(const EmbeddingCache& cache, std::span<const std::string> texts) {
  std::vector<std::size_t> out;
  const std::size_t n = std::max(cache.rows.size(), texts.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= cache.rows.size() || i >= texts.size() || cache.rows[i].source_hash != fnv1a64(texts[i])) {
      out.push_back(i);
    }
  }
  return out;
}

void validate_cache(const EmbeddingCache& cache, std::span<const std::string> texts) {
  const auto stale = stale_rows(cache, texts);
  if (stale.empty()) return;
  std::string msg;
  if (cache.rows.size() != texts.size()) {
    msg = "embedding cache has " + std::to_string(cache.rows.size()) + " rows but the dataset has " +
          std::to_string(texts.size()) + "; first stale row " + std::to_string(stale.front());
  } else {
    msg = "embedding cache is stale: row " + std::to_string(stale.front()) +
          " no longer matches its text (" + std::to_string(stale.size()) + " stale row(s))";
  }
  throw Error(ErrorKind::Stale, msg);
}

}  // namespace brd

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brd/backend.hpp"

namespace brd {

/// FNV-1a 64-bit over the raw UTF-8 bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

struct EmbeddingSpec {
  std::string provider_name;
  std::uint32_t dimension = 0;
  std::string pooling = "mean";
};

struct EmbeddingVector {
  std::vector<float> values;
  std::uint64_t source_hash = 0;
};

/// Rows are aligned with dataset record positions.
struct EmbeddingCache {
  EmbeddingSpec spec;
  std::vector<EmbeddingVector> rows;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual const EmbeddingSpec& spec() const noexcept = 0;
  /// Embeds a chunk of non-empty texts; must return one vector per text, in order.
  virtual std::vector<EmbeddingVector> embed_chunk(std::span<const std::string> texts) const = 0;
  /// Whether embed_chunk may be called from several threads at once.
  virtual bool concurrent() const noexcept { return false; }
};

/// Bag-of-words hashing embedder: each whitespace token expands to a seeded
/// pseudo-random vector in [-1, 1)^dim; the output is the L2-normalised sum.
/// Empty text gives the zero vector.
EmbeddingVector stub_embed(std::string_view text, std::uint32_t dimension, std::uint64_t seed);

class StubProvider final : public EmbeddingProvider {
 public:
  StubProvider(std::uint32_t dimension, std::uint64_t seed);
  const EmbeddingSpec& spec() const noexcept override { return spec_; }
  std::vector<EmbeddingVector> embed_chunk(std::span<const std::string> texts) const override;
  bool concurrent() const noexcept override { return true; }

 private:
  EmbeddingSpec spec_;
  std::uint64_t seed_;
};

/// Talks to an out-of-process sentence encoder over HTTP.
///
/// Request:  POST <endpoint> with JSON {"model": <model id>, "texts": [...]}
/// Response: JSON {"dimension": n, "pooling": "mean", "embeddings": [[...], ...]}
///
/// The endpoint comes from BRD_EMBED_ENDPOINT (e.g. http://127.0.0.1:8765/embed);
/// BRD_EMBED_TOKEN, when set, is sent as a bearer token.
class HttpProvider final : public EmbeddingProvider {
 public:
  HttpProvider(std::string provider_name, std::string model_id, std::uint32_t dimension,
               std::string endpoint, std::string token = {});
  const EmbeddingSpec& spec() const noexcept override { return spec_; }
  const std::string& model_id() const noexcept { return model_id_; }
  std::vector<EmbeddingVector> embed_chunk(std::span<const std::string> texts) const override;

 private:
  EmbeddingSpec spec_;
  std::string model_id_;
  std::string endpoint_;
  std::string token_;
};

struct KnownEncoder {
  std::string_view name;
  std::string_view model_id;
  std::uint32_t dimension;
};

/// bangla-bert (768), bangla-bert-base (768), sahaj-bert (1024).
std::span<const KnownEncoder> known_encoders() noexcept;

/// `stub` requires `dimension`; the named encoders use their fixed size and
/// reject a conflicting `dimension`.
std::unique_ptr<EmbeddingProvider> make_provider(std::string_view name,
                                                 std::optional<std::uint32_t> dimension,
                                                 std::uint64_t seed);

/// Throws Error(Input) for empty text.
EmbeddingVector embed_text(std::string_view text, const EmbeddingProvider& provider);

/// Order-preserving; chunking never changes the values. Provider failures are
/// re-thrown as ProviderError carrying the index of the first text in the failing chunk.
std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         const EmbeddingProvider& provider,
                                         std::size_t batch_size = 32,
                                         Backend backend = default_backend());

void write_cache(const EmbeddingCache& cache, const std::filesystem::path& path);
std::vector<char> serialize_cache(const EmbeddingCache& cache);

/// Throws Format (magic), Format (truncated) or Config (dimension != expected).
EmbeddingCache read_cache(const std::filesystem::path& path,
                          std::optional<std::uint32_t> expected_dimension = std::nullopt);
EmbeddingCache deserialize_cache(std::span<const char> bytes,
                                 std::optional<std::uint32_t> expected_dimension = std::nullopt);

/// Positions whose stored hash differs from the hash of `texts[i]`, plus any
/// positions present on only one side.
std::vector<std::size_t> stale_rows(const EmbeddingCache& cache, std::span<const std::string> texts);

/// Throws Error(Stale) naming the first stale row.
void validate_cache(const EmbeddingCache& cache, std::span<const std::string> texts);

}  // namespace brd

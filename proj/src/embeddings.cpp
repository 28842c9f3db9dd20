#include "brd/embeddings.hpp"

#include <cmath>
#include <cstdlib>

#include "brd/error.hpp"
#include "brd/kernels.hpp"
#include "brd/random.hpp"

namespace brd {

namespace {

constexpr KnownEncoder kEncoders[] = {
    {"bangla-bert", "csebuetnlp/banglabert", 768},
    {"bangla-bert-base", "sagorsarker/bangla-bert-base", 768},
    {"sahaj-bert", "neuropark/sahajBERT", 1024},
};

bool is_ascii_space(char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

}  // namespace

EmbeddingVector stub_embed(std::string_view text, std::uint32_t dimension, std::uint64_t seed) {
  if (dimension == 0) throw Error(ErrorKind::Input, "stub dimension must be >= 1");
  std::vector<double> acc(dimension, 0.0);
  std::uint64_t seed_state = seed;
  const std::uint64_t seed_mix = splitmix64(seed_state);

  bool any = false;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_ascii_space(text[i])) ++i;
    if (i == start) break;
    any = true;
    std::uint64_t state = fnv1a64(text.substr(start, i - start)) ^ seed_mix;
    for (auto& a : acc) a += 2.0 * unit_double(splitmix64(state)) - 1.0;
  }

  EmbeddingVector v;
  v.source_hash = fnv1a64(text);
  v.values.assign(dimension, 0.0f);
  if (!any) return v;
  double norm = 0;
  for (double a : acc) norm += a * a;
  norm = std::sqrt(norm);
  if (norm == 0) return v;
  for (std::size_t d = 0; d < acc.size(); ++d) v.values[d] = static_cast<float>(acc[d] / norm);
  return v;
}

StubProvider::StubProvider(std::uint32_t dimension, std::uint64_t seed)
    : spec_{"stub", dimension, "sum-l2"}, seed_(seed) {
  if (dimension == 0) throw Error(ErrorKind::Config, "stub provider needs a dimension >= 1");
}

std::vector<EmbeddingVector> StubProvider::embed_chunk(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(stub_embed(t, spec_.dimension, seed_));
  return out;
}

std::span<const KnownEncoder> known_encoders() noexcept { return kEncoders; }

std::unique_ptr<EmbeddingProvider> make_provider(std::string_view name,
                                                 std::optional<std::uint32_t> dimension,
                                                 std::uint64_t seed) {
  if (name == "stub") {
    if (!dimension) throw Error(ErrorKind::Config, "--dim is required for the stub provider");
    return std::make_unique<StubProvider>(*dimension, seed);
  }
  for (const auto& enc : kEncoders) {
    if (enc.name != name) continue;
    if (dimension && *dimension != enc.dimension) {
      throw Error(ErrorKind::Config, std::string(name) + " produces " +
                                         std::to_string(enc.dimension) + "-dim vectors, not " +
                                         std::to_string(*dimension));
    }
    return std::make_unique<HttpProvider>(std::string(enc.name), std::string(enc.model_id),
                                          enc.dimension, env_or_empty("BRD_EMBED_ENDPOINT"),
                                          env_or_empty("BRD_EMBED_TOKEN"));
  }
  throw Error(ErrorKind::Config, "unknown provider '" + std::string(name) +
                                     "' (expected bangla-bert, bangla-bert-base, sahaj-bert or stub)");
}

EmbeddingVector embed_text(std::string_view text, const EmbeddingProvider& provider) {
  if (text.empty()) throw Error(ErrorKind::Input, "cannot embed empty text");
  const std::string owned(text);
  auto rows = provider.embed_chunk(std::span<const std::string>(&owned, 1));
  if (rows.size() != 1 || rows[0].values.size() != provider.spec().dimension) {
    throw ProviderError(provider.spec().provider_name + " returned a malformed embedding", 0, false);
  }
  return std::move(rows[0]);
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         const EmbeddingProvider& provider, std::size_t batch_size,
                                         Backend backend) {
  if (batch_size == 0) throw Error(ErrorKind::Input, "batch_size must be >= 1");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw Error(ErrorKind::Input, "cannot embed empty text at index " + std::to_string(i));
    }
  }
  return backend == Backend::OpenMP ? kernels::omp::embed(texts, provider, batch_size)
                                    : kernels::serial::embed(texts, provider, batch_size);
}

}  // namespace brd

#pragma once

#include <span>
#include <string>
#include <vector>

#include "brd/embeddings.hpp"

namespace brd::kernels::detail {

/// Embeds texts[start, start + n); provider errors are re-thrown with the
/// absolute index of the failing input.
std::vector<EmbeddingVector> embed_range(std::span<const std::string> texts,
                                         const EmbeddingProvider& provider, std::size_t start,
                                         std::size_t n);

}  // namespace brd::kernels::detail

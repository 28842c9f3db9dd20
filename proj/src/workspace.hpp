#pragma once

#include <array>
#include <vector>

#include "brd/models.hpp"
#include "layers.hpp"

namespace brd {

/// Per-thread scratch for one forward/backward pass.
class Workspace {
 public:
  struct Branch {
    std::vector<double> conv_out, pooled, dpooled, dconv;
    std::vector<int> argmax;
    detail::RecurrentTrace lstm;
  };

  std::array<std::vector<double>, 3> input;
  detail::RecurrentTrace fwd, bwd;
  std::array<Branch, 3> branch;
  std::vector<double> feat, dfeat;
  detail::RecurrentScratch scratch;
  int channels_used = 1;
};

}  // namespace brd

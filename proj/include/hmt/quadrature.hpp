#pragma once

#include <vector>

namespace hmt {

struct GaussRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule with n points mapped to [0, 1]; cached, n in [1, 64].
const GaussRule& gauss_legendre(int n);

}  // namespace hmt

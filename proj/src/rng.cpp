#include "pohmm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pohmm {

int Rng::categorical_logits(std::span<const double> logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double x : logits) total += std::exp(x - hi);
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < logits.size(); ++i) {
    acc += std::exp(logits[i] - hi);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(logits.size()) - 1;
}

} // namespace pohmm

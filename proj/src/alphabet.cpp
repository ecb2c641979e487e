#include "pohmm/alphabet.hpp"

#include <string>
#include <utility>

#include "pohmm/errors.hpp"

namespace pohmm {

AlphabetSpec::AlphabetSpec(std::vector<int> cardinalities)
    : cards_(std::move(cardinalities)) {
  if (cards_.empty())
    throw InvalidInputError("alphabet needs at least one dimension");
  offsets_.reserve(cards_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t d = 0; d < cards_.size(); ++d) {
    if (cards_[d] < 2)
      throw InvalidInputError("dimension " + std::to_string(d) +
                              " has cardinality " + std::to_string(cards_[d]) +
                              "; need >= 2");
    offsets_.push_back(offsets_.back() + cards_[d]);
  }
}

} // namespace pohmm

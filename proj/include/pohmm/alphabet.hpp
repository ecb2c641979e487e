#ifndef POHMM_ALPHABET_HPP
#define POHMM_ALPHABET_HPP

#include <vector>

namespace pohmm {

/// Shape of the discrete observation space: D dimensions, dimension d
/// taking symbols in [0, V_d).  Models and datasets are composable only
/// when their alphabets compare equal.
class AlphabetSpec {
public:
  /// Throws InvalidInputError unless D >= 1 and every cardinality >= 2.
  explicit AlphabetSpec(std::vector<int> cardinalities);

  int num_dims() const { return static_cast<int>(cards_.size()); }
  int card(int d) const { return cards_[static_cast<std::size_t>(d)]; }
  const std::vector<int>& cardinalities() const { return cards_; }

  /// Sum of cardinalities: the width of one state's emission table.
  int total_cardinality() const { return offsets_.back(); }
  /// Offset of dimension d inside a flattened emission row.
  int emit_offset(int d) const { return offsets_[static_cast<std::size_t>(d)]; }

  bool operator==(const AlphabetSpec& other) const {
    return cards_ == other.cards_;
  }

  static AlphabetSpec binary(int num_dims) {
    return AlphabetSpec(std::vector<int>(static_cast<std::size_t>(num_dims), 2));
  }

private:
  std::vector<int> cards_;
  std::vector<int> offsets_; // size D+1, prefix sums of cards_
};

} // namespace pohmm

#endif

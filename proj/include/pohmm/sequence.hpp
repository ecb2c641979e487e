#ifndef POHMM_SEQUENCE_HPP
#define POHMM_SEQUENCE_HPP

#include <span>
#include <vector>

#include "pohmm/alphabet.hpp"

namespace pohmm {

/// One discrete multivariate sequence: T frames of D symbols, stored
/// row-major (frame-major).
class Sequence {
public:
  Sequence() = default;
  Sequence(int num_dims, int length)
      : num_dims_(num_dims),
        symbols_(static_cast<std::size_t>(num_dims) * static_cast<std::size_t>(length), 0) {}

  int num_dims() const { return num_dims_; }
  int length() const {
    return num_dims_ == 0 ? 0 : static_cast<int>(symbols_.size()) / num_dims_;
  }

  int operator()(int t, int d) const {
    return symbols_[static_cast<std::size_t>(t) * num_dims_ + d];
  }
  int& operator()(int t, int d) {
    return symbols_[static_cast<std::size_t>(t) * num_dims_ + d];
  }

  std::span<const int> frame(int t) const {
    return {symbols_.data() + static_cast<std::size_t>(t) * num_dims_,
            static_cast<std::size_t>(num_dims_)};
  }

  bool operator==(const Sequence&) const = default;

private:
  int num_dims_ = 0;
  std::vector<int> symbols_;
};

/// A collection of sequences over one shared alphabet.
struct SequenceDataset {
  AlphabetSpec alphabet;
  std::vector<Sequence> sequences;

  int num_sequences() const { return static_cast<int>(sequences.size()); }
};

/// Throws InvalidInputError if the sequence is empty, has the wrong
/// dimension count, or contains a symbol outside the alphabet.
void check_sequence(const AlphabetSpec& alphabet, const Sequence& seq);

/// check_sequence over every member.
void check_dataset(const SequenceDataset& data);

} // namespace pohmm

#endif

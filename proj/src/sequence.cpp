#include "pohmm/sequence.hpp"

#include <string>

#include "pohmm/errors.hpp"

namespace pohmm {

void check_sequence(const AlphabetSpec& alphabet, const Sequence& seq) {
  if (seq.length() < 1)
    throw InvalidInputError("sequence must have length >= 1");
  if (seq.num_dims() != alphabet.num_dims())
    throw InvalidInputError("sequence has " + std::to_string(seq.num_dims()) +
                            " dimensions; alphabet declares " +
                            std::to_string(alphabet.num_dims()));
  for (int t = 0; t < seq.length(); ++t) {
    for (int d = 0; d < seq.num_dims(); ++d) {
      const int v = seq(t, d);
      if (v < 0 || v >= alphabet.card(d))
        throw InvalidInputError("symbol " + std::to_string(v) + " at (t=" +
                                std::to_string(t) + ", d=" + std::to_string(d) +
                                ") out of range for cardinality " +
                                std::to_string(alphabet.card(d)));
    }
  }
}

void check_dataset(const SequenceDataset& data) {
  for (const Sequence& seq : data.sequences) check_sequence(data.alphabet, seq);
}

} // namespace pohmm

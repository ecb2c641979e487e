#ifndef POHMM_ORACLE_HPP
#define POHMM_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "pohmm/product.hpp"

namespace pohmm {

/// Largest observation-space enumeration attempted by default.  The CLI
/// honours the POHMM_ENUM_LIMIT environment variable as an override.
inline constexpr std::int64_t kDefaultEnumerationLimit = std::int64_t{1} << 20;

/// Largest hidden-path enumeration (S^T) attempted.
inline constexpr std::int64_t kPathEnumerationLimit = 100000;

/// Number of sequences of the given length, prod_d V_d^T.  Throws
/// CapacityError before any enumeration-sized allocation when the count
/// exceeds `limit`.
std::int64_t sequence_space_size(const AlphabetSpec& alphabet, int length,
                                 std::int64_t limit);

/// Lexicographic indexing of the observation space: frame 0 is most
/// significant, and dimension 0 within a frame is most significant.
Sequence sequence_from_index(const AlphabetSpec& alphabet, int length,
                             std::int64_t index);
std::int64_t sequence_to_index(const AlphabetSpec& alphabet, const Sequence& seq);

/// log Z(Theta, T): log of the sum over every sequence of length T of
/// exp(unnorm_log_likelihood), accumulated with log-sum-exp.
double exact_log_partition(const ProductHmm& p, int length,
                           std::int64_t limit = kDefaultEnumerationLimit);

/// unnorm_log_likelihood(p, seq) - exact_log_partition(p, len(seq)).
double exact_log_likelihood(const ProductHmm& p, const Sequence& seq,
                            std::int64_t limit = kDefaultEnumerationLimit);

/// Normalized log p(seq) for every sequence of the given length in
/// lexicographic order.
std::vector<double> exact_sequence_log_probs(const ProductHmm& p, int length,
                                             std::int64_t limit = kDefaultEnumerationLimit);

/// Reference log_forward by explicit summation over all S^T state paths,
/// with per-dimension emission log terms scaled by beta.  Independent of
/// the forward recursion it validates.
double exact_log_forward(const Hmm& h, const Sequence& seq, double beta = 1.0);

/// Posterior state marginals (T x S row-major) by path enumeration.
std::vector<double> exact_state_posterior(const Hmm& h, const Sequence& seq);

/// Central finite differences of an arbitrary scalar function of the
/// parameters, one logit at a time.
HmmGradient finite_diff_gradient(const std::function<double(const Hmm&)>& f,
                                 const Hmm& h, double step);

} // namespace pohmm

#endif

#ifndef POHMM_HMM_HPP
#define POHMM_HMM_HPP

#include <vector>

#include "pohmm/alphabet.hpp"
#include "pohmm/rng.hpp"
#include "pohmm/sequence.hpp"

namespace pohmm {

/// A discrete HMM with factorized categorical emissions, parameterized in
/// unconstrained logit space.  Probabilities are recovered by row-wise
/// softmax, so every inference result is invariant to shifting a logit row
/// by a constant.
///
/// Layout: init_logits[S]; trans_logits[S*S] row-major with row i holding
/// the logits of p(s_t = . | s_{t-1} = i); emit_logits[S * sum_d V_d] with
/// the row for state s starting at s * total_cardinality and dimension d at
/// alphabet.emit_offset(d) within the row.
struct Hmm {
  AlphabetSpec alphabet;
  int num_states = 0;
  std::vector<double> init_logits;
  std::vector<double> trans_logits;
  std::vector<double> emit_logits;

  double emit(int state, int dim, int symbol) const {
    return emit_logits[static_cast<std::size_t>(state) * alphabet.total_cardinality() +
                       alphabet.emit_offset(dim) + symbol];
  }
  double& emit(int state, int dim, int symbol) {
    return emit_logits[static_cast<std::size_t>(state) * alphabet.total_cardinality() +
                       alphabet.emit_offset(dim) + symbol];
  }

  /// All-zero logits: uniform initial, transition and emission distributions.
  static Hmm uniform(const AlphabetSpec& alphabet, int num_states);
};

/// Throws InvalidInputError on non-positive state count, wrong vector
/// shapes, or non-finite logits.
void check_hmm(const Hmm& h);

/// Normalized log-probability tables for one HMM, shared by every forward
/// pass so that repeated inference on a fixed model does not re-normalize.
struct HmmDist {
  int num_states = 0;
  int total_card = 0;
  std::vector<double> log_init;  // [S]
  std::vector<double> log_trans; // [S*S]
  std::vector<double> log_emit;  // [S * total_card]

  double log_emit_at(int state, int offset_plus_symbol) const {
    return log_emit[static_cast<std::size_t>(state) * total_card + offset_plus_symbol];
  }
};

HmmDist to_distribution(const Hmm& h);

/// Expected sufficient statistics of the state posterior for one sequence.
/// gamma is T x S row-major; xi_sums accumulates expected transition counts
/// over all steps; emit_counts has the same layout as Hmm::emit_logits.
struct PosteriorStats {
  std::vector<double> gamma;
  std::vector<double> xi_sums;
  std::vector<double> emit_counts;
  double log_likelihood = 0.0;
};

/// Gradient (or any parameter-shaped tangent) of an Hmm's logits.
struct HmmGradient {
  std::vector<double> init;
  std::vector<double> trans;
  std::vector<double> emit;

  static HmmGradient zeros_like(const Hmm& h);
  void add_scaled(const HmmGradient& g, double scale);
  void scale(double factor);
};

/// Log likelihood log p(seq) with every per-dimension emission log term
/// multiplied by beta inside the recursion.  beta = 1 is the plain HMM
/// likelihood; beta = 0 annihilates the emissions and returns ~0.
/// Computed fully in log space.
double log_forward(const Hmm& h, const Sequence& seq, double beta = 1.0);
double log_forward(const HmmDist& dist, const AlphabetSpec& alphabet,
                   const Sequence& seq, double beta);

/// One forward pass over a fixed (model, sequence, beta) triple.  The same
/// alpha matrix serves both the total log likelihood and exact posterior
/// path draws, so evaluation and resampling share the work.
class ForwardPass {
public:
  ForwardPass(const HmmDist& dist, const AlphabetSpec& alphabet,
              const Sequence& seq, double beta);

  double total_log_likelihood() const { return total_; }
  /// Backward sampling from the filtered distributions; exact FFBS draw.
  std::vector<int> sample_path(Rng& rng) const;

private:
  const HmmDist* dist_;
  int length_;
  std::vector<double> alpha_; // T x S, log space
  double total_;
};

/// Exact posterior expectations under the beta-scaled joint, via
/// forward-backward.  The log_likelihood field matches log_forward bit for
/// bit (same recursion).
PosteriorStats posterior_stats(const Hmm& h, const Sequence& seq, double beta = 1.0);
/// Hot-path overload over precompiled tables; the caller has validated.
PosteriorStats posterior_stats(const HmmDist& dist, const AlphabetSpec& alphabet,
                               const Sequence& seq, double beta);

/// One state path drawn exactly from p(s_{1:T} | y_{1:T}) by forward
/// filtering / backward sampling, with emissions scaled by beta.
std::vector<int> sample_posterior_path(const Hmm& h, const Sequence& seq,
                                       double beta, Rng& rng);

/// Generative draw: s_1 ~ init, s_t ~ trans, y_{t,d} ~ emission.
Sequence ancestral_sample(const Hmm& h, int length, Rng& rng);

struct EmOptions {
  int max_iters = 100;
  /// Stop when the per-sequence mean log likelihood improves by less.
  double tol = 1e-6;
  /// Pseudo-count added to every expected emission count in the M-step.
  double pseudocount = 0.0;
};

struct EmResult {
  Hmm model;
  /// Training log likelihood evaluated at the start of each iteration.
  std::vector<double> log_likelihood_trace;
};

/// Baum-Welch from the given starting point, statistics pooled across all
/// sequences.  The trace is non-decreasing up to rounding.  States whose
/// expected visit count vanishes get their rows reset to uniform.
EmResult em_fit(const Hmm& init, const SequenceDataset& data,
                const EmOptions& options = {});

/// Base-rate emissions plus i.i.d. U(-0.1, 0.1) emission noise, uniform
/// initial and transition rows.  The usual EM starting point.
Hmm random_init_hmm(const SequenceDataset& data, int num_states, Rng& rng);

/// Best of `restarts` em_fit runs from random_init_hmm starts, by final
/// training log likelihood.
EmResult em_fit_restarts(const SequenceDataset& data, int num_states,
                         int restarts, const EmOptions& options, Rng& rng);

/// Analytic gradient of log_forward(h, seq, 1) with respect to every logit.
/// For a softmax row with expected count vector c and row total n, the
/// gradient is c - n * softmax(row).
HmmGradient log_likelihood_gradient(const Hmm& h, const Sequence& seq);
/// Same gradient assembled from posterior statistics already in hand.
HmmGradient gradient_from_stats(const Hmm& h, const PosteriorStats& stats);

/// Single-state HMM whose emission for dimension d is the additively
/// smoothed empirical symbol distribution:
///   p(v | d) = (count_d(v) + smoothing) / (total_d + V_d * smoothing).
/// Being a normalized HMM its partition function is exactly 1.
Hmm base_rate_hmm(const SequenceDataset& data, double smoothing = 1.0);

} // namespace pohmm

#endif

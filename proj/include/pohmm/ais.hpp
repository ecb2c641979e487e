#ifndef POHMM_AIS_HPP
#define POHMM_AIS_HPP

#include <vector>

#include "pohmm/product.hpp"
#include "pohmm/sequence.hpp"

namespace pohmm {

/// Inverse-temperature grid 0 = beta_0 < ... < beta_N = 1.  N is the number
/// of annealing steps between the endpoint models.
class AnnealingSchedule {
public:
  /// Throws InvalidInputError unless strictly increasing with exact 0 and 1
  /// endpoints.
  explicit AnnealingSchedule(std::vector<double> betas);

  static AnnealingSchedule uniform(int num_steps);

  const std::vector<double>& betas() const { return betas_; }
  int num_steps() const { return static_cast<int>(betas_.size()) - 1; }

private:
  std::vector<double> betas_;
};

struct AisEstimate {
  std::vector<double> log_weights; // one per run
  double log_z = 0.0;
  /// Delta-method standard error of log_z: std(w) / (sqrt(P) * mean(w)),
  /// computed on max-shifted weights.  The estimator is unbiased for Z,
  /// not for log Z.
  double std_err = 0.0;
  int num_runs = 0;
  int schedule_len = 0;
};

/// Unnormalized log probability of the intermediate model: A-experts with
/// emissions raised to 1-beta plus B-experts raised to beta.  Initial and
/// transition terms are never scaled.  Experts whose power is exactly 0
/// contribute exactly 0, so the endpoints reduce bit for bit to
/// unnorm_log_likelihood of A (beta=0) and B (beta=1).
double intermediate_unnorm_logp(const ProductHmm& a, const ProductHmm& b,
                                double beta, const Sequence& seq);

/// One application of the transition operator that leaves the intermediate
/// model invariant: posterior path per A-expert at emission power 1-beta
/// and per B-expert at power beta, then every symbol resampled from the
/// power-weighted product of emission rows.
Sequence intermediate_gibbs_transition(const ProductHmm& a, const ProductHmm& b,
                                       double beta, const Sequence& seq, Rng& rng);

/// One annealed importance weight:
///   log w = sum_n [ logp*(beta_n, y^{n-1}) - logp*(beta_{n-1}, y^{n-1}) ]
/// with y^0 drawn from A and y^n from the transition operator at beta_n.
/// The evaluation at the new temperature and the path draws for the
/// transition share one forward pass per expert.  When A has a single
/// expert y^0 is an exact ancestral draw; otherwise A is sampled by Gibbs
/// with `init_burn_in` sweeps (dependent but valid under ergodicity).
double ais_single_run(const ProductHmm& a, const ProductHmm& b, int length,
                      const AnnealingSchedule& schedule, Rng& rng,
                      int init_burn_in = 100);

/// log Z of `b` at the given length: anneal from the base-rate single-state
/// HMM fit on `base_data` (whose partition function is exactly 1) over
/// `runs` independent AIS runs seeded by rng.split(run_index).
AisEstimate estimate_log_partition(const ProductHmm& b, int length, int runs,
                                   const AnnealingSchedule& schedule,
                                   const SequenceDataset& base_data,
                                   double smoothing, Rng& rng);

/// log(Z_b / Z_a) by the same run recipe over the general two-sided family.
AisEstimate estimate_log_ratio(const ProductHmm& a, const ProductHmm& b,
                               int length, int runs,
                               const AnnealingSchedule& schedule, Rng& rng,
                               int init_burn_in = 100);

} // namespace pohmm

#endif

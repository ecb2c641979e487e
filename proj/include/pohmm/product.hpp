#ifndef POHMM_PRODUCT_HPP
#define POHMM_PRODUCT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pohmm/hmm.hpp"

namespace pohmm {

/// A product of expert HMMs over one shared observation space.  The model
/// assigns probability proportional to the product of the experts'
/// sequence likelihoods; with a single expert it reduces to that HMM and
/// the partition function is 1.
struct ProductHmm {
  std::vector<Hmm> experts;

  int num_experts() const { return static_cast<int>(experts.size()); }
  const AlphabetSpec& alphabet() const { return experts.front().alphabet; }

  static ProductHmm single(Hmm h) { return ProductHmm{{std::move(h)}}; }
};

/// Throws InvalidInputError unless there is at least one expert and all
/// experts agree on the alphabet.
void check_product(const ProductHmm& p);

/// Number of Gibbs steps per reconstruction, either constant or a
/// stepwise-increasing schedule of (from_epoch, k) pairs.
class CdSchedule {
public:
  static CdSchedule constant(int k);
  /// Pairs must start at epoch 0, be strictly increasing in epoch, and
  /// have every k >= 1.
  explicit CdSchedule(std::vector<std::pair<int, int>> steps);

  int k_at(int epoch) const;
  const std::vector<std::pair<int, int>>& steps() const { return steps_; }

private:
  std::vector<std::pair<int, int>> steps_;
};

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 1000;
  CdSchedule cd_k = CdSchedule::constant(1);
  std::uint64_t seed = 0;
};

void check_train_config(const TrainConfig& cfg);

/// Parameter-shaped record over all experts; used for velocities and
/// accumulated update directions.
struct PohmmGradient {
  std::vector<HmmGradient> experts;

  static PohmmGradient zeros_like(const ProductHmm& p);
  void add_scaled(const PohmmGradient& g, double scale);
  void scale(double factor);
};

/// log p*(seq) = sum over experts of log_forward(expert, seq, 1).  This is
/// the model's log probability up to the (sequence-length-dependent) log
/// partition function.
double unnorm_log_likelihood(const ProductHmm& p, const Sequence& seq);

/// One step of alternating Gibbs: draw a posterior state path per expert
/// given seq, then per frame and dimension sample a fresh symbol from the
/// renormalized product of the experts' emission distributions at their
/// sampled states.
Sequence gibbs_sweep(const ProductHmm& p, const Sequence& seq, Rng& rng);

struct CdStepStats {
  /// Fraction of symbols the K-step reconstruction changed, averaged over
  /// the batch.
  double mean_recon_error = 0.0;
  double mean_unnorm_log_likelihood = 0.0;
};

/// One CD(K) update over a batch.  Per sequence: data gradient, K-sweep
/// reconstruction, gradient at the reconstruction; the update direction is
/// the batch mean of (data gradient - reconstruction gradient).  The
/// velocity is updated in place (momentum * velocity + direction) and the
/// returned model's logits move by learning_rate * velocity.
ProductHmm cd_step(const ProductHmm& p, std::span<const Sequence> batch, int k,
                   const TrainConfig& cfg, Rng& rng, PohmmGradient& velocity,
                   CdStepStats* stats = nullptr);

struct TrainTrace {
  std::vector<double> recon_error;
  std::vector<double> unnorm_log_likelihood;
};

struct TrainResult {
  ProductHmm model;
  TrainTrace trace;
};

/// CD(K) training: one full-batch cd_step per epoch over all sequences.
/// Fully determined by cfg.seed.
TrainResult train_cd(const ProductHmm& p, const SequenceDataset& data,
                     const TrainConfig& cfg);

/// Approximate model draw via prolonged Gibbs: the sequence starts from
/// i.i.d. draws of init_model (typically the training base rates; uniform
/// when null) and burn_in sweeps are applied.  Exact only for a single
/// expert, where one sweep already leaves the model distribution invariant.
Sequence model_sample(const ProductHmm& p, int length, int burn_in, Rng& rng,
                      const Hmm* init_model = nullptr);

/// One expert per product: base-rate emissions plus i.i.d. U(-0.1, 0.1)
/// noise, uniform initial and transition rows.
ProductHmm random_init_pohmm(const SequenceDataset& data, int num_experts,
                             int num_states, Rng& rng);

} // namespace pohmm

#endif

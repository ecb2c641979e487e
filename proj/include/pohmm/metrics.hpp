#ifndef POHMM_METRICS_HPP
#define POHMM_METRICS_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pohmm/rng.hpp"
#include "pohmm/sequence.hpp"

namespace pohmm {

/// Leave-k-out cross-validation plan: consecutive non-overlapping test
/// blocks of k sequences each.
struct CvFold {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

struct CvPlan {
  std::vector<CvFold> folds;
  int k = 0;
};

/// floor(num_sequences / k) folds with test blocks [0,k), [k,2k), ...;
/// remainder sequences stay in every training set.  Throws when k exceeds
/// the dataset or a fold would have an empty training set.
CvPlan leave_k_out_folds(int num_sequences, int k);

/// Unnormalized log score of a sequence under some model.
using SequenceScorer = std::function<double(const Sequence&)>;
/// Draws one simulated sequence of the requested length.
using SequenceSimulator = std::function<Sequence(int length, Rng&)>;

struct MetricReport {
  std::string model_id;
  int fold = 0;
  double scaled_log_likelihood = 0.0;
  double imputation_accuracy = 0.0;
  double persistence_gap = 0.0;
  double correlation_gap = 0.0;
  std::optional<double> log_z;
  std::optional<double> log_z_std_err;
};

std::string metric_csv_header();
std::string metric_csv_row(const MetricReport& report);

/// Held-out log likelihood per scalar observation event:
///   sum_seq (score(seq) - log_z(T_seq)) / sum_seq (T_seq * D).
/// Throws if some present length is missing from the log_z map.
double scaled_log_likelihood(const SequenceScorer& scorer,
                             const SequenceDataset& heldout,
                             const std::map<int, double>& log_z_by_length);

struct ImputationOptions {
  /// 0 enumerates every (sequence, frame, dimension) position; otherwise
  /// that many positions are sampled without replacement.
  std::int64_t max_positions = 0;
};

/// Fraction of binary positions where the unnormalized score of the true
/// fill-in strictly exceeds the flipped one; exact ties count 0.5.  Only
/// the score difference matters, so the partition function cancels.
double imputation_accuracy(const SequenceScorer& scorer,
                           const SequenceDataset& heldout, Rng& rng,
                           const ImputationOptions& options = {});

/// Whether sequence statistics pool frames across sequences before the
/// statistic, or compute per sequence and average.
enum class PoolingMode { pooled, per_sequence };

/// Per-dimension P(y_t = 1 | y_{t-1} = 1), counted within sequences only.
/// Dimensions with no wet antecedent report nullopt.
std::vector<std::optional<double>> persistence(const SequenceDataset& data,
                                               PoolingMode mode = PoolingMode::pooled);

/// Pearson correlation per dimension pair (i < j, row-major order).
/// Pairs touching a zero-variance dimension report nullopt.
std::vector<std::optional<double>> pair_correlations(const SequenceDataset& data,
                                                     PoolingMode mode = PoolingMode::pooled);

/// |mean persistence over dims, simulated vs held out|.  Dimensions
/// undefined on either side are excluded from both means.
double persistence_gap(const SequenceDataset& heldout,
                       const SequenceSimulator& simulate, int num_sims,
                       int sim_length, Rng& rng,
                       PoolingMode mode = PoolingMode::pooled);

/// |mean pair correlation, simulated vs held out|, with the same exclusion
/// rule.
double correlation_gap(const SequenceDataset& heldout,
                       const SequenceSimulator& simulate, int num_sims,
                       int sim_length, Rng& rng,
                       PoolingMode mode = PoolingMode::pooled);

} // namespace pohmm

#endif

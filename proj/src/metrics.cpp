#include "pohmm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pohmm/errors.hpp"
#include "pohmm/format.hpp"

namespace pohmm {

namespace {

void require_binary(const SequenceDataset& data, const char* what) {
  for (int d = 0; d < data.alphabet.num_dims(); ++d)
    if (data.alphabet.card(d) != 2)
      throw InvalidInputError(std::string(what) + " requires binary dimensions");
}

// Mean over entries defined in both vectors; nullopt when none are.
std::optional<double> paired_mean(const std::vector<std::optional<double>>& a,
                                  const std::vector<std::optional<double>>& b,
                                  bool first) {
  double total = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].has_value() || !b[i].has_value()) continue;
    total += first ? *a[i] : *b[i];
    ++count;
  }
  if (count == 0) return std::nullopt;
  return total / count;
}

struct PersistenceCounts {
  double followers = 0.0;
  double antecedents = 0.0;
};

std::optional<double> pearson_from_moments(double n, double sx, double sy,
                                           double sxx, double syy, double sxy) {
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  if (vx <= 0.0 || vy <= 0.0) return std::nullopt;
  return (sxy - sx * sy / n) / std::sqrt(vx * vy);
}

} // namespace

CvPlan leave_k_out_folds(int num_sequences, int k) {
  if (k < 1) throw InvalidInputError("fold size k must be >= 1");
  if (num_sequences < k)
    throw InvalidInputError("k exceeds the number of sequences");
  if (num_sequences == k)
    throw InvalidInputError("leave-k-out with k == n leaves an empty training set");

  CvPlan plan;
  plan.k = k;
  const int num_folds = num_sequences / k;
  for (int f = 0; f < num_folds; ++f) {
    CvFold fold;
    for (int i = 0; i < num_sequences; ++i) {
      if (i >= f * k && i < (f + 1) * k)
        fold.test_indices.push_back(i);
      else
        fold.train_indices.push_back(i);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

std::string metric_csv_header() {
  return "model_id,fold,scaled_ll,imputation_acc,persistence_gap,"
         "correlation_gap,log_z,log_z_stderr";
}

std::string metric_csv_row(const MetricReport& r) {
  std::string row = r.model_id + "," + std::to_string(r.fold) + "," +
                    format_double(r.scaled_log_likelihood) + "," +
                    format_double(r.imputation_accuracy) + "," +
                    format_double(r.persistence_gap) + "," +
                    format_double(r.correlation_gap) + ",";
  if (r.log_z.has_value()) row += format_double(*r.log_z);
  row += ",";
  if (r.log_z_std_err.has_value()) row += format_double(*r.log_z_std_err);
  return row;
}

double scaled_log_likelihood(const SequenceScorer& scorer,
                             const SequenceDataset& heldout,
                             const std::map<int, double>& log_z_by_length) {
  if (heldout.sequences.empty())
    throw InvalidInputError("scaled_log_likelihood needs a nonempty dataset");
  double total = 0.0;
  double events = 0.0;
  for (const Sequence& seq : heldout.sequences) {
    const auto it = log_z_by_length.find(seq.length());
    if (it == log_z_by_length.end())
      throw InvalidInputError("no log Z supplied for sequence length " +
                              std::to_string(seq.length()));
    total += scorer(seq) - it->second;
    events += static_cast<double>(seq.length()) * heldout.alphabet.num_dims();
  }
  return total / events;
}

double imputation_accuracy(const SequenceScorer& scorer,
                           const SequenceDataset& heldout, Rng& rng,
                           const ImputationOptions& options) {
  require_binary(heldout, "imputation_accuracy");
  if (heldout.sequences.empty())
    throw InvalidInputError("imputation_accuracy needs a nonempty dataset");

  // Positions indexed (sequence, frame, dimension), flattened.
  const int D = heldout.alphabet.num_dims();
  std::vector<std::int64_t> offsets{0};
  for (const Sequence& seq : heldout.sequences)
    offsets.push_back(offsets.back() + static_cast<std::int64_t>(seq.length()) * D);
  const std::int64_t total_positions = offsets.back();

  std::vector<std::int64_t> positions;
  if (options.max_positions > 0 && options.max_positions < total_positions) {
    // Partial Fisher-Yates over the position indices.
    std::vector<std::int64_t> all(static_cast<std::size_t>(total_positions));
    std::iota(all.begin(), all.end(), std::int64_t{0});
    for (std::int64_t i = 0; i < options.max_positions; ++i) {
      const std::int64_t j =
          i + rng.uniform_int(static_cast<int>(total_positions - i));
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    positions.assign(all.begin(), all.begin() + options.max_positions);
    std::sort(positions.begin(), positions.end());
  } else {
    positions.resize(static_cast<std::size_t>(total_positions));
    std::iota(positions.begin(), positions.end(), std::int64_t{0});
  }

  double score = 0.0;
  std::size_t seq_idx = 0;
  double true_score = 0.0;
  bool have_true_score = false;
  Sequence work;
  for (const std::int64_t pos : positions) {
    while (pos >= offsets[seq_idx + 1]) {
      ++seq_idx;
      have_true_score = false;
    }
    const Sequence& seq = heldout.sequences[seq_idx];
    if (!have_true_score) {
      true_score = scorer(seq);
      have_true_score = true;
      work = seq;
    }
    const std::int64_t local = pos - offsets[seq_idx];
    const int t = static_cast<int>(local / D);
    const int d = static_cast<int>(local % D);
    const int truth = seq(t, d);
    work(t, d) = 1 - truth;
    const double false_score = scorer(work);
    work(t, d) = truth;
    if (true_score > false_score)
      score += 1.0;
    else if (true_score == false_score)
      score += 0.5;
  }
  return score / static_cast<double>(positions.size());
}

std::vector<std::optional<double>> persistence(const SequenceDataset& data,
                                               PoolingMode mode) {
  require_binary(data, "persistence");
  const int D = data.alphabet.num_dims();
  std::vector<std::optional<double>> result(static_cast<std::size_t>(D));

  if (mode == PoolingMode::pooled) {
    std::vector<PersistenceCounts> counts(static_cast<std::size_t>(D));
    for (const Sequence& seq : data.sequences)
      for (int t = 1; t < seq.length(); ++t)
        for (int d = 0; d < D; ++d)
          if (seq(t - 1, d) == 1) {
            counts[d].antecedents += 1.0;
            if (seq(t, d) == 1) counts[d].followers += 1.0;
          }
    for (int d = 0; d < D; ++d)
      if (counts[d].antecedents > 0.0)
        result[d] = counts[d].followers / counts[d].antecedents;
  } else {
    for (int d = 0; d < D; ++d) {
      double total = 0.0;
      int defined = 0;
      for (const Sequence& seq : data.sequences) {
        PersistenceCounts c;
        for (int t = 1; t < seq.length(); ++t)
          if (seq(t - 1, d) == 1) {
            c.antecedents += 1.0;
            if (seq(t, d) == 1) c.followers += 1.0;
          }
        if (c.antecedents > 0.0) {
          total += c.followers / c.antecedents;
          ++defined;
        }
      }
      if (defined > 0) result[d] = total / defined;
    }
  }
  return result;
}

std::vector<std::optional<double>> pair_correlations(const SequenceDataset& data,
                                                     PoolingMode mode) {
  require_binary(data, "pair_correlations");
  const int D = data.alphabet.num_dims();
  if (D < 2) throw InvalidInputError("pair correlations need at least 2 dimensions");

  std::vector<std::optional<double>> result;
  for (int i = 0; i < D; ++i) {
    for (int j = i + 1; j < D; ++j) {
      if (mode == PoolingMode::pooled) {
        double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (const Sequence& seq : data.sequences)
          for (int t = 0; t < seq.length(); ++t) {
            const double x = seq(t, i);
            const double y = seq(t, j);
            n += 1.0;
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
          }
        result.push_back(n < 2.0 ? std::nullopt
                                 : pearson_from_moments(n, sx, sy, sxx, syy, sxy));
      } else {
        double total = 0.0;
        int defined = 0;
        for (const Sequence& seq : data.sequences) {
          double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
          for (int t = 0; t < seq.length(); ++t) {
            const double x = seq(t, i);
            const double y = seq(t, j);
            n += 1.0;
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
          }
          const auto r = n < 2.0 ? std::nullopt
                                 : pearson_from_moments(n, sx, sy, sxx, syy, sxy);
          if (r.has_value()) {
            total += *r;
            ++defined;
          }
        }
        result.push_back(defined > 0 ? std::optional<double>(total / defined)
                                     : std::nullopt);
      }
    }
  }
  return result;
}

namespace {

SequenceDataset simulate_dataset(const AlphabetSpec& alphabet,
                                 const SequenceSimulator& simulate, int num_sims,
                                 int sim_length, Rng& rng) {
  if (num_sims < 1) throw InvalidInputError("need at least one simulation");
  SequenceDataset sims{alphabet, {}};
  sims.sequences.reserve(static_cast<std::size_t>(num_sims));
  for (int i = 0; i < num_sims; ++i)
    sims.sequences.push_back(simulate(sim_length, rng));
  return sims;
}

} // namespace

double persistence_gap(const SequenceDataset& heldout,
                       const SequenceSimulator& simulate, int num_sims,
                       int sim_length, Rng& rng, PoolingMode mode) {
  const SequenceDataset sims =
      simulate_dataset(heldout.alphabet, simulate, num_sims, sim_length, rng);
  const auto held = persistence(heldout, mode);
  const auto simulated = persistence(sims, mode);
  const auto held_mean = paired_mean(held, simulated, true);
  const auto sim_mean = paired_mean(held, simulated, false);
  if (!held_mean.has_value() || !sim_mean.has_value())
    throw InvalidInputError("persistence undefined on every dimension");
  return std::abs(*held_mean - *sim_mean);
}

double correlation_gap(const SequenceDataset& heldout,
                       const SequenceSimulator& simulate, int num_sims,
                       int sim_length, Rng& rng, PoolingMode mode) {
  const SequenceDataset sims =
      simulate_dataset(heldout.alphabet, simulate, num_sims, sim_length, rng);
  const auto held = pair_correlations(heldout, mode);
  const auto simulated = pair_correlations(sims, mode);
  const auto held_mean = paired_mean(held, simulated, true);
  const auto sim_mean = paired_mean(held, simulated, false);
  if (!held_mean.has_value() || !sim_mean.has_value())
    throw InvalidInputError("correlation undefined on every dimension pair");
  return std::abs(*held_mean - *sim_mean);
}

} // namespace pohmm

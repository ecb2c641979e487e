#include "pohmm/ais.hpp"

#include <cmath>
#include <string>

#include "pohmm/errors.hpp"
#include "pohmm/numeric.hpp"

namespace pohmm {

AnnealingSchedule::AnnealingSchedule(std::vector<double> betas)
    : betas_(std::move(betas)) {
  if (betas_.size() < 2)
    throw InvalidInputError("annealing schedule needs at least two temperatures");
  if (betas_.front() != 0.0 || betas_.back() != 1.0)
    throw InvalidInputError("annealing schedule endpoints must be exactly 0 and 1");
  for (std::size_t i = 1; i < betas_.size(); ++i)
    if (!(betas_[i] > betas_[i - 1]))
      throw InvalidInputError("annealing schedule must be strictly increasing");
}

AnnealingSchedule AnnealingSchedule::uniform(int num_steps) {
  if (num_steps < 1) throw InvalidInputError("schedule needs at least one step");
  std::vector<double> betas(static_cast<std::size_t>(num_steps) + 1);
  for (int n = 0; n <= num_steps; ++n)
    betas[static_cast<std::size_t>(n)] = static_cast<double>(n) / num_steps;
  betas.front() = 0.0;
  betas.back() = 1.0;
  return AnnealingSchedule(std::move(betas));
}

namespace {

void check_pair(const ProductHmm& a, const ProductHmm& b) {
  check_product(a);
  check_product(b);
  if (!(a.alphabet() == b.alphabet()))
    throw InvalidInputError("the two products disagree on the alphabet");
}

// The two product models merged into one weighted expert list; powers are
// (1 - beta) for the A group and beta for the B group.
struct AnnealedPair {
  std::vector<const Hmm*> experts;
  std::vector<HmmDist> dists;
  std::vector<bool> in_b;

  AnnealedPair(const ProductHmm& a, const ProductHmm& b) {
    for (const Hmm& e : a.experts) {
      experts.push_back(&e);
      dists.push_back(to_distribution(e));
      in_b.push_back(false);
    }
    for (const Hmm& e : b.experts) {
      experts.push_back(&e);
      dists.push_back(to_distribution(e));
      in_b.push_back(true);
    }
  }

  double power(std::size_t m, double beta) const {
    return in_b[m] ? beta : 1.0 - beta;
  }

  double logp(double beta, const AlphabetSpec& alphabet, const Sequence& seq) const {
    double total = 0.0;
    for (std::size_t m = 0; m < experts.size(); ++m) {
      const double pow = power(m, beta);
      if (pow == 0.0) continue;
      total += log_forward(dists[m], alphabet, seq, pow);
    }
    return total;
  }

  // Evaluate logp at beta and apply the transition operator in one pass:
  // the forward matrix built for each expert's value term is reused for its
  // posterior path draw.
  double logp_and_transition(double beta, const AlphabetSpec& alphabet,
                             Sequence& seq, Rng& rng) const {
    const std::size_t M = experts.size();
    double total = 0.0;
    std::vector<std::vector<int>> paths(M);
    for (std::size_t m = 0; m < M; ++m) {
      const double pow = power(m, beta);
      if (pow == 0.0) continue;
      const ForwardPass pass(dists[m], alphabet, seq, pow);
      total += pass.total_log_likelihood();
      paths[m] = pass.sample_path(rng);
    }

    Sequence out(alphabet.num_dims(), seq.length());
    std::vector<double> logits;
    for (int t = 0; t < seq.length(); ++t) {
      for (int d = 0; d < alphabet.num_dims(); ++d) {
        const int card = alphabet.card(d);
        logits.assign(static_cast<std::size_t>(card), 0.0);
        for (std::size_t m = 0; m < M; ++m) {
          const double pow = power(m, beta);
          if (pow == 0.0) continue;
          const int s = paths[m][static_cast<std::size_t>(t)];
          for (int v = 0; v < card; ++v)
            logits[v] += pow * experts[m]->emit(s, d, v);
        }
        out(t, d) = rng.categorical_logits(logits);
      }
    }
    seq = std::move(out);
    return total;
  }
};

double run_weight(const AnnealedPair& pair, const AlphabetSpec& alphabet,
                  const AnnealingSchedule& schedule, Sequence y, Rng& rng) {
  const std::vector<double>& betas = schedule.betas();
  const int N = schedule.num_steps();
  double log_w = 0.0;
  for (int n = 1; n <= N; ++n) {
    log_w -= pair.logp(betas[static_cast<std::size_t>(n - 1)], alphabet, y);
    if (n < N) {
      log_w += pair.logp_and_transition(betas[static_cast<std::size_t>(n)],
                                        alphabet, y, rng);
    } else {
      log_w += pair.logp(betas[static_cast<std::size_t>(n)], alphabet, y);
    }
  }
  return log_w;
}

Sequence initial_sample(const ProductHmm& a, int length, int init_burn_in, Rng& rng) {
  if (a.num_experts() == 1) return ancestral_sample(a.experts.front(), length, rng);
  return model_sample(a, length, init_burn_in, rng);
}

AisEstimate estimate_from_runs(std::vector<double> log_weights, int schedule_len) {
  AisEstimate est;
  est.num_runs = static_cast<int>(log_weights.size());
  est.schedule_len = schedule_len;
  est.log_z = log_sum_exp(log_weights) - std::log(static_cast<double>(est.num_runs));

  // Delta method on max-shifted weights; the shift cancels in the ratio.
  const double hi = *std::max_element(log_weights.begin(), log_weights.end());
  double mean = 0.0;
  for (double lw : log_weights) mean += std::exp(lw - hi);
  mean /= static_cast<double>(est.num_runs);
  double var = 0.0;
  for (double lw : log_weights) {
    const double d = std::exp(lw - hi) - mean;
    var += d * d;
  }
  var /= static_cast<double>(est.num_runs - 1);
  est.std_err = std::sqrt(var / est.num_runs) / mean;
  est.log_weights = std::move(log_weights);
  return est;
}

} // namespace

double intermediate_unnorm_logp(const ProductHmm& a, const ProductHmm& b,
                                double beta, const Sequence& seq) {
  check_pair(a, b);
  check_sequence(a.alphabet(), seq);
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InvalidInputError("beta must lie in [0, 1]");
  return AnnealedPair(a, b).logp(beta, a.alphabet(), seq);
}

Sequence intermediate_gibbs_transition(const ProductHmm& a, const ProductHmm& b,
                                       double beta, const Sequence& seq, Rng& rng) {
  check_pair(a, b);
  check_sequence(a.alphabet(), seq);
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InvalidInputError("beta must lie in [0, 1]");
  Sequence y = seq;
  AnnealedPair(a, b).logp_and_transition(beta, a.alphabet(), y, rng);
  return y;
}

double ais_single_run(const ProductHmm& a, const ProductHmm& b, int length,
                      const AnnealingSchedule& schedule, Rng& rng,
                      int init_burn_in) {
  check_pair(a, b);
  if (length < 1) throw InvalidInputError("sequence length must be >= 1");
  const AnnealedPair pair(a, b);
  Sequence y = initial_sample(a, length, init_burn_in, rng);
  return run_weight(pair, a.alphabet(), schedule, std::move(y), rng);
}

AisEstimate estimate_log_partition(const ProductHmm& b, int length, int runs,
                                   const AnnealingSchedule& schedule,
                                   const SequenceDataset& base_data,
                                   double smoothing, Rng& rng) {
  if (runs < 2) throw InvalidInputError("need at least 2 AIS runs for a variance");
  const ProductHmm a = ProductHmm::single(base_rate_hmm(base_data, smoothing));
  check_pair(a, b);
  if (length < 1) throw InvalidInputError("sequence length must be >= 1");

  const AnnealedPair pair(a, b);
  std::vector<double> log_weights(static_cast<std::size_t>(runs));
  for (int run = 0; run < runs; ++run) {
    Rng stream = rng.split(static_cast<std::uint64_t>(run));
    Sequence y = ancestral_sample(a.experts.front(), length, stream);
    log_weights[static_cast<std::size_t>(run)] =
        run_weight(pair, a.alphabet(), schedule, std::move(y), stream);
  }
  // Z_A = 1 for the base-rate HMM, so no offset is added.
  return estimate_from_runs(std::move(log_weights), schedule.num_steps());
}

AisEstimate estimate_log_ratio(const ProductHmm& a, const ProductHmm& b,
                               int length, int runs,
                               const AnnealingSchedule& schedule, Rng& rng,
                               int init_burn_in) {
  if (runs < 2) throw InvalidInputError("need at least 2 AIS runs for a variance");
  check_pair(a, b);
  if (length < 1) throw InvalidInputError("sequence length must be >= 1");

  const AnnealedPair pair(a, b);
  std::vector<double> log_weights(static_cast<std::size_t>(runs));
  for (int run = 0; run < runs; ++run) {
    Rng stream = rng.split(static_cast<std::uint64_t>(run));
    Sequence y = initial_sample(a, length, init_burn_in, stream);
    log_weights[static_cast<std::size_t>(run)] =
        run_weight(pair, a.alphabet(), schedule, std::move(y), stream);
  }
  return estimate_from_runs(std::move(log_weights), schedule.num_steps());
}

} // namespace pohmm

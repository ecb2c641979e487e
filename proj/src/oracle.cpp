#include "pohmm/oracle.hpp"

#include <cmath>
#include <string>

#include "pohmm/errors.hpp"
#include "pohmm/numeric.hpp"

namespace pohmm {

namespace {

// Advance a mixed-radix counter over symbols; returns false on wrap-around.
bool next_sequence(const AlphabetSpec& alphabet, Sequence& seq) {
  for (int t = seq.length() - 1; t >= 0; --t) {
    for (int d = alphabet.num_dims() - 1; d >= 0; --d) {
      if (++seq(t, d) < alphabet.card(d)) return true;
      seq(t, d) = 0;
    }
  }
  return false;
}

std::int64_t path_space_size(int num_states, int length) {
  std::int64_t count = 1;
  for (int t = 0; t < length; ++t) {
    if (count > kPathEnumerationLimit / num_states)
      throw CapacityError("state path enumeration would exceed " +
                          std::to_string(kPathEnumerationLimit) + " paths");
    count *= num_states;
  }
  return count;
}

// Joint log p(path, seq) for every path, in lexicographic path order.
std::vector<double> path_log_joints(const Hmm& h, const Sequence& seq, double beta) {
  const HmmDist dist = to_distribution(h);
  const int S = h.num_states;
  const int T = seq.length();
  const int D = h.alphabet.num_dims();
  const std::int64_t n_paths = path_space_size(S, T);

  std::vector<double> emit_ll(static_cast<std::size_t>(T) * S);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < S; ++s) {
      double acc = 0.0;
      for (int d = 0; d < D; ++d)
        acc += dist.log_emit_at(s, h.alphabet.emit_offset(d) + seq(t, d));
      emit_ll[static_cast<std::size_t>(t) * S + s] = beta * acc;
    }

  std::vector<double> joints(static_cast<std::size_t>(n_paths));
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  for (std::int64_t idx = 0;; ++idx) {
    double lp = dist.log_init[path[0]] + emit_ll[path[0]];
    for (int t = 1; t < T; ++t)
      lp += dist.log_trans[static_cast<std::size_t>(path[t - 1]) * S + path[t]] +
            emit_ll[static_cast<std::size_t>(t) * S + path[t]];
    joints[static_cast<std::size_t>(idx)] = lp;

    int t = T - 1;
    while (t >= 0 && ++path[t] == S) path[t--] = 0;
    if (t < 0) break;
  }
  return joints;
}

} // namespace

std::int64_t sequence_space_size(const AlphabetSpec& alphabet, int length,
                                 std::int64_t limit) {
  if (length < 1) throw InvalidInputError("sequence length must be >= 1");
  std::int64_t count = 1;
  for (int t = 0; t < length; ++t) {
    for (int d = 0; d < alphabet.num_dims(); ++d) {
      if (count > limit / alphabet.card(d))
        throw CapacityError("enumeration of " + std::to_string(alphabet.num_dims()) +
                            "-dim sequences of length " + std::to_string(length) +
                            " exceeds the limit of " + std::to_string(limit));
      count *= alphabet.card(d);
    }
  }
  return count;
}

Sequence sequence_from_index(const AlphabetSpec& alphabet, int length,
                             std::int64_t index) {
  Sequence seq(alphabet.num_dims(), length);
  for (int t = length - 1; t >= 0; --t)
    for (int d = alphabet.num_dims() - 1; d >= 0; --d) {
      seq(t, d) = static_cast<int>(index % alphabet.card(d));
      index /= alphabet.card(d);
    }
  return seq;
}

std::int64_t sequence_to_index(const AlphabetSpec& alphabet, const Sequence& seq) {
  std::int64_t index = 0;
  for (int t = 0; t < seq.length(); ++t)
    for (int d = 0; d < alphabet.num_dims(); ++d)
      index = index * alphabet.card(d) + seq(t, d);
  return index;
}

namespace {

std::vector<double> all_unnorm_scores(const ProductHmm& p, int length,
                                      std::int64_t limit) {
  check_product(p);
  const AlphabetSpec& alphabet = p.alphabet();
  const std::int64_t count = sequence_space_size(alphabet, length, limit);

  std::vector<HmmDist> dists;
  dists.reserve(p.experts.size());
  for (const Hmm& e : p.experts) dists.push_back(to_distribution(e));

  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(count));
  Sequence seq(alphabet.num_dims(), length);
  do {
    double total = 0.0;
    for (std::size_t m = 0; m < dists.size(); ++m)
      total += log_forward(dists[m], alphabet, seq, 1.0);
    scores.push_back(total);
  } while (next_sequence(alphabet, seq));
  return scores;
}

} // namespace

double exact_log_partition(const ProductHmm& p, int length, std::int64_t limit) {
  return log_sum_exp(all_unnorm_scores(p, length, limit));
}

double exact_log_likelihood(const ProductHmm& p, const Sequence& seq,
                            std::int64_t limit) {
  check_product(p);
  check_sequence(p.alphabet(), seq);
  return unnorm_log_likelihood(p, seq) - exact_log_partition(p, seq.length(), limit);
}

std::vector<double> exact_sequence_log_probs(const ProductHmm& p, int length,
                                             std::int64_t limit) {
  std::vector<double> scores = all_unnorm_scores(p, length, limit);
  const double log_z = log_sum_exp(scores);
  for (double& s : scores) s -= log_z;
  return scores;
}

double exact_log_forward(const Hmm& h, const Sequence& seq, double beta) {
  check_sequence(h.alphabet, seq);
  return log_sum_exp(path_log_joints(h, seq, beta));
}

std::vector<double> exact_state_posterior(const Hmm& h, const Sequence& seq) {
  check_sequence(h.alphabet, seq);
  const int S = h.num_states;
  const int T = seq.length();
  const std::vector<double> joints = path_log_joints(h, seq, 1.0);
  const double total = log_sum_exp(joints);

  std::vector<double> marginals(static_cast<std::size_t>(T) * S, 0.0);
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  for (std::size_t idx = 0;; ++idx) {
    const double w = std::exp(joints[idx] - total);
    for (int t = 0; t < T; ++t)
      marginals[static_cast<std::size_t>(t) * S + path[t]] += w;

    int t = T - 1;
    while (t >= 0 && ++path[t] == S) path[t--] = 0;
    if (t < 0) break;
  }
  return marginals;
}

HmmGradient finite_diff_gradient(const std::function<double(const Hmm&)>& f,
                                 const Hmm& h, double step) {
  if (!(step > 0.0)) throw InvalidInputError("finite difference step must be positive");
  HmmGradient grad = HmmGradient::zeros_like(h);
  Hmm probe = h;

  const auto central = [&](std::vector<double>& params, std::vector<double>& out) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + step;
      const double hi = f(probe);
      params[i] = saved - step;
      const double lo = f(probe);
      params[i] = saved;
      out[i] = (hi - lo) / (2.0 * step);
    }
  };
  central(probe.init_logits, grad.init);
  central(probe.trans_logits, grad.trans);
  central(probe.emit_logits, grad.emit);
  return grad;
}

} // namespace pohmm

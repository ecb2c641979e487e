#include "pohmm/hmm.hpp"

#include <cmath>
#include <string>

#include "pohmm/errors.hpp"
#include "pohmm/numeric.hpp"

namespace pohmm {

namespace {

// Probabilities below this are clamped before taking logs in M-steps, so
// logits stay finite even for symbols with zero expected count.
constexpr double kProbFloor = 1e-300;
// Row totals below this mark a state as unvisited; its row resets to uniform.
constexpr double kDegenerateTotal = 1e-12;

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InvalidInputError("beta must lie in [0, 1], got " + std::to_string(beta));
}

// Per-frame emission log likelihood for every state, already scaled by beta.
// Result is T x S row-major.
std::vector<double> scaled_emission_loglik(const HmmDist& dist,
                                           const AlphabetSpec& alphabet,
                                           const Sequence& seq, double beta) {
  const int T = seq.length();
  const int S = dist.num_states;
  const int D = alphabet.num_dims();
  std::vector<double> loglik(static_cast<std::size_t>(T) * S, 0.0);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < S; ++j) {
      double acc = 0.0;
      for (int d = 0; d < D; ++d)
        acc += dist.log_emit_at(j, alphabet.emit_offset(d) + seq(t, d));
      loglik[static_cast<std::size_t>(t) * S + j] = beta * acc;
    }
  }
  return loglik;
}

// Log-space forward recursion; emission contains the beta-scaled per-frame
// log likelihoods.  Returns the full T x S alpha matrix.
std::vector<double> forward_alpha(const HmmDist& dist,
                                  const std::vector<double>& emission, int T) {
  const int S = dist.num_states;
  std::vector<double> alpha(static_cast<std::size_t>(T) * S);
  std::vector<double> scratch(S);
  for (int j = 0; j < S; ++j) alpha[j] = dist.log_init[j] + emission[j];
  for (int t = 1; t < T; ++t) {
    const double* prev = alpha.data() + static_cast<std::size_t>(t - 1) * S;
    double* cur = alpha.data() + static_cast<std::size_t>(t) * S;
    for (int j = 0; j < S; ++j) {
      for (int i = 0; i < S; ++i)
        scratch[i] = prev[i] + dist.log_trans[static_cast<std::size_t>(i) * S + j];
      cur[j] = log_sum_exp(scratch) + emission[static_cast<std::size_t>(t) * S + j];
    }
  }
  return alpha;
}

std::vector<double> backward_beta(const HmmDist& dist,
                                  const std::vector<double>& emission, int T) {
  const int S = dist.num_states;
  std::vector<double> beta(static_cast<std::size_t>(T) * S, 0.0);
  std::vector<double> scratch(S);
  for (int t = T - 2; t >= 0; --t) {
    const double* next = beta.data() + static_cast<std::size_t>(t + 1) * S;
    double* cur = beta.data() + static_cast<std::size_t>(t) * S;
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j)
        scratch[j] = dist.log_trans[static_cast<std::size_t>(i) * S + j] +
                     emission[static_cast<std::size_t>(t + 1) * S + j] + next[j];
      cur[i] = log_sum_exp(scratch);
    }
  }
  return beta;
}

// log(p) of a count ratio, clamped so the logit stays finite.
double ratio_logit(double count, double total) {
  return std::log(std::max(count / total, kProbFloor));
}

} // namespace

Hmm Hmm::uniform(const AlphabetSpec& alphabet, int num_states) {
  Hmm h{alphabet, num_states,
        std::vector<double>(static_cast<std::size_t>(num_states), 0.0),
        std::vector<double>(static_cast<std::size_t>(num_states) * num_states, 0.0),
        std::vector<double>(static_cast<std::size_t>(num_states) * alphabet.total_cardinality(), 0.0)};
  return h;
}

void check_hmm(const Hmm& h) {
  if (h.num_states < 1) throw InvalidInputError("HMM needs at least one state");
  const std::size_t s = static_cast<std::size_t>(h.num_states);
  if (h.init_logits.size() != s || h.trans_logits.size() != s * s ||
      h.emit_logits.size() != s * static_cast<std::size_t>(h.alphabet.total_cardinality()))
    throw InvalidInputError("HMM parameter vectors have inconsistent shapes");
  for (const auto* vec : {&h.init_logits, &h.trans_logits, &h.emit_logits})
    for (double x : *vec)
      if (!std::isfinite(x)) throw InvalidInputError("HMM logits must be finite");
}

HmmDist to_distribution(const Hmm& h) {
  HmmDist dist;
  dist.num_states = h.num_states;
  dist.total_card = h.alphabet.total_cardinality();
  dist.log_init = h.init_logits;
  log_normalize(dist.log_init);
  dist.log_trans = h.trans_logits;
  dist.log_emit = h.emit_logits;
  const int S = h.num_states;
  for (int i = 0; i < S; ++i)
    log_normalize({dist.log_trans.data() + static_cast<std::size_t>(i) * S,
                   static_cast<std::size_t>(S)});
  for (int i = 0; i < S; ++i)
    for (int d = 0; d < h.alphabet.num_dims(); ++d)
      log_normalize({dist.log_emit.data() + static_cast<std::size_t>(i) * dist.total_card +
                         h.alphabet.emit_offset(d),
                     static_cast<std::size_t>(h.alphabet.card(d))});
  return dist;
}

HmmGradient HmmGradient::zeros_like(const Hmm& h) {
  return HmmGradient{
      std::vector<double>(h.init_logits.size(), 0.0),
      std::vector<double>(h.trans_logits.size(), 0.0),
      std::vector<double>(h.emit_logits.size(), 0.0)};
}

void HmmGradient::add_scaled(const HmmGradient& g, double s) {
  for (std::size_t i = 0; i < init.size(); ++i) init[i] += s * g.init[i];
  for (std::size_t i = 0; i < trans.size(); ++i) trans[i] += s * g.trans[i];
  for (std::size_t i = 0; i < emit.size(); ++i) emit[i] += s * g.emit[i];
}

void HmmGradient::scale(double factor) {
  for (double& x : init) x *= factor;
  for (double& x : trans) x *= factor;
  for (double& x : emit) x *= factor;
}

ForwardPass::ForwardPass(const HmmDist& dist, const AlphabetSpec& alphabet,
                         const Sequence& seq, double beta)
    : dist_(&dist), length_(seq.length()) {
  const auto emission = scaled_emission_loglik(dist, alphabet, seq, beta);
  alpha_ = forward_alpha(dist, emission, length_);
  total_ = log_sum_exp(
      {alpha_.data() + static_cast<std::size_t>(length_ - 1) * dist.num_states,
       static_cast<std::size_t>(dist.num_states)});
}

std::vector<int> ForwardPass::sample_path(Rng& rng) const {
  const int S = dist_->num_states;
  std::vector<int> path(static_cast<std::size_t>(length_));
  path[length_ - 1] = rng.categorical_logits(
      {alpha_.data() + static_cast<std::size_t>(length_ - 1) * S,
       static_cast<std::size_t>(S)});
  std::vector<double> logits(S);
  for (int t = length_ - 2; t >= 0; --t) {
    const int next = path[t + 1];
    for (int i = 0; i < S; ++i)
      logits[i] = alpha_[static_cast<std::size_t>(t) * S + i] +
                  dist_->log_trans[static_cast<std::size_t>(i) * S + next];
    path[t] = rng.categorical_logits(logits);
  }
  return path;
}

double log_forward(const HmmDist& dist, const AlphabetSpec& alphabet,
                   const Sequence& seq, double beta) {
  return ForwardPass(dist, alphabet, seq, beta).total_log_likelihood();
}

double log_forward(const Hmm& h, const Sequence& seq, double beta) {
  check_sequence(h.alphabet, seq);
  check_beta(beta);
  return log_forward(to_distribution(h), h.alphabet, seq, beta);
}

PosteriorStats posterior_stats(const Hmm& h, const Sequence& seq, double beta) {
  check_sequence(h.alphabet, seq);
  check_beta(beta);
  return posterior_stats(to_distribution(h), h.alphabet, seq, beta);
}

PosteriorStats posterior_stats(const HmmDist& dist, const AlphabetSpec& alphabet,
                               const Sequence& seq, double beta) {
  const int T = seq.length();
  const int S = dist.num_states;
  const int total_card = dist.total_card;

  const auto emission = scaled_emission_loglik(dist, alphabet, seq, beta);
  const auto alpha = forward_alpha(dist, emission, T);
  const auto bwd = backward_beta(dist, emission, T);
  const double ll = log_sum_exp({alpha.data() + static_cast<std::size_t>(T - 1) * S,
                                 static_cast<std::size_t>(S)});

  PosteriorStats stats;
  stats.log_likelihood = ll;
  stats.gamma.resize(static_cast<std::size_t>(T) * S);
  stats.xi_sums.assign(static_cast<std::size_t>(S) * S, 0.0);
  stats.emit_counts.assign(static_cast<std::size_t>(S) * total_card, 0.0);

  std::vector<double> row(S);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < S; ++j)
      row[j] = alpha[static_cast<std::size_t>(t) * S + j] +
               bwd[static_cast<std::size_t>(t) * S + j];
    const auto probs = softmax(row);
    for (int j = 0; j < S; ++j) {
      const double g = probs[j];
      stats.gamma[static_cast<std::size_t>(t) * S + j] = g;
      for (int d = 0; d < alphabet.num_dims(); ++d)
        stats.emit_counts[static_cast<std::size_t>(j) * total_card +
                          alphabet.emit_offset(d) + seq(t, d)] += g;
    }
  }
  for (int t = 0; t + 1 < T; ++t) {
    for (int i = 0; i < S; ++i) {
      const double a = alpha[static_cast<std::size_t>(t) * S + i];
      for (int j = 0; j < S; ++j) {
        const double term = a + dist.log_trans[static_cast<std::size_t>(i) * S + j] +
                            emission[static_cast<std::size_t>(t + 1) * S + j] +
                            bwd[static_cast<std::size_t>(t + 1) * S + j] - ll;
        stats.xi_sums[static_cast<std::size_t>(i) * S + j] += std::exp(term);
      }
    }
  }
  return stats;
}

std::vector<int> sample_posterior_path(const Hmm& h, const Sequence& seq,
                                       double beta, Rng& rng) {
  check_sequence(h.alphabet, seq);
  check_beta(beta);
  const HmmDist dist = to_distribution(h);
  return ForwardPass(dist, h.alphabet, seq, beta).sample_path(rng);
}

Sequence ancestral_sample(const Hmm& h, int length, Rng& rng) {
  if (length < 1) throw InvalidInputError("sample length must be >= 1");
  const int S = h.num_states;
  const int D = h.alphabet.num_dims();
  Sequence seq(D, length);
  int state = rng.categorical_logits(h.init_logits);
  for (int t = 0; t < length; ++t) {
    if (t > 0)
      state = rng.categorical_logits(
          {h.trans_logits.data() + static_cast<std::size_t>(state) * S,
           static_cast<std::size_t>(S)});
    for (int d = 0; d < D; ++d) {
      const double* row = h.emit_logits.data() +
                          static_cast<std::size_t>(state) * h.alphabet.total_cardinality() +
                          h.alphabet.emit_offset(d);
      seq(t, d) = rng.categorical_logits({row, static_cast<std::size_t>(h.alphabet.card(d))});
    }
  }
  return seq;
}

EmResult em_fit(const Hmm& init, const SequenceDataset& data, const EmOptions& options) {
  if (data.sequences.empty()) throw InvalidInputError("em_fit needs a nonempty dataset");
  if (!(init.alphabet == data.alphabet))
    throw InvalidInputError("model and dataset alphabets differ");
  if (options.max_iters < 1) throw InvalidInputError("max_iters must be >= 1");
  check_hmm(init);
  check_dataset(data);

  const int S = init.num_states;
  const int D = init.alphabet.num_dims();
  const int total_card = init.alphabet.total_cardinality();
  const double n_seqs = static_cast<double>(data.sequences.size());

  Hmm model = init;
  EmResult result{model, {}};
  for (int iter = 0; iter < options.max_iters; ++iter) {
    std::vector<double> init_counts(static_cast<std::size_t>(S), 0.0);
    std::vector<double> xi(static_cast<std::size_t>(S) * S, 0.0);
    std::vector<double> emit(static_cast<std::size_t>(S) * total_card, 0.0);
    double ll = 0.0;
    for (const Sequence& seq : data.sequences) {
      const PosteriorStats stats = posterior_stats(model, seq, 1.0);
      ll += stats.log_likelihood;
      for (int i = 0; i < S; ++i) init_counts[i] += stats.gamma[i];
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] += stats.xi_sums[i];
      for (std::size_t i = 0; i < emit.size(); ++i) emit[i] += stats.emit_counts[i];
    }
    result.log_likelihood_trace.push_back(ll);

    const std::size_t n_trace = result.log_likelihood_trace.size();
    if (n_trace >= 2) {
      const double gain = ll - result.log_likelihood_trace[n_trace - 2];
      if (gain / n_seqs < options.tol) break;
    }

    // M-step: every softmax row becomes the log of its normalized counts.
    for (int i = 0; i < S; ++i)
      model.init_logits[i] = ratio_logit(init_counts[i], n_seqs);
    for (int i = 0; i < S; ++i) {
      double row_total = 0.0;
      for (int j = 0; j < S; ++j) row_total += xi[static_cast<std::size_t>(i) * S + j];
      for (int j = 0; j < S; ++j)
        model.trans_logits[static_cast<std::size_t>(i) * S + j] =
            row_total < kDegenerateTotal
                ? 0.0
                : ratio_logit(xi[static_cast<std::size_t>(i) * S + j], row_total);
    }
    for (int i = 0; i < S; ++i) {
      for (int d = 0; d < D; ++d) {
        const int off = init.alphabet.emit_offset(d);
        const int card = init.alphabet.card(d);
        double row_total = 0.0;
        for (int v = 0; v < card; ++v)
          row_total += emit[static_cast<std::size_t>(i) * total_card + off + v];
        const double denom = row_total + card * options.pseudocount;
        for (int v = 0; v < card; ++v) {
          double& logit = model.emit_logits[static_cast<std::size_t>(i) * total_card + off + v];
          logit = denom < kDegenerateTotal
                      ? 0.0
                      : ratio_logit(emit[static_cast<std::size_t>(i) * total_card + off + v] +
                                        options.pseudocount,
                                    denom);
        }
      }
    }
  }
  result.model = model;
  return result;
}

Hmm random_init_hmm(const SequenceDataset& data, int num_states, Rng& rng) {
  const Hmm base = base_rate_hmm(data, 1.0);
  Hmm h = Hmm::uniform(data.alphabet, num_states);
  const int total_card = data.alphabet.total_cardinality();
  for (int s = 0; s < num_states; ++s)
    for (int i = 0; i < total_card; ++i)
      h.emit_logits[static_cast<std::size_t>(s) * total_card + i] =
          base.emit_logits[i] + rng.uniform(-0.1, 0.1);
  return h;
}

EmResult em_fit_restarts(const SequenceDataset& data, int num_states,
                         int restarts, const EmOptions& options, Rng& rng) {
  if (restarts < 1) throw InvalidInputError("restarts must be >= 1");
  EmResult best;
  for (int r = 0; r < restarts; ++r) {
    Rng stream = rng.split(static_cast<std::uint64_t>(r));
    EmResult fit = em_fit(random_init_hmm(data, num_states, stream), data, options);
    if (r == 0 || fit.log_likelihood_trace.back() > best.log_likelihood_trace.back())
      best = std::move(fit);
  }
  return best;
}

HmmGradient log_likelihood_gradient(const Hmm& h, const Sequence& seq) {
  return gradient_from_stats(h, posterior_stats(h, seq, 1.0));
}

HmmGradient gradient_from_stats(const Hmm& h, const PosteriorStats& stats) {
  const int S = h.num_states;
  const int total_card = h.alphabet.total_cardinality();
  HmmGradient grad = HmmGradient::zeros_like(h);

  const auto fill_row = [](std::span<const double> counts, double total,
                           std::span<const double> logits, std::span<double> out) {
    const auto probs = softmax(logits);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = counts[i] - total * probs[i];
  };

  fill_row({stats.gamma.data(), static_cast<std::size_t>(S)}, 1.0, h.init_logits,
           grad.init);
  for (int i = 0; i < S; ++i) {
    double total = 0.0;
    for (int j = 0; j < S; ++j) total += stats.xi_sums[static_cast<std::size_t>(i) * S + j];
    fill_row({stats.xi_sums.data() + static_cast<std::size_t>(i) * S, static_cast<std::size_t>(S)},
             total,
             {h.trans_logits.data() + static_cast<std::size_t>(i) * S, static_cast<std::size_t>(S)},
             {grad.trans.data() + static_cast<std::size_t>(i) * S, static_cast<std::size_t>(S)});
  }
  for (int s = 0; s < S; ++s) {
    for (int d = 0; d < h.alphabet.num_dims(); ++d) {
      const std::size_t off = static_cast<std::size_t>(s) * total_card + h.alphabet.emit_offset(d);
      const std::size_t card = static_cast<std::size_t>(h.alphabet.card(d));
      double total = 0.0;
      for (std::size_t v = 0; v < card; ++v) total += stats.emit_counts[off + v];
      fill_row({stats.emit_counts.data() + off, card}, total,
               {h.emit_logits.data() + off, card}, {grad.emit.data() + off, card});
    }
  }
  return grad;
}

Hmm base_rate_hmm(const SequenceDataset& data, double smoothing) {
  if (data.sequences.empty())
    throw InvalidInputError("base_rate_hmm needs a nonempty dataset");
  if (!(smoothing > 0.0)) throw InvalidInputError("smoothing must be positive");
  check_dataset(data);

  const AlphabetSpec& alphabet = data.alphabet;
  Hmm h = Hmm::uniform(alphabet, 1);
  std::vector<double> counts(static_cast<std::size_t>(alphabet.total_cardinality()), 0.0);
  double frames = 0.0;
  for (const Sequence& seq : data.sequences) {
    frames += seq.length();
    for (int t = 0; t < seq.length(); ++t)
      for (int d = 0; d < alphabet.num_dims(); ++d)
        counts[alphabet.emit_offset(d) + seq(t, d)] += 1.0;
  }
  for (int d = 0; d < alphabet.num_dims(); ++d) {
    const int card = alphabet.card(d);
    const double denom = frames + card * smoothing;
    for (int v = 0; v < card; ++v)
      h.emit_logits[alphabet.emit_offset(d) + v] =
          std::log((counts[alphabet.emit_offset(d) + v] + smoothing) / denom);
  }
  return h;
}

} // namespace pohmm

#include "pohmm/product.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pohmm/errors.hpp"
#include "pohmm/numeric.hpp"

namespace pohmm {

void check_product(const ProductHmm& p) {
  if (p.experts.empty()) throw InvalidInputError("product needs at least one expert");
  for (const Hmm& e : p.experts) {
    check_hmm(e);
    if (!(e.alphabet == p.alphabet()))
      throw InvalidInputError("experts disagree on the alphabet");
  }
}

CdSchedule CdSchedule::constant(int k) { return CdSchedule({{0, k}}); }

CdSchedule::CdSchedule(std::vector<std::pair<int, int>> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty() || steps_.front().first != 0)
    throw InvalidInputError("cd_k schedule must start at epoch 0");
  int prev_epoch = -1;
  for (const auto& [epoch, k] : steps_) {
    if (epoch <= prev_epoch)
      throw InvalidInputError("cd_k schedule epochs must be strictly increasing");
    if (k < 1) throw InvalidInputError("cd_k must be >= 1 for every epoch");
    prev_epoch = epoch;
  }
}

int CdSchedule::k_at(int epoch) const {
  int k = steps_.front().second;
  for (const auto& [from, value] : steps_) {
    if (from > epoch) break;
    k = value;
  }
  return k;
}

void check_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0))
    throw InvalidInputError("learning_rate must be nonnegative");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
    throw InvalidInputError("momentum must lie in [0, 1)");
  if (cfg.epochs < 1) throw InvalidInputError("epochs must be >= 1");
}

PohmmGradient PohmmGradient::zeros_like(const ProductHmm& p) {
  PohmmGradient g;
  g.experts.reserve(p.experts.size());
  for (const Hmm& e : p.experts) g.experts.push_back(HmmGradient::zeros_like(e));
  return g;
}

void PohmmGradient::add_scaled(const PohmmGradient& g, double scale) {
  for (std::size_t m = 0; m < experts.size(); ++m)
    experts[m].add_scaled(g.experts[m], scale);
}

void PohmmGradient::scale(double factor) {
  for (HmmGradient& g : experts) g.scale(factor);
}

double unnorm_log_likelihood(const ProductHmm& p, const Sequence& seq) {
  check_product(p);
  check_sequence(p.alphabet(), seq);
  double total = 0.0;
  for (const Hmm& e : p.experts)
    total += log_forward(to_distribution(e), e.alphabet, seq, 1.0);
  return total;
}

namespace {

// Shared Gibbs core: sample one state path per expert with the expert's
// emission power, then resample every symbol from the power-weighted
// product of emission rows.  Experts with power exactly 0 drop out of both
// stages.
Sequence weighted_gibbs_transition(std::span<const Hmm* const> experts,
                                   std::span<const HmmDist* const> dists,
                                   std::span<const double> powers,
                                   const AlphabetSpec& alphabet,
                                   const Sequence& seq, Rng& rng) {
  const int T = seq.length();
  const int D = alphabet.num_dims();
  const std::size_t M = experts.size();

  std::vector<std::vector<int>> paths(M);
  for (std::size_t m = 0; m < M; ++m) {
    if (powers[m] == 0.0) continue;
    paths[m] = ForwardPass(*dists[m], alphabet, seq, powers[m]).sample_path(rng);
  }

  Sequence out(D, T);
  std::vector<double> logits;
  for (int t = 0; t < T; ++t) {
    for (int d = 0; d < D; ++d) {
      const int card = alphabet.card(d);
      logits.assign(static_cast<std::size_t>(card), 0.0);
      for (std::size_t m = 0; m < M; ++m) {
        if (powers[m] == 0.0) continue;
        const int s = paths[m][static_cast<std::size_t>(t)];
        for (int v = 0; v < card; ++v)
          logits[v] += powers[m] * experts[m]->emit(s, d, v);
      }
      out(t, d) = rng.categorical_logits(logits);
    }
  }
  return out;
}

struct CompiledProduct {
  std::vector<const Hmm*> experts;
  std::vector<HmmDist> dists;
  std::vector<const HmmDist*> dist_ptrs;

  explicit CompiledProduct(const ProductHmm& p) {
    for (const Hmm& e : p.experts) {
      experts.push_back(&e);
      dists.push_back(to_distribution(e));
    }
    for (const HmmDist& d : dists) dist_ptrs.push_back(&d);
  }
};

} // namespace

Sequence gibbs_sweep(const ProductHmm& p, const Sequence& seq, Rng& rng) {
  check_product(p);
  check_sequence(p.alphabet(), seq);
  const CompiledProduct compiled(p);
  const std::vector<double> powers(p.experts.size(), 1.0);
  return weighted_gibbs_transition(compiled.experts, compiled.dist_ptrs, powers,
                                   p.alphabet(), seq, rng);
}

ProductHmm cd_step(const ProductHmm& p, std::span<const Sequence> batch, int k,
                   const TrainConfig& cfg, Rng& rng, PohmmGradient& velocity,
                   CdStepStats* stats) {
  check_product(p);
  check_train_config(cfg);
  if (batch.empty()) throw InvalidInputError("cd_step needs a nonempty batch");
  if (k < 1) throw InvalidInputError("cd reconstruction steps must be >= 1");

  const AlphabetSpec& alphabet = p.alphabet();
  const int M = p.num_experts();
  const int D = alphabet.num_dims();
  const CompiledProduct compiled(p);
  const std::vector<double> powers(p.experts.size(), 1.0);

  PohmmGradient direction = PohmmGradient::zeros_like(p);
  double recon_error = 0.0;
  double unnorm_ll = 0.0;

  for (const Sequence& seq : batch) {
    check_sequence(alphabet, seq);
    Sequence recon = seq;
    for (int step = 0; step < k; ++step)
      recon = weighted_gibbs_transition(compiled.experts, compiled.dist_ptrs,
                                        powers, alphabet, recon, rng);

    for (int m = 0; m < M; ++m) {
      const PosteriorStats stats_data =
          posterior_stats(compiled.dists[m], alphabet, seq, 1.0);
      const PosteriorStats stats_recon =
          posterior_stats(compiled.dists[m], alphabet, recon, 1.0);
      direction.experts[m].add_scaled(gradient_from_stats(p.experts[m], stats_data), 1.0);
      direction.experts[m].add_scaled(gradient_from_stats(p.experts[m], stats_recon), -1.0);
      unnorm_ll += stats_data.log_likelihood;
    }
    int mismatches = 0;
    for (int t = 0; t < seq.length(); ++t)
      for (int d = 0; d < D; ++d)
        if (recon(t, d) != seq(t, d)) ++mismatches;
    recon_error += static_cast<double>(mismatches) / (seq.length() * D);
  }

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  direction.scale(inv_batch);
  velocity.scale(cfg.momentum);
  velocity.add_scaled(direction, 1.0);

  ProductHmm updated = p;
  for (int m = 0; m < M; ++m) {
    const HmmGradient& v = velocity.experts[m];
    Hmm& e = updated.experts[m];
    for (std::size_t i = 0; i < v.init.size(); ++i)
      e.init_logits[i] += cfg.learning_rate * v.init[i];
    for (std::size_t i = 0; i < v.trans.size(); ++i)
      e.trans_logits[i] += cfg.learning_rate * v.trans[i];
    for (std::size_t i = 0; i < v.emit.size(); ++i)
      e.emit_logits[i] += cfg.learning_rate * v.emit[i];
  }
  if (stats != nullptr) {
    stats->mean_recon_error = recon_error * inv_batch;
    stats->mean_unnorm_log_likelihood = unnorm_ll * inv_batch;
  }
  return updated;
}

TrainResult train_cd(const ProductHmm& p, const SequenceDataset& data,
                     const TrainConfig& cfg) {
  check_product(p);
  check_train_config(cfg);
  if (data.sequences.empty()) throw InvalidInputError("train_cd needs a nonempty dataset");
  if (!(p.alphabet() == data.alphabet))
    throw InvalidInputError("model and dataset alphabets differ");

  Rng rng(cfg.seed);
  TrainResult result{p, {}};
  PohmmGradient velocity = PohmmGradient::zeros_like(p);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    CdStepStats stats;
    result.model = cd_step(result.model, data.sequences, cfg.cd_k.k_at(epoch), cfg,
                           rng, velocity, &stats);
    result.trace.recon_error.push_back(stats.mean_recon_error);
    result.trace.unnorm_log_likelihood.push_back(stats.mean_unnorm_log_likelihood);
  }
  return result;
}

Sequence model_sample(const ProductHmm& p, int length, int burn_in, Rng& rng,
                      const Hmm* init_model) {
  check_product(p);
  if (length < 1) throw InvalidInputError("sample length must be >= 1");
  if (burn_in < 1) throw InvalidInputError("burn_in must be >= 1");

  const AlphabetSpec& alphabet = p.alphabet();
  Sequence seq(alphabet.num_dims(), length);
  if (init_model != nullptr) {
    if (!(init_model->alphabet == alphabet))
      throw InvalidInputError("init model alphabet differs from product alphabet");
    seq = ancestral_sample(*init_model, length, rng);
  } else {
    for (int t = 0; t < length; ++t)
      for (int d = 0; d < alphabet.num_dims(); ++d)
        seq(t, d) = rng.uniform_int(alphabet.card(d));
  }
  const CompiledProduct compiled(p);
  const std::vector<double> powers(p.experts.size(), 1.0);
  for (int sweep = 0; sweep < burn_in; ++sweep)
    seq = weighted_gibbs_transition(compiled.experts, compiled.dist_ptrs, powers,
                                    alphabet, seq, rng);
  return seq;
}

ProductHmm random_init_pohmm(const SequenceDataset& data, int num_experts,
                             int num_states, Rng& rng) {
  if (num_experts < 1) throw InvalidInputError("need at least one expert");
  ProductHmm p;
  for (int m = 0; m < num_experts; ++m) {
    Rng stream = rng.split(static_cast<std::uint64_t>(m));
    p.experts.push_back(random_init_hmm(data, num_states, stream));
  }
  return p;
}

} // namespace pohmm

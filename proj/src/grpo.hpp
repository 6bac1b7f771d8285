// grpo.hpp - group-relative advantages, KL estimator, clipped surrogate
// objective and SFT loss, plus a desk-scale policy to verify the gradients
#pragma once

#include <random>
#include <span>
#include <vector>

namespace tabscore {

struct HyperParams {
    double epsilon = 0.2; // PPO clip width, in (0, 1)
    double beta = 0.02;   // KL penalty coefficient, >= 0
    int group_size = 8;   // N >= 2
};

// Per-candidate sequence log-probabilities under the three policies of the
// clipped surrogate: current, behavior (old), and reference.
struct SequenceLogProbs {
    double cur = 0.0;
    double old = 0.0;
    double ref = 0.0;
};

// Mean-centered, population-std-normalized rewards. All-equal groups yield
// all zeros. Throws if fewer than two rewards.
std::vector<double> advantages(std::span<const double> rewards);

// k3 estimator x - log(x) - 1 with x = exp(logp_ref - logp_cur). Always >= 0,
// zero iff the log-probs agree.
double kl_estimate(double logp_ref, double logp_cur);

// (1/N) sum_i [ min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i) - beta * KL_i ]
// with rho_i = exp(cur_i - old_i). Throws on length mismatch.
double rft_objective(std::span<const SequenceLogProbs> seq, std::span<const double> adv,
                     const HyperParams& hp);

// Negative log-likelihood: -sum of target log-probs.
double sft_nll(std::span<const double> logp_targets);

// Context-independent categorical sequence model with explicit logits, one
// distribution per position. Exists so the objective math can be checked
// against finite differences.
class ToyPolicy {
public:
    ToyPolicy(int vocab, int length);
    static ToyPolicy random(int vocab, int length, std::mt19937& rng);

    int vocab() const { return vocab_; }
    int length() const { return length_; }

    double& logit(int pos, int v) { return logits_[static_cast<size_t>(pos) * vocab_ + v]; }
    double logit(int pos, int v) const { return logits_[static_cast<size_t>(pos) * vocab_ + v]; }
    std::vector<double>& raw_logits() { return logits_; }
    const std::vector<double>& raw_logits() const { return logits_; }

    // log softmax over one position; probabilities sum to 1 within 1e-12.
    std::vector<double> log_probs(int pos) const;
    double sequence_log_prob(std::span<const int> tokens) const;
    std::vector<int> sample(std::mt19937& rng) const;

private:
    int vocab_;
    int length_;
    std::vector<double> logits_; // length x vocab, row-major
};

struct ToyBatch {
    std::vector<std::vector<int>> sequences; // each of length policy.length()
    std::vector<double> advantages;
    std::vector<double> old_logps;
    std::vector<double> ref_logps;
};

// rft_objective with cur log-probs computed from the policy.
double batch_objective(const ToyPolicy& current, const ToyBatch& batch, const HyperParams& hp);

// Analytic gradient of batch_objective with respect to the current logits
// (old and ref fixed). The clipped branch contributes zero, PPO-style.
// Returned layout matches ToyPolicy::raw_logits().
std::vector<double> objective_gradient(const ToyPolicy& current, const ToyBatch& batch,
                                       const HyperParams& hp);

} // namespace tabscore

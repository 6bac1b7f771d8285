#include "grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tabscore {

std::vector<double> advantages(std::span<const double> rewards) {
    const size_t n = rewards.size();
    if (n < 2)
        throw std::invalid_argument("advantages: group size must be at least 2");

    bool all_equal = std::all_of(rewards.begin(), rewards.end(),
                                 [&](double r) { return r == rewards[0]; });
    if (all_equal)
        return std::vector<double>(n, 0.0);

    double mean = 0.0;
    for (double r : rewards)
        mean += r;
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (double r : rewards)
        var += (r - mean) * (r - mean);
    var /= static_cast<double>(n); // population convention

    double std_dev = std::sqrt(var);
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = (rewards[i] - mean) / std_dev;
    return out;
}

double kl_estimate(double logp_ref, double logp_cur) {
    // x - log(x) - 1 = expm1(d) - d with d = log(x); staying in log space
    // avoids overflowing exp(logp_ref)/exp(logp_cur) separately.
    const double d = logp_ref - logp_cur;
    return std::expm1(d) - d;
}

double rft_objective(std::span<const SequenceLogProbs> seq, std::span<const double> adv,
                     const HyperParams& hp) {
    if (seq.size() != adv.size())
        throw std::invalid_argument("rft_objective: sequence/advantage length mismatch");
    if (seq.empty())
        throw std::invalid_argument("rft_objective: empty group");
    if (hp.epsilon <= 0.0 || hp.epsilon >= 1.0)
        throw std::invalid_argument("rft_objective: epsilon must lie in (0, 1)");
    if (hp.beta < 0.0)
        throw std::invalid_argument("rft_objective: beta must be >= 0");

    const double lo = 1.0 - hp.epsilon;
    const double hi = 1.0 + hp.epsilon;
    double total = 0.0;
    for (size_t i = 0; i < seq.size(); ++i) {
        const double rho = std::exp(seq[i].cur - seq[i].old);
        const double unclipped = rho * adv[i];
        const double clipped = std::clamp(rho, lo, hi) * adv[i];
        total += std::min(unclipped, clipped) - hp.beta * kl_estimate(seq[i].ref, seq[i].cur);
    }
    return total / static_cast<double>(seq.size());
}

double sft_nll(std::span<const double> logp_targets) {
    double total = 0.0;
    for (double lp : logp_targets)
        total += lp;
    return -total;
}

// ---------------------------------------------------------------------------
// Toy policy

ToyPolicy::ToyPolicy(int vocab, int length) : vocab_(vocab), length_(length) {
    if (vocab < 2 || length < 1)
        throw std::invalid_argument("ToyPolicy needs vocab >= 2 and length >= 1");
    logits_.assign(static_cast<size_t>(vocab) * length, 0.0);
}

ToyPolicy ToyPolicy::random(int vocab, int length, std::mt19937& rng) {
    ToyPolicy p(vocab, length);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& l : p.logits_)
        l = dist(rng);
    return p;
}

std::vector<double> ToyPolicy::log_probs(int pos) const {
    std::vector<double> out(vocab_);
    double max_logit = logit(pos, 0);
    for (int v = 1; v < vocab_; ++v)
        max_logit = std::max(max_logit, logit(pos, v));
    double sum = 0.0;
    for (int v = 0; v < vocab_; ++v)
        sum += std::exp(logit(pos, v) - max_logit);
    const double lse = max_logit + std::log(sum);
    for (int v = 0; v < vocab_; ++v)
        out[v] = logit(pos, v) - lse;
    return out;
}

double ToyPolicy::sequence_log_prob(std::span<const int> tokens) const {
    if (static_cast<int>(tokens.size()) != length_)
        throw std::invalid_argument("sequence_log_prob: token count does not match policy length");
    double total = 0.0;
    for (int pos = 0; pos < length_; ++pos)
        total += log_probs(pos)[tokens[pos]];
    return total;
}

std::vector<int> ToyPolicy::sample(std::mt19937& rng) const {
    std::vector<int> tokens(length_);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int pos = 0; pos < length_; ++pos) {
        std::vector<double> lp = log_probs(pos);
        double u = unit(rng);
        double acc = 0.0;
        int pick = vocab_ - 1;
        for (int v = 0; v < vocab_; ++v) {
            acc += std::exp(lp[v]);
            if (u <= acc) {
                pick = v;
                break;
            }
        }
        tokens[pos] = pick;
    }
    return tokens;
}

double batch_objective(const ToyPolicy& current, const ToyBatch& batch, const HyperParams& hp) {
    std::vector<SequenceLogProbs> seq(batch.sequences.size());
    for (size_t i = 0; i < batch.sequences.size(); ++i) {
        seq[i].cur = current.sequence_log_prob(batch.sequences[i]);
        seq[i].old = batch.old_logps[i];
        seq[i].ref = batch.ref_logps[i];
    }
    return rft_objective(seq, batch.advantages, hp);
}

std::vector<double> objective_gradient(const ToyPolicy& current, const ToyBatch& batch,
                                       const HyperParams& hp) {
    const size_t n = batch.sequences.size();
    if (n == 0 || batch.advantages.size() != n || batch.old_logps.size() != n ||
        batch.ref_logps.size() != n)
        throw std::invalid_argument("objective_gradient: inconsistent batch");

    const double lo = 1.0 - hp.epsilon;
    const double hi = 1.0 + hp.epsilon;
    const double inv_n = 1.0 / static_cast<double>(n);

    // Per-position softmax probabilities, shared across candidates.
    std::vector<std::vector<double>> probs(current.length());
    for (int pos = 0; pos < current.length(); ++pos) {
        probs[pos] = current.log_probs(pos);
        for (double& v : probs[pos])
            v = std::exp(v);
    }

    std::vector<double> grad(current.raw_logits().size(), 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double cur = current.sequence_log_prob(batch.sequences[i]);
        const double rho = std::exp(cur - batch.old_logps[i]);
        const double adv = batch.advantages[i];
        const double unclipped = rho * adv;
        const double clipped = std::clamp(rho, lo, hi) * adv;

        // d/dcur of the surrogate: rho*adv on the active unclipped branch,
        // zero when the clipped branch is strictly smaller.
        double dsurrogate = (clipped < unclipped) ? 0.0 : rho * adv;
        // d/dcur of -beta * (exp(d) - d - 1) with d = ref - cur.
        const double dkl = hp.beta * std::expm1(batch.ref_logps[i] - cur);
        const double dcur = inv_n * (dsurrogate + dkl);

        for (int pos = 0; pos < current.length(); ++pos) {
            const int tok = batch.sequences[i][pos];
            const std::vector<double>& p = probs[pos];
            double* g = grad.data() + static_cast<size_t>(pos) * current.vocab();
            for (int v = 0; v < current.vocab(); ++v)
                g[v] += dcur * ((v == tok ? 1.0 : 0.0) - p[v]);
        }
    }
    return grad;
}

} // namespace tabscore

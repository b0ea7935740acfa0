#include "suml/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "suml/rng.hpp"
#include "suml/text.hpp"

namespace suml {

namespace {

std::vector<int> choice_token_ids(const Vocab& vocab, const Instance& instance, int choice_index,
                                  EncodeMode mode) {
    if (choice_index < 0 || choice_index >= instance.num_choices())
        throw std::out_of_range("choice index " + std::to_string(choice_index) +
                                " out of range for instance " + instance.id);
    std::vector<int> ids;
    if (mode == EncodeMode::Full) {
        for (auto& token : tokenize(instance.context)) ids.push_back(vocab.id_of(token));
    }
    for (auto& token : tokenize(instance.choices[choice_index])) ids.push_back(vocab.id_of(token));
    return ids;
}

std::vector<double> mean_embedding(const ModelParams& params, const std::vector<int>& ids) {
    const int d = params.dims.embed;
    std::vector<double> enc(d, 0.0);
    if (ids.empty()) return enc;
    for (int id : ids) {
        auto row = params.embedding_row(id);
        for (int i = 0; i < d; ++i) enc[i] += row[i];
    }
    const double inv = 1.0 / static_cast<double>(ids.size());
    for (int i = 0; i < d; ++i) enc[i] *= inv;
    return enc;
}

// Forward pass pieces kept for the backward sweep.
struct ChoiceForward {
    std::vector<int> ids;
    std::vector<double> enc;    // d
    std::vector<double> pre;    // h, before relu
    std::vector<double> act;    // h
    double logit = 0.0;
};

ChoiceForward forward_choice(const ModelParams& params, const Vocab& vocab,
                             const Instance& instance, int j, EncodeMode mode) {
    const ModelDims& dims = params.dims;
    ChoiceForward f;
    f.ids = choice_token_ids(vocab, instance, j, mode);
    f.enc = mean_embedding(params, f.ids);
    f.pre.assign(dims.hidden, 0.0);
    auto w1 = params.w1();
    auto b1 = params.b1();
    for (int i = 0; i < dims.embed; ++i) {
        const double e = f.enc[i];
        if (e == 0.0) continue;
        const double* col = w1.data() + static_cast<std::size_t>(i) * dims.hidden;
        for (int k = 0; k < dims.hidden; ++k) f.pre[k] += e * col[k];
    }
    for (int k = 0; k < dims.hidden; ++k) f.pre[k] += b1[k];
    f.act.resize(dims.hidden);
    auto w2 = params.w2();
    double logit = params.b2();
    for (int k = 0; k < dims.hidden; ++k) {
        f.act[k] = f.pre[k] > 0.0 ? f.pre[k] : 0.0;
        logit += w2[k] * f.act[k];
    }
    f.logit = logit;
    return f;
}

// log softmax denominator with max subtraction
double log_sum_exp(const std::vector<double>& logits) {
    double hi = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - hi);
    return hi + std::log(sum);
}

void check_batch(std::span<const Instance> batch) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    for (const Instance& instance : batch) {
        if (instance.num_choices() < 2)
            throw std::invalid_argument("instance " + instance.id + " has fewer than 2 choices");
        if (instance.label < 0 || instance.label >= instance.num_choices())
            throw std::invalid_argument("instance " + instance.id + " has label out of range");
    }
}

}  // namespace

ModelParams init_params(const ModelDims& dims, std::uint64_t seed, double scale) {
    ModelParams params{dims, std::vector<double>(dims.total(), 0.0)};
    Rng rng(seed);
    auto fill = [&](std::size_t begin, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) params.flat[begin + i] = scale * rng.normal();
    };
    fill(0, dims.off_w1());                                                   // embeddings
    fill(dims.off_w1(), static_cast<std::size_t>(dims.embed) * dims.hidden);  // w1
    fill(dims.off_w2(), dims.hidden);                                         // w2
    fill(dims.off_adv_w(), static_cast<std::size_t>(dims.embed) * dims.max_choices);
    // biases stay zero
    return params;
}

std::vector<double> encode_choice(const ModelParams& params, const Vocab& vocab,
                                  const Instance& instance, int choice_index, EncodeMode mode) {
    return mean_embedding(params, choice_token_ids(vocab, instance, choice_index, mode));
}

std::vector<double> score_choices(const ModelParams& params, const Vocab& vocab,
                                  const Instance& instance, EncodeMode mode) {
    if (instance.num_choices() < 2)
        throw std::invalid_argument("instance " + instance.id + " has fewer than 2 choices");
    std::vector<double> logits(instance.num_choices());
    for (int j = 0; j < instance.num_choices(); ++j)
        logits[j] = forward_choice(params, vocab, instance, j, mode).logit;
    return logits;
}

std::vector<double> adversary_logits(const ModelParams& params, const Vocab& vocab,
                                     const Instance& instance) {
    const ModelDims& dims = params.dims;
    const int m = instance.num_choices();
    if (m > dims.max_choices)
        throw std::invalid_argument("instance " + instance.id + " has " + std::to_string(m) +
                                    " choices but the adversary head is sized for " +
                                    std::to_string(dims.max_choices));
    auto adv_w = params.adv_w();
    auto adv_b = params.adv_b();
    std::vector<double> logits(m);
    for (int j = 0; j < m; ++j) {
        auto g = encode_choice(params, vocab, instance, j, EncodeMode::Contextless);
        double logit = adv_b[j];
        for (int i = 0; i < dims.embed; ++i)
            logit += adv_w[static_cast<std::size_t>(i) * dims.max_choices + j] * g[i];
        logits[j] = logit;
    }
    return logits;
}

LossGrad ce_loss_and_grad(const ModelParams& params, const Vocab& vocab,
                          std::span<const Instance> batch, EncodeMode mode) {
    check_batch(batch);
    const ModelDims& dims = params.dims;
    LossGrad out;
    out.grad.assign(dims.total(), 0.0);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    auto w1 = params.w1();
    auto w2 = params.w2();
    double* g = out.grad.data();
    double* g_w1 = g + dims.off_w1();
    double* g_b1 = g + dims.off_b1();
    double* g_w2 = g + dims.off_w2();
    double* g_b2 = g + dims.off_b2();

    for (const Instance& instance : batch) {
        const int m = instance.num_choices();
        std::vector<ChoiceForward> fwd;
        fwd.reserve(m);
        std::vector<double> logits(m);
        for (int j = 0; j < m; ++j) {
            fwd.push_back(forward_choice(params, vocab, instance, j, mode));
            logits[j] = fwd.back().logit;
        }
        const double lse = log_sum_exp(logits);
        out.loss += (lse - logits[instance.label]) * inv_batch;

        for (int j = 0; j < m; ++j) {
            double dlogit = std::exp(logits[j] - lse);
            if (j == instance.label) dlogit -= 1.0;
            dlogit *= inv_batch;
            if (dlogit == 0.0) continue;

            const ChoiceForward& f = fwd[j];
            *g_b2 += dlogit;
            std::vector<double> dpre(dims.hidden);
            for (int k = 0; k < dims.hidden; ++k) {
                g_w2[k] += dlogit * f.act[k];
                dpre[k] = f.pre[k] > 0.0 ? dlogit * w2[k] : 0.0;
                g_b1[k] += dpre[k];
            }
            if (f.ids.empty()) continue;
            std::vector<double> denc(dims.embed, 0.0);
            for (int i = 0; i < dims.embed; ++i) {
                const double e = f.enc[i];
                const double* col = w1.data() + static_cast<std::size_t>(i) * dims.hidden;
                double* gcol = g_w1 + static_cast<std::size_t>(i) * dims.hidden;
                double acc = 0.0;
                for (int k = 0; k < dims.hidden; ++k) {
                    gcol[k] += e * dpre[k];
                    acc += col[k] * dpre[k];
                }
                denc[i] = acc;
            }
            const double inv_tokens = 1.0 / static_cast<double>(f.ids.size());
            for (int id : f.ids) {
                double* row = g + static_cast<std::size_t>(id) * dims.embed;
                for (int i = 0; i < dims.embed; ++i) row[i] += denc[i] * inv_tokens;
            }
        }
    }
    return out;
}

std::vector<double> grl_backward(std::span<const double> upstream, double lambda_enc) {
    if (lambda_enc < 0.0) throw std::invalid_argument("grl_backward: lambda_enc must be >= 0");
    std::vector<double> out(upstream.size());
    for (std::size_t i = 0; i < upstream.size(); ++i) out[i] = -lambda_enc * upstream[i];
    return out;
}

AdvLossGrad adversarial_loss_and_grad(const ModelParams& params, const Vocab& vocab,
                                      std::span<const Instance> batch, double lambda_loss,
                                      double lambda_enc) {
    if (lambda_loss < 0.0 || lambda_enc < 0.0)
        throw std::invalid_argument("adversarial_loss_and_grad: lambdas must be >= 0");
    check_batch(batch);
    const ModelDims& dims = params.dims;

    LossGrad scorer = ce_loss_and_grad(params, vocab, batch, EncodeMode::Full);
    AdvLossGrad out;
    out.scorer = scorer.loss;
    out.grad = std::move(scorer.grad);

    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    auto adv_w = params.adv_w();
    double* g = out.grad.data();
    double* g_adv_w = g + dims.off_adv_w();
    double* g_adv_b = g + dims.off_adv_b();

    for (const Instance& instance : batch) {
        const int m = instance.num_choices();
        if (m > dims.max_choices)
            throw std::invalid_argument("instance " + instance.id +
                                        " exceeds the adversary head size");
        std::vector<std::vector<int>> ids(m);
        std::vector<std::vector<double>> enc(m);
        std::vector<double> logits(m);
        auto adv_b = params.adv_b();
        for (int j = 0; j < m; ++j) {
            ids[j] = choice_token_ids(vocab, instance, j, EncodeMode::Contextless);
            enc[j] = mean_embedding(params, ids[j]);
            double logit = adv_b[j];
            for (int i = 0; i < dims.embed; ++i)
                logit += adv_w[static_cast<std::size_t>(i) * dims.max_choices + j] * enc[j][i];
            logits[j] = logit;
        }
        const double lse = log_sum_exp(logits);
        out.adversary += (lse - logits[instance.label]) * inv_batch;

        for (int j = 0; j < m; ++j) {
            double dlogit = std::exp(logits[j] - lse);
            if (j == instance.label) dlogit -= 1.0;
            dlogit *= inv_batch * lambda_loss;
            if (dlogit == 0.0) continue;

            g_adv_b[j] += dlogit;
            std::vector<double> dg(dims.embed);
            for (int i = 0; i < dims.embed; ++i) {
                const std::size_t w_idx = static_cast<std::size_t>(i) * dims.max_choices + j;
                g_adv_w[w_idx] += dlogit * enc[j][i];
                dg[i] = dlogit * adv_w[w_idx];
            }
            if (ids[j].empty()) continue;
            // encoder path: reversed and scaled before it reaches the embeddings
            std::vector<double> dg_rev = grl_backward(dg, lambda_enc);
            const double inv_tokens = 1.0 / static_cast<double>(ids[j].size());
            for (int id : ids[j]) {
                double* row = g + static_cast<std::size_t>(id) * dims.embed;
                for (int i = 0; i < dims.embed; ++i) row[i] += dg_rev[i] * inv_tokens;
            }
        }
    }
    out.total = out.scorer + lambda_loss * out.adversary;
    return out;
}

double ce_loss(const ModelParams& params, const Vocab& vocab, std::span<const Instance> batch,
               EncodeMode mode) {
    check_batch(batch);
    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (const Instance& instance : batch) {
        auto logits = score_choices(params, vocab, instance, mode);
        loss += (log_sum_exp(logits) - logits[instance.label]) * inv_batch;
    }
    return loss;
}

double adversary_ce_loss(const ModelParams& params, const Vocab& vocab,
                         std::span<const Instance> batch) {
    check_batch(batch);
    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (const Instance& instance : batch) {
        auto logits = adversary_logits(params, vocab, instance);
        loss += (log_sum_exp(logits) - logits[instance.label]) * inv_batch;
    }
    return loss;
}

namespace {

std::vector<std::size_t> checked_coordinates(std::size_t total, std::size_t full_sweep_limit,
                                             std::uint64_t subset_seed) {
    std::vector<std::size_t> coords;
    if (total <= full_sweep_limit) {
        coords.resize(total);
        for (std::size_t i = 0; i < total; ++i) coords[i] = i;
    } else {
        Rng rng(subset_seed);
        coords = rng.sample_without_replacement(total, std::max<std::size_t>(200, total / 100));
    }
    return coords;
}

// Agreement with a denominator floor sized by central-difference error
// analysis: each loss evaluation carries eps*|L| rounding error (~1e-11 after
// the /2h) and the difference an O(h^2) truncation term, so an absolute
// disagreement of ~1e-10 is indistinguishable from noise. Coordinates whose
// true gradient sits below that band — mathematically-zero ones included
// (softmax is invariant to a constant logit shift, so e.g. the output bias
// gradient is identically zero) — cannot be compared relatively; the floor
// maps their noise to ~1e-6 while leaving every informative coordinate's
// relative error untouched.
constexpr double kFdDenominatorFloor = 1e-4;

double rel_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) /
           std::max(kFdDenominatorFloor, std::abs(analytic) + std::abs(numeric));
}

}  // namespace

double grad_check(const ModelParams& params, const Vocab& vocab, std::span<const Instance> batch,
                  EncodeMode mode, double step, std::size_t full_sweep_limit,
                  std::uint64_t subset_seed) {
    if (step <= 0.0) throw std::invalid_argument("grad_check: step must be > 0");
    LossGrad analytic = ce_loss_and_grad(params, vocab, batch, mode);
    ModelParams probe = params;
    double worst = 0.0;
    for (std::size_t c : checked_coordinates(params.flat.size(), full_sweep_limit, subset_seed)) {
        const double saved = probe.flat[c];
        probe.flat[c] = saved + step;
        const double up = ce_loss(probe, vocab, batch, mode);
        probe.flat[c] = saved - step;
        const double down = ce_loss(probe, vocab, batch, mode);
        probe.flat[c] = saved;
        worst = std::max(worst, rel_error(analytic.grad[c], (up - down) / (2.0 * step)));
    }
    return worst;
}

double grad_check_adversarial(const ModelParams& params, const Vocab& vocab,
                              std::span<const Instance> batch, double lambda_loss,
                              double lambda_enc, double step, std::size_t full_sweep_limit,
                              std::uint64_t subset_seed) {
    if (step <= 0.0) throw std::invalid_argument("grad_check: step must be > 0");
    AdvLossGrad analytic = adversarial_loss_and_grad(params, vocab, batch, lambda_loss, lambda_enc);
    const std::size_t embedding_end = params.dims.off_w1();
    ModelParams probe = params;
    double worst = 0.0;
    for (std::size_t c : checked_coordinates(params.flat.size(), full_sweep_limit, subset_seed)) {
        const double saved = probe.flat[c];
        probe.flat[c] = saved + step;
        const double scorer_up = ce_loss(probe, vocab, batch, EncodeMode::Full);
        const double adv_up = adversary_ce_loss(probe, vocab, batch);
        probe.flat[c] = saved - step;
        const double scorer_down = ce_loss(probe, vocab, batch, EncodeMode::Full);
        const double adv_down = adversary_ce_loss(probe, vocab, batch);
        probe.flat[c] = saved;

        // the reversal flips (and scales) only the embedding-side contribution
        const double sign = c < embedding_end ? -lambda_enc : 1.0;
        const double numeric = (scorer_up - scorer_down) / (2.0 * step) +
                               lambda_loss * sign * (adv_up - adv_down) / (2.0 * step);
        worst = std::max(worst, rel_error(analytic.grad[c], numeric));
    }
    return worst;
}

}  // namespace suml

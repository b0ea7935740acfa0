#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "suml/data.hpp"
#include "suml/vocab.hpp"

namespace suml {

enum class EncodeMode { Full, Contextless };

// Shape of the scorer/adversary parameter block. The flat layout is fixed:
//
//   [0, V*d)                      embedding table, row-major, row i = token i
//   [off_w1, +d*h)                hidden weights, w1[i*h + k] maps input i -> unit k
//   [off_b1, +h)                  hidden bias
//   [off_w2, +h)                  output weights (h -> 1)
//   [off_b2, +1)                  output bias
//   [off_adv_w, +d*m_max)         adversary head, adv_w[i*m_max + c] maps input i -> class c
//   [off_adv_b, +m_max)           adversary bias
//
// total P = V*d + d*h + h + h + 1 + d*m_max + m_max.
struct ModelDims {
    int vocab = 0;
    int embed = 32;
    int hidden = 32;
    int max_choices = 3;

    std::size_t off_w1() const { return static_cast<std::size_t>(vocab) * embed; }
    std::size_t off_b1() const { return off_w1() + static_cast<std::size_t>(embed) * hidden; }
    std::size_t off_w2() const { return off_b1() + hidden; }
    std::size_t off_b2() const { return off_w2() + hidden; }
    std::size_t off_adv_w() const { return off_b2() + 1; }
    std::size_t off_adv_b() const { return off_adv_w() + static_cast<std::size_t>(embed) * max_choices; }
    std::size_t total() const { return off_adv_b() + max_choices; }

    bool operator==(const ModelDims&) const = default;
};

// Flat-indexable parameter vector plus its shape. The structured accessors
// alias `flat`; there is no second copy.
struct ModelParams {
    ModelDims dims;
    std::vector<double> flat;

    std::span<const double> embedding_row(int token_id) const {
        return {flat.data() + static_cast<std::size_t>(token_id) * dims.embed,
                static_cast<std::size_t>(dims.embed)};
    }
    std::span<const double> w1() const { return {flat.data() + dims.off_w1(), static_cast<std::size_t>(dims.embed) * dims.hidden}; }
    std::span<const double> b1() const { return {flat.data() + dims.off_b1(), static_cast<std::size_t>(dims.hidden)}; }
    std::span<const double> w2() const { return {flat.data() + dims.off_w2(), static_cast<std::size_t>(dims.hidden)}; }
    double b2() const { return flat[dims.off_b2()]; }
    std::span<const double> adv_w() const { return {flat.data() + dims.off_adv_w(), static_cast<std::size_t>(dims.embed) * dims.max_choices}; }
    std::span<const double> adv_b() const { return {flat.data() + dims.off_adv_b(), static_cast<std::size_t>(dims.max_choices)}; }

    bool operator==(const ModelParams&) const = default;
};

// Same length and layout as the owning ModelParams' flat view.
using GradVector = std::vector<double>;

ModelParams init_params(const ModelDims& dims, std::uint64_t seed, double scale = 0.1);

// Mean of the embedding rows of the tokens in (context + choice) for Full, or
// the choice only for Contextless. Empty token sequences encode to zero.
std::vector<double> encode_choice(const ModelParams& params, const Vocab& vocab,
                                  const Instance& instance, int choice_index, EncodeMode mode);

// logit_j = w2 . relu(w1^T enc_j + b1) + b2, one logit per choice.
std::vector<double> score_choices(const ModelParams& params, const Vocab& vocab,
                                  const Instance& instance, EncodeMode mode);

// Adversary logits over the first m choices:
//   adv_logit_j = adv_w[:, j] . g_j + adv_b[j],  g_j = contextless encoding of choice j.
// Requires m <= dims.max_choices.
std::vector<double> adversary_logits(const ModelParams& params, const Vocab& vocab,
                                     const Instance& instance);

// Loss-only forward passes, for validation and finite differencing.
double ce_loss(const ModelParams& params, const Vocab& vocab, std::span<const Instance> batch,
               EncodeMode mode);
double adversary_ce_loss(const ModelParams& params, const Vocab& vocab,
                         std::span<const Instance> batch);

struct LossGrad {
    double loss = 0.0;
    GradVector grad;
};

// Mean softmax cross-entropy over the batch and its exact analytic gradient.
LossGrad ce_loss_and_grad(const ModelParams& params, const Vocab& vocab,
                          std::span<const Instance> batch, EncodeMode mode);

// Gradient reversal layer backward rule; the forward pass is the identity.
std::vector<double> grl_backward(std::span<const double> upstream, double lambda_enc);

struct AdvLossGrad {
    double total = 0.0;    // scorer + lambda_loss * adversary
    double scorer = 0.0;
    double adversary = 0.0;
    GradVector grad;
};

// L_scorer (Full-mode CE) plus lambda_loss * L_Adv, where the adversary head
// predicts the label from contextless choice encodings. The adversary-to-
// embedding path goes through grl_backward; head weights get the unreversed
// gradient.
AdvLossGrad adversarial_loss_and_grad(const ModelParams& params, const Vocab& vocab,
                                      std::span<const Instance> batch, double lambda_loss,
                                      double lambda_enc);

// Central finite differences against the analytic gradient; returns the max
// over coordinates of |analytic - numeric| / max(floor, |analytic| + |numeric|)
// where the floor (1e-4) keeps coordinates whose gradient sits below the
// finite-difference noise band from registering as spurious disagreement.
// A correct gradient stays under 1e-6 at step 1e-5; a broken one lands near 1.
// All coordinates are checked while P <= full_sweep_limit, otherwise a seeded
// random subset of at least 200.
double grad_check(const ModelParams& params, const Vocab& vocab, std::span<const Instance> batch,
                  EncodeMode mode, double step, std::size_t full_sweep_limit = 4096,
                  std::uint64_t subset_seed = 0);

// Same check for the adversarial objective. The numeric side models the
// reversal explicitly: FD(L_scorer) + lambda_loss * s_i * FD(L_Adv) with
// s_i = -lambda_enc on embedding coordinates and s_i = +1 elsewhere.
double grad_check_adversarial(const ModelParams& params, const Vocab& vocab,
                              std::span<const Instance> batch, double lambda_loss,
                              double lambda_enc, double step,
                              std::size_t full_sweep_limit = 4096, std::uint64_t subset_seed = 0);

}  // namespace suml

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "suml/model.hpp"

namespace suml {

struct SgdConfig {
    double learning_rate = 0.01;
};

// theta' = theta - alpha * g, coordinate-wise. The inner-loop rule: no
// momentum, no weight decay, no schedule.
std::vector<double> sgd_step(const std::vector<double>& theta, const std::vector<double>& grad,
                             const SgdConfig& cfg);
ModelParams sgd_step(const ModelParams& params, const GradVector& grad, const SgdConfig& cfg);

struct AdamState {
    std::size_t t = 0;
    std::vector<double> m;
    std::vector<double> v;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
    double base_lr = 1e-5;
    double weight_decay = 0.0;
    std::optional<double> grad_clip;

    bool operator==(const AdamState&) const = default;
};

AdamState make_adam_state(std::size_t p, double base_lr, double beta2, double weight_decay,
                          std::optional<double> grad_clip, double beta1 = 0.9, double eps = 1e-8);

// Bias-corrected Adam with decoupled weight decay:
//   theta' = theta - lr_now * ( mhat / (sqrt(vhat) + eps) + weight_decay * theta )
// If grad_clip is set the gradient is globally rescaled before the moment
// updates. Mutates `state` (t, m, v); returns the updated parameters.
std::vector<double> adam_step(AdamState& state, const std::vector<double>& theta,
                              const std::vector<double>& grad, double lr_now);
ModelParams adam_step(AdamState& state, const ModelParams& params, const GradVector& grad,
                      double lr_now);

struct Schedule {
    std::size_t total_steps = 0;
    double warmup_proportion = 0.06;
    double base_lr = 0.0;
};

// Linear warm-up from 0 over the first warmup_proportion fraction of steps,
// then linear decay to 0 at total_steps; steps past the end clamp to 0.
double lr_at(const Schedule& schedule, std::size_t step);

// Global L2 rescale to norm <= max_norm; zero vectors pass through untouched.
std::vector<double> clip_grad(std::vector<double> grad, double max_norm);

}  // namespace suml

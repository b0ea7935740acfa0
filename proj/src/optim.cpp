#include "suml/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace suml {

std::vector<double> sgd_step(const std::vector<double>& params, const std::vector<double>& grad,
                             const SgdConfig& cfg) {
    if (params.size() != grad.size())
        throw std::invalid_argument("sgd_step: parameter/gradient size mismatch");
    std::vector<double> out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) out[i] = params[i] - cfg.learning_rate * grad[i];
    return out;
}

ModelParams sgd_step(const ModelParams& params, const GradVector& grad, const SgdConfig& cfg) {
    ModelParams out = params;
    out.flat = sgd_step(params.flat, grad, cfg);
    return out;
}

AdamState make_adam_state(std::size_t n_params, double base_lr, double beta2, double weight_decay,
                          std::optional<double> grad_clip, double beta1, double eps) {
    if (n_params == 0) throw std::invalid_argument("adam: n_params must be >= 1");
    if (base_lr <= 0.0) throw std::invalid_argument("adam: base_lr must be > 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw std::invalid_argument("adam: betas must lie in [0, 1)");
    if (grad_clip && *grad_clip <= 0.0)
        throw std::invalid_argument("adam: grad_clip must be > 0 when set");
    AdamState state;
    state.m.assign(n_params, 0.0);
    state.v.assign(n_params, 0.0);
    state.beta1 = beta1;
    state.beta2 = beta2;
    state.eps = eps;
    state.base_lr = base_lr;
    state.weight_decay = weight_decay;
    state.grad_clip = grad_clip;
    return state;
}

std::vector<double> clip_grad(std::vector<double> grad, double max_norm) {
    if (max_norm <= 0.0) throw std::invalid_argument("clip_grad: max_norm must be > 0");
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (double& g : grad) g *= scale;
    }
    return grad;
}

std::vector<double> adam_step(AdamState& state, const std::vector<double>& params,
                              const std::vector<double>& grad, double lr_now) {
    if (params.size() != grad.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: size mismatch");
    std::vector<double> g = state.grad_clip ? clip_grad(grad, *state.grad_clip) : grad;
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    std::vector<double> out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        // decoupled weight decay: applied to the parameter, not folded into the moments
        out[i] = params[i] - lr_now * (m_hat / (std::sqrt(v_hat) + state.eps) +
                                       state.weight_decay * params[i]);
    }
    return out;
}

ModelParams adam_step(AdamState& state, const ModelParams& params, const GradVector& grad,
                      double lr_now) {
    ModelParams out = params;
    out.flat = adam_step(state, params.flat, grad, lr_now);
    return out;
}

double lr_at(const Schedule& schedule, std::size_t step) {
    if (schedule.total_steps == 0) throw std::invalid_argument("lr_at: total_steps must be > 0");
    if (schedule.warmup_proportion < 0.0 || schedule.warmup_proportion > 1.0)
        throw std::invalid_argument("lr_at: warmup_proportion must lie in [0, 1]");
    const double total = static_cast<double>(schedule.total_steps);
    const double warmup_steps = schedule.warmup_proportion * total;
    const double s = static_cast<double>(step);
    if (s >= total) return 0.0;
    if (warmup_steps > 0.0 && s < warmup_steps) return schedule.base_lr * (s / warmup_steps);
    if (total == warmup_steps) return schedule.base_lr;
    return schedule.base_lr * ((total - s) / (total - warmup_steps));
}

}  // namespace suml

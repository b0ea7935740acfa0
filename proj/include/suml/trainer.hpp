#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "suml/data.hpp"
#include "suml/model.hpp"
#include "suml/optim.hpp"
#include "suml/vocab.hpp"

namespace suml {

inline constexpr const char* kCheckpointVersion = "suml-ckpt-v1";

enum class TrainerKind { Erm, Adversarial, Suml };

std::string trainer_kind_name(TrainerKind kind);
TrainerKind trainer_kind_from_name(const std::string& name);

struct TrainConfig {
    double inner_lr = 0.01;              // alpha, inner-loop SGD
    double outer_lr = 1e-5;              // beta, outer/standard Adam base lr
    int inner_updates = 5;               // k inner steps per outer step (>= 2)
    std::size_t inner_batch_size = 8;
    std::size_t meta_test_batch_size = 8;
    std::size_t train_batch_size = 32;   // ERM / adversarial
    int max_epochs = 10;
    int early_stop_patience = 2;         // evaluations without a new best val loss
    double warmup_proportion = 0.06;
    bool lr_schedule = true;             // off: constant outer_lr
    double weight_decay = 0.01;
    double adam_beta2 = 0.99;
    std::optional<double> grad_clip = 1.0;
    double lambda_loss = 0.0;            // adversarial only
    double lambda_enc = 0.0;
    std::uint64_t seed = 0;
    EncodeMode mode = EncodeMode::Full;
    int embed_dim = 32;
    int hidden_dim = 32;
    int max_choices = 3;
    double init_scale = 0.1;
    int max_evals = 0;                   // stop after N evaluations; 0 = no cap (resume hook)

    bool operator==(const TrainConfig&) const = default;
};

struct EvalPoint {
    std::size_t step = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    // adversarial extras; zero elsewhere
    double scorer_loss = 0.0;
    double adv_loss = 0.0;
    double adv_accuracy = 0.0;

    bool operator==(const EvalPoint&) const = default;
};

struct TrainHistory {
    std::vector<EvalPoint> points;
    std::size_t best_step = 0;
    std::string stop_reason;  // "early_stop" | "max_epochs" | "max_evals" | "" while running

    bool operator==(const TrainHistory&) const = default;
};

// Complete mid-run trainer state; serializing it and resuming reproduces an
// uninterrupted run bit-for-bit in single-threaded mode.
struct TrainerState {
    ModelParams params;       // current outer parameters
    ModelParams best_params;  // lowest-val-loss snapshot (the model a checkpoint serves)
    AdamState opt;
    double best_val_loss = 0.0;
    std::size_t best_step = 0;
    int evals_since_best = 0;
    int evals_done = 0;
    std::size_t step = 0;
    int epoch = 0;
    std::string rng_state;
    bool done = false;
    std::string stop_reason;
    TrainHistory history;

    bool operator==(const TrainerState&) const = default;
};

struct Checkpoint {
    std::string version = kCheckpointVersion;
    std::string kind;  // "erm" | "adversarial" | "suml" | "probe"
    Vocab vocab;
    TrainConfig config;
    TrainerState state;

    const ModelParams& model() const { return state.best_params; }

    bool operator==(const Checkpoint&) const = default;
};

struct TrainResult {
    Checkpoint checkpoint;
    TrainHistory history;
};

// Non-finite loss aborts training; the last finite state rides along.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(const std::string& what, Checkpoint last)
        : std::runtime_error(what), last_finite(std::move(last)) {}

    Checkpoint last_finite;
};

// Standard mini-batch Adam training on the CE loss (mode per config),
// lr schedule + weight decay + clip, per-epoch validation, early stopping on
// val loss, best-val checkpoint returned.
TrainResult train_erm(const Dataset& train, const Dataset& val, const Vocab& vocab,
                      const TrainConfig& cfg, const TrainerState* resume = nullptr);

// Same loop over the composite objective L_scorer + lambda_loss * L_Adv with
// the gradient-reversal path; history also records scorer/adversary losses and
// the adversary's choice-only accuracy on val.
TrainResult train_adversarial(const Dataset& train, const Dataset& val, const Vocab& vocab,
                              const TrainConfig& cfg, const TrainerState* resume = nullptr);

// Stochastic-update meta-learning: per outer step, sample a meta-test batch,
// take k inner SGD steps on sampled train batches from theta_0, evaluate the
// meta-test gradient at theta_k (first order), and apply it to theta_0 with
// the outer Adam. Inner parameters never survive the step. meta_test must be
// id-disjoint from train.
TrainResult train_suml(const Dataset& train, const Dataset& meta_test, const Dataset& val,
                       const Vocab& vocab, const TrainConfig& cfg,
                       const TrainerState* resume = nullptr);

// --- SUML stepping engine -------------------------------------------------
//
// The loop above is built on this flat-vector engine; tests drive it directly
// with scalar objectives and a plain-SGD outer rule.

using LossGradFn =
    std::function<std::pair<double, std::vector<double>>(const std::vector<double>& theta)>;
// (theta0, meta_grad) -> theta'
using OuterApplyFn = std::function<std::vector<double>(const std::vector<double>& theta0,
                                                       const std::vector<double>& meta_grad)>;

struct SumlStepResult {
    std::vector<double> theta_after;   // outer parameters after the meta update
    std::vector<double> theta_inner;   // theta_k, discarded by the trainer
    std::vector<double> meta_grad;     // gradient of the meta-test loss at theta_k
    double meta_loss = 0.0;
    double inner_loss_mean = 0.0;
};

SumlStepResult suml_outer_step(const std::vector<double>& theta0, int k, double alpha,
                               const LossGradFn& inner_loss_grad, const LossGradFn& meta_loss_grad,
                               const OuterApplyFn& outer_apply);

// --- checkpoint files -----------------------------------------------------

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// --- contextless probes and the easy/hard split ---------------------------

// One ERM-trained contextless model per seed; each probe re-splits the pool
// 9:1 with its own seed.
std::vector<Checkpoint> train_contextless_probe(const Dataset& pool, const TrainConfig& cfg,
                                                const std::vector<std::uint64_t>& seeds);

struct SplitReport {
    std::vector<std::string> instance_ids;
    std::vector<std::uint64_t> probe_seeds;
    std::vector<std::vector<bool>> correct;  // [probe][instance]
    std::vector<std::string> easy_ids;       // correct under every probe
    std::vector<std::string> hard_ids;       // the complement
};

// easy = instances every probe's contextless argmax (ties -> lowest index)
// solves; applies the tags to a copy of the dataset via apply_split_tags.
SplitReport split_easy_hard(const Dataset& dataset, const std::vector<Checkpoint>& probes);

Dataset apply_split_tags(const Dataset& dataset, const SplitReport& report);

}  // namespace suml

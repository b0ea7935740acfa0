#include "suml/trainer.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>
#include <utility>

#include "suml/serialize.hpp"

namespace suml {

std::string trainer_kind_name(TrainerKind kind) {
    switch (kind) {
        case TrainerKind::Erm: return "erm";
        case TrainerKind::Adversarial: return "adversarial";
        case TrainerKind::Suml: return "suml";
    }
    throw std::logic_error("unreachable trainer kind");
}

TrainerKind trainer_kind_from_name(const std::string& name) {
    if (name == "erm") return TrainerKind::Erm;
    if (name == "adversarial") return TrainerKind::Adversarial;
    if (name == "suml") return TrainerKind::Suml;
    throw std::invalid_argument("unknown trainer kind \"" + name + "\"");
}

SumlStepResult suml_outer_step(const std::vector<double>& theta0, int k, double alpha,
                               const LossGradFn& inner_loss_grad, const LossGradFn& meta_loss_grad,
                               const OuterApplyFn& outer_apply) {
    if (k < 1) throw std::invalid_argument("suml step: k must be >= 1");
    SumlStepResult result;
    std::vector<double> theta = theta0;
    double inner_sum = 0.0;
    const SgdConfig inner_rule{alpha};
    for (int i = 0; i < k; ++i) {
        auto [loss, grad] = inner_loss_grad(theta);
        inner_sum += loss;
        theta = sgd_step(theta, grad, inner_rule);
    }
    result.theta_inner = std::move(theta);
    auto [meta_loss, meta_grad] = meta_loss_grad(result.theta_inner);
    result.meta_loss = meta_loss;
    result.meta_grad = std::move(meta_grad);
    // first order: the meta gradient at theta_k is applied directly to theta_0
    result.theta_after = outer_apply(theta0, result.meta_grad);
    result.inner_loss_mean = inner_sum / k;
    return result;
}

namespace {

int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

struct ValMetrics {
    double loss = 0.0;
    double accuracy = 0.0;
    double scorer_loss = 0.0;
    double adv_loss = 0.0;
    double adv_accuracy = 0.0;
};

ValMetrics compute_val(TrainerKind kind, const ModelParams& params, const Vocab& vocab,
                       const Dataset& val, const TrainConfig& cfg) {
    ValMetrics vm;
    std::span<const Instance> all(val.instances);
    if (kind == TrainerKind::Adversarial) {
        vm.scorer_loss = ce_loss(params, vocab, all, EncodeMode::Full);
        vm.adv_loss = adversary_ce_loss(params, vocab, all);
        vm.loss = vm.scorer_loss;  // early stopping tracks the scorer
        std::size_t adv_hits = 0;
        for (const Instance& instance : val.instances)
            if (argmax_lowest(adversary_logits(params, vocab, instance)) == instance.label)
                ++adv_hits;
        vm.adv_accuracy = static_cast<double>(adv_hits) / val.size();
    } else {
        vm.loss = ce_loss(params, vocab, all, cfg.mode);
    }
    const EncodeMode score_mode = kind == TrainerKind::Adversarial ? EncodeMode::Full : cfg.mode;
    std::size_t hits = 0;
    for (const Instance& instance : val.instances)
        if (argmax_lowest(score_choices(params, vocab, instance, score_mode)) == instance.label)
            ++hits;
    vm.accuracy = static_cast<double>(hits) / val.size();
    return vm;
}

void validate_config(TrainerKind kind, const Dataset& train, const Dataset& val,
                     const Vocab& vocab, const TrainConfig& cfg) {
    if (train.empty()) throw std::invalid_argument("training set must be nonempty");
    if (val.empty()) throw std::invalid_argument("validation set must be nonempty");
    if (vocab.size() < 1) throw std::invalid_argument("vocabulary must be nonempty");
    if (cfg.outer_lr <= 0.0) throw std::invalid_argument("outer_lr must be > 0");
    if (cfg.train_batch_size < 1) throw std::invalid_argument("train_batch_size must be >= 1");
    if (cfg.max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
    if (cfg.early_stop_patience < 0) throw std::invalid_argument("early_stop_patience must be >= 0");
    if (cfg.warmup_proportion < 0.0 || cfg.warmup_proportion > 1.0)
        throw std::invalid_argument("warmup_proportion must lie in [0, 1]");
    if (cfg.embed_dim < 1 || cfg.hidden_dim < 1)
        throw std::invalid_argument("embed_dim and hidden_dim must be >= 1");
    if (cfg.max_choices < 2) throw std::invalid_argument("max_choices must be >= 2");
    if (cfg.max_evals < 0) throw std::invalid_argument("max_evals must be >= 0");
    if (kind == TrainerKind::Suml) {
        if (cfg.inner_updates < 2)
            throw std::invalid_argument(
                "inner_updates must be >= 2: a single-update run is plain training, not the "
                "inner/outer scheme");
        if (cfg.inner_lr <= 0.0) throw std::invalid_argument("inner_lr must be > 0");
        if (cfg.inner_batch_size < 1) throw std::invalid_argument("inner_batch_size must be >= 1");
        if (cfg.meta_test_batch_size < 1)
            throw std::invalid_argument("meta_test_batch_size must be >= 1");
    }
    if (kind == TrainerKind::Adversarial) {
        if (cfg.lambda_loss < 0.0 || cfg.lambda_enc < 0.0)
            throw std::invalid_argument("lambda_loss and lambda_enc must be >= 0");
        for (const Dataset* d : {&train, &val})
            for (const Instance& instance : d->instances)
                if (instance.num_choices() > cfg.max_choices)
                    throw std::invalid_argument("instance " + instance.id + " has " +
                                                std::to_string(instance.num_choices()) +
                                                " choices but max_choices is " +
                                                std::to_string(cfg.max_choices));
    }
}

std::uint64_t loop_rng_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

Checkpoint make_checkpoint(TrainerKind kind, const Vocab& vocab, const TrainConfig& cfg,
                           TrainerState state) {
    Checkpoint cp;
    cp.kind = trainer_kind_name(kind);
    cp.vocab = vocab;
    cp.config = cfg;
    cp.state = std::move(state);
    return cp;
}

TrainResult run_loop(TrainerKind kind, const Dataset& train, const Dataset* meta_test,
                     const Dataset& val, const Vocab& vocab, const TrainConfig& cfg,
                     const TrainerState* resume) {
    validate_config(kind, train, val, vocab, cfg);

    ModelDims dims{vocab.size(), cfg.embed_dim, cfg.hidden_dim, cfg.max_choices};
    const std::size_t consumed_per_step =
        kind == TrainerKind::Suml
            ? static_cast<std::size_t>(cfg.inner_updates) * cfg.inner_batch_size
            : cfg.train_batch_size;
    const std::size_t steps_per_epoch =
        std::max<std::size_t>(1, (train.size() + consumed_per_step - 1) / consumed_per_step);
    const Schedule schedule{steps_per_epoch * static_cast<std::size_t>(cfg.max_epochs),
                            cfg.warmup_proportion, cfg.outer_lr};

    TrainerState state;
    Rng rng(loop_rng_seed(cfg.seed));
    if (resume) {
        state = *resume;
        if (state.params.dims != dims)
            throw std::invalid_argument("resume state does not match the model shape");
        rng = Rng::deserialize(state.rng_state);
        // a cap-stopped state may continue under a laxer cap
        if (state.done && (state.stop_reason == "max_evals" ||
                           (state.stop_reason == "max_epochs" && state.epoch < cfg.max_epochs))) {
            state.done = false;
            state.stop_reason.clear();
        }
    } else {
        state.params = init_params(dims, cfg.seed, cfg.init_scale);
        state.best_params = state.params;
        state.opt = make_adam_state(dims.total(), cfg.outer_lr, cfg.adam_beta2, cfg.weight_decay,
                                    cfg.grad_clip);
        state.best_val_loss = std::numeric_limits<double>::max();
        state.rng_state = rng.serialize();
    }

    auto abort_divergent = [&](const std::string& what) {
        state.rng_state = rng.serialize();
        state.history.best_step = state.best_step;
        throw DivergenceError(what, make_checkpoint(kind, vocab, cfg, state));
    };

    auto do_step = [&](double lr_now) -> double {
        if (kind == TrainerKind::Suml) {
            auto meta_batch = sample_batch(*meta_test, cfg.meta_test_batch_size, rng);
            LossGradFn inner = [&](const std::vector<double>& theta) {
                auto batch = sample_batch(train, cfg.inner_batch_size, rng);
                LossGrad lg = ce_loss_and_grad(ModelParams{dims, theta}, vocab, batch, cfg.mode);
                if (!std::isfinite(lg.loss))
                    abort_divergent("inner loss became non-finite at step " +
                                    std::to_string(state.step));
                return std::make_pair(lg.loss, std::move(lg.grad));
            };
            LossGradFn meta = [&](const std::vector<double>& theta) {
                LossGrad lg = ce_loss_and_grad(ModelParams{dims, theta}, vocab,
                                               std::span<const Instance>(meta_batch), cfg.mode);
                if (!std::isfinite(lg.loss))
                    abort_divergent("meta-test loss became non-finite at step " +
                                    std::to_string(state.step));
                return std::make_pair(lg.loss, std::move(lg.grad));
            };
            OuterApplyFn outer = [&](const std::vector<double>& theta0,
                                     const std::vector<double>& meta_grad) {
                return adam_step(state.opt, theta0, meta_grad, lr_now);
            };
            SumlStepResult r = suml_outer_step(state.params.flat, cfg.inner_updates, cfg.inner_lr,
                                               inner, meta, outer);
            state.params.flat = std::move(r.theta_after);
            return r.meta_loss;
        }
        auto batch = sample_batch(train, cfg.train_batch_size, rng);
        if (kind == TrainerKind::Adversarial) {
            AdvLossGrad alg = adversarial_loss_and_grad(state.params, vocab, batch,
                                                        cfg.lambda_loss, cfg.lambda_enc);
            if (!std::isfinite(alg.total))
                abort_divergent("training loss became non-finite at step " +
                                std::to_string(state.step));
            state.params = adam_step(state.opt, state.params, alg.grad, lr_now);
            return alg.total;
        }
        LossGrad lg = ce_loss_and_grad(state.params, vocab, batch, cfg.mode);
        if (!std::isfinite(lg.loss))
            abort_divergent("training loss became non-finite at step " + std::to_string(state.step));
        state.params = adam_step(state.opt, state.params, lg.grad, lr_now);
        return lg.loss;
    };

    auto stop = [&](const char* reason) {
        state.done = true;
        state.stop_reason = reason;
    };
    auto check_stops = [&] {
        if (cfg.early_stop_patience > 0 && state.evals_since_best >= cfg.early_stop_patience)
            stop("early_stop");
        else if (state.epoch >= cfg.max_epochs)
            stop("max_epochs");
        else if (cfg.max_evals > 0 && state.evals_done >= cfg.max_evals)
            stop("max_evals");
    };
    if (!state.done) {
        if (state.epoch >= cfg.max_epochs)
            stop("max_epochs");
        else if (cfg.max_evals > 0 && state.evals_done >= cfg.max_evals)
            stop("max_evals");
    }

    while (!state.done) {
        double loss_sum = 0.0;
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            const double lr_now = cfg.lr_schedule ? lr_at(schedule, state.step) : cfg.outer_lr;
            loss_sum += do_step(lr_now);
            ++state.step;
        }
        ++state.epoch;

        ValMetrics vm = compute_val(kind, state.params, vocab, val, cfg);
        if (!std::isfinite(vm.loss))
            abort_divergent("validation loss became non-finite after epoch " +
                            std::to_string(state.epoch));
        EvalPoint point;
        point.step = state.step;
        point.train_loss = loss_sum / static_cast<double>(steps_per_epoch);
        point.val_loss = vm.loss;
        point.val_accuracy = vm.accuracy;
        point.scorer_loss = vm.scorer_loss;
        point.adv_loss = vm.adv_loss;
        point.adv_accuracy = vm.adv_accuracy;
        state.history.points.push_back(point);
        ++state.evals_done;
        if (vm.loss < state.best_val_loss) {
            state.best_val_loss = vm.loss;
            state.best_params = state.params;
            state.best_step = state.step;
            state.evals_since_best = 0;
        } else {
            ++state.evals_since_best;
        }
        state.rng_state = rng.serialize();
        check_stops();
    }

    state.history.best_step = state.best_step;
    state.history.stop_reason = state.stop_reason;
    TrainHistory history = state.history;
    return TrainResult{make_checkpoint(kind, vocab, cfg, std::move(state)), std::move(history)};
}

}  // namespace

TrainResult train_erm(const Dataset& train, const Dataset& val, const Vocab& vocab,
                      const TrainConfig& cfg, const TrainerState* resume) {
    return run_loop(TrainerKind::Erm, train, nullptr, val, vocab, cfg, resume);
}

TrainResult train_adversarial(const Dataset& train, const Dataset& val, const Vocab& vocab,
                              const TrainConfig& cfg, const TrainerState* resume) {
    return run_loop(TrainerKind::Adversarial, train, nullptr, val, vocab, cfg, resume);
}

TrainResult train_suml(const Dataset& train, const Dataset& meta_test, const Dataset& val,
                       const Vocab& vocab, const TrainConfig& cfg, const TrainerState* resume) {
    if (meta_test.empty()) throw std::invalid_argument("meta-test set must be nonempty");
    auto train_ids = id_set(train);
    for (const Instance& instance : meta_test.instances)
        if (train_ids.contains(instance.id))
            throw std::invalid_argument("meta-test instance " + instance.id +
                                        " also appears in the training set");
    return run_loop(TrainerKind::Suml, train, &meta_test, val, vocab, cfg, resume);
}

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
    write_json_file(checkpoint_to_json(cp), path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return checkpoint_from_json(read_json_file(path));
}

std::vector<Checkpoint> train_contextless_probe(const Dataset& pool, const TrainConfig& cfg,
                                                const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("probe training needs at least one seed");
    Vocab vocab = build_vocab({&pool}, 1);
    std::vector<Checkpoint> probes;
    probes.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        TrainConfig probe_cfg = cfg;
        probe_cfg.seed = seed;
        probe_cfg.mode = EncodeMode::Contextless;
        auto [probe_train, probe_val] = train_val_split(pool, SplitSpec{0.1, seed});
        TrainResult result = train_erm(probe_train, probe_val, vocab, probe_cfg);
        result.checkpoint.kind = "probe";
        probes.push_back(std::move(result.checkpoint));
    }
    return probes;
}

SplitReport split_easy_hard(const Dataset& dataset, const std::vector<Checkpoint>& probes) {
    if (probes.empty()) throw std::invalid_argument("split needs at least one probe");
    SplitReport report;
    report.instance_ids.reserve(dataset.size());
    for (const Instance& instance : dataset.instances) report.instance_ids.push_back(instance.id);
    for (const Checkpoint& probe : probes) {
        report.probe_seeds.push_back(probe.config.seed);
        std::vector<bool> row;
        row.reserve(dataset.size());
        for (const Instance& instance : dataset.instances) {
            auto logits =
                score_choices(probe.model(), probe.vocab, instance, EncodeMode::Contextless);
            row.push_back(argmax_lowest(logits) == instance.label);
        }
        report.correct.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        bool all_correct = true;
        for (const auto& row : report.correct) all_correct = all_correct && row[i];
        (all_correct ? report.easy_ids : report.hard_ids).push_back(report.instance_ids[i]);
    }
    return report;
}

Dataset apply_split_tags(const Dataset& dataset, const SplitReport& report) {
    std::unordered_set<std::string> easy(report.easy_ids.begin(), report.easy_ids.end());
    std::unordered_set<std::string> hard(report.hard_ids.begin(), report.hard_ids.end());
    Dataset out = dataset;
    for (Instance& instance : out.instances) {
        if (easy.contains(instance.id))
            instance.subset_tag = SubsetTag::Easy;
        else if (hard.contains(instance.id))
            instance.subset_tag = SubsetTag::Hard;
    }
    return out;
}

}  // namespace suml

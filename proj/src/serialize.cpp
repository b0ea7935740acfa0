#include "suml/serialize.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace suml {

namespace {

void require_fields(const Json& j, std::initializer_list<const char*> fields) {
    if (!j.is_object()) throw std::runtime_error("expected a JSON object");
    for (const char* f : fields)
        if (!j.contains(f)) throw std::runtime_error(std::string("missing field \"") + f + "\"");
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument(what + ": unknown key \"" + it.key() + "\"");
    }
}

std::string encode_mode_name(EncodeMode mode) {
    return mode == EncodeMode::Full ? "full" : "contextless";
}

EncodeMode encode_mode_from_name(const std::string& name) {
    if (name == "full") return EncodeMode::Full;
    if (name == "contextless") return EncodeMode::Contextless;
    throw std::invalid_argument("unknown encode mode \"" + name + "\"");
}

Json counts_to_json(const SubsetCounts& counts) {
    Json j = Json::object();
    j["correct"] = counts.correct;
    j["total"] = counts.total;
    j["accuracy"] = counts.accuracy();
    return j;
}

SubsetCounts counts_from_json(const Json& j) {
    require_fields(j, {"correct", "total"});
    SubsetCounts counts;
    counts.correct = j.at("correct").get<std::size_t>();
    counts.total = j.at("total").get<std::size_t>();
    return counts;
}

Json params_to_json(const ModelParams& params) {
    Json j = Json::object();
    j["vocab"] = params.dims.vocab;
    j["embed"] = params.dims.embed;
    j["hidden"] = params.dims.hidden;
    j["max_choices"] = params.dims.max_choices;
    j["flat"] = params.flat;
    return j;
}

ModelParams params_from_json(const Json& j) {
    require_fields(j, {"vocab", "embed", "hidden", "max_choices", "flat"});
    ModelParams params;
    params.dims.vocab = j.at("vocab").get<int>();
    params.dims.embed = j.at("embed").get<int>();
    params.dims.hidden = j.at("hidden").get<int>();
    params.dims.max_choices = j.at("max_choices").get<int>();
    params.flat = j.at("flat").get<std::vector<double>>();
    if (params.flat.size() != params.dims.total())
        throw std::runtime_error("parameter vector length " + std::to_string(params.flat.size()) +
                                 " does not match the declared shape (" +
                                 std::to_string(params.dims.total()) + ")");
    return params;
}

Json adam_to_json(const AdamState& state) {
    Json j = Json::object();
    j["t"] = state.t;
    j["m"] = state.m;
    j["v"] = state.v;
    j["beta1"] = state.beta1;
    j["beta2"] = state.beta2;
    j["eps"] = state.eps;
    j["base_lr"] = state.base_lr;
    j["weight_decay"] = state.weight_decay;
    if (state.grad_clip)
        j["grad_clip"] = *state.grad_clip;
    else
        j["grad_clip"] = nullptr;
    return j;
}

AdamState adam_from_json(const Json& j) {
    require_fields(j, {"t", "m", "v", "beta1", "beta2", "eps", "base_lr", "weight_decay",
                       "grad_clip"});
    AdamState state;
    state.t = j.at("t").get<std::size_t>();
    state.m = j.at("m").get<std::vector<double>>();
    state.v = j.at("v").get<std::vector<double>>();
    state.beta1 = j.at("beta1").get<double>();
    state.beta2 = j.at("beta2").get<double>();
    state.eps = j.at("eps").get<double>();
    state.base_lr = j.at("base_lr").get<double>();
    state.weight_decay = j.at("weight_decay").get<double>();
    if (!j.at("grad_clip").is_null()) state.grad_clip = j.at("grad_clip").get<double>();
    return state;
}

Json eval_point_to_json(const EvalPoint& p) {
    Json j = Json::object();
    j["step"] = p.step;
    j["train_loss"] = p.train_loss;
    j["val_loss"] = p.val_loss;
    j["val_accuracy"] = p.val_accuracy;
    j["scorer_loss"] = p.scorer_loss;
    j["adv_loss"] = p.adv_loss;
    j["adv_accuracy"] = p.adv_accuracy;
    return j;
}

EvalPoint eval_point_from_json(const Json& j) {
    require_fields(j, {"step", "train_loss", "val_loss", "val_accuracy"});
    EvalPoint p;
    p.step = j.at("step").get<std::size_t>();
    p.train_loss = j.at("train_loss").get<double>();
    p.val_loss = j.at("val_loss").get<double>();
    p.val_accuracy = j.at("val_accuracy").get<double>();
    p.scorer_loss = j.value("scorer_loss", 0.0);
    p.adv_loss = j.value("adv_loss", 0.0);
    p.adv_accuracy = j.value("adv_accuracy", 0.0);
    return p;
}

Json trainer_state_to_json(const TrainerState& state) {
    Json j = Json::object();
    j["params"] = params_to_json(state.params);
    j["best_params"] = params_to_json(state.best_params);
    j["opt"] = adam_to_json(state.opt);
    j["best_val_loss"] = state.best_val_loss;
    j["best_step"] = state.best_step;
    j["evals_since_best"] = state.evals_since_best;
    j["evals_done"] = state.evals_done;
    j["step"] = state.step;
    j["epoch"] = state.epoch;
    j["rng_state"] = state.rng_state;
    j["done"] = state.done;
    j["stop_reason"] = state.stop_reason;
    j["history"] = history_to_json(state.history);
    return j;
}

TrainerState trainer_state_from_json(const Json& j) {
    require_fields(j, {"params", "best_params", "opt", "best_val_loss", "best_step",
                       "evals_since_best", "evals_done", "step", "epoch", "rng_state", "done",
                       "stop_reason", "history"});
    TrainerState state;
    state.params = params_from_json(j.at("params"));
    state.best_params = params_from_json(j.at("best_params"));
    state.opt = adam_from_json(j.at("opt"));
    state.best_val_loss = j.at("best_val_loss").get<double>();
    state.best_step = j.at("best_step").get<std::size_t>();
    state.evals_since_best = j.at("evals_since_best").get<int>();
    state.evals_done = j.at("evals_done").get<int>();
    state.step = j.at("step").get<std::size_t>();
    state.epoch = j.at("epoch").get<int>();
    state.rng_state = j.at("rng_state").get<std::string>();
    state.done = j.at("done").get<bool>();
    state.stop_reason = j.at("stop_reason").get<std::string>();
    state.history = history_from_json(j.at("history"));
    return state;
}

}  // namespace

Json instance_to_json(const Instance& instance) {
    Json j = Json::object();
    j["id"] = instance.id;
    j["context"] = instance.context;
    if (instance.ask_kind) j["ask_kind"] = *instance.ask_kind;
    j["choices"] = instance.choices;
    j["label"] = instance.label;
    if (instance.subset_tag) j["subset_tag"] = subset_tag_name(*instance.subset_tag);
    if (instance.cue_meta) {
        Json meta = Json::object();
        meta["cue_token"] = instance.cue_meta->cue_token;
        meta["cued"] = instance.cue_meta->cued;
        j["cue_meta"] = meta;
    }
    return j;
}

Instance instance_from_json(const Json& j) {
    require_fields(j, {"id", "context", "choices", "label"});
    Instance instance;
    instance.id = j.at("id").get<std::string>();
    instance.context = j.at("context").get<std::string>();
    if (j.contains("ask_kind")) instance.ask_kind = j.at("ask_kind").get<std::string>();
    instance.choices = j.at("choices").get<std::vector<std::string>>();
    instance.label = j.at("label").get<int>();
    if (j.contains("subset_tag"))
        instance.subset_tag = subset_tag_from_name(j.at("subset_tag").get<std::string>());
    if (j.contains("cue_meta")) {
        const Json& meta = j.at("cue_meta");
        require_fields(meta, {"cue_token", "cued"});
        instance.cue_meta = CueMeta{meta.at("cue_token").get<std::string>(),
                                    meta.at("cued").get<bool>()};
    }
    return instance;
}

Json gen_config_to_json(const GenConfig& cfg) {
    Json j = Json::object();
    j["n_train"] = cfg.n_train;
    j["n_test_easy"] = cfg.n_test_easy;
    j["n_test_hard"] = cfg.n_test_hard;
    j["m"] = cfg.m;
    j["content_vocab"] = cfg.content_vocab;
    j["filler_vocab"] = cfg.filler_vocab;
    j["cue_token"] = cfg.cue_token;
    j["cue_rate"] = cfg.cue_rate;
    j["rule_strength"] = cfg.rule_strength;
    j["seed"] = cfg.seed;
    return j;
}

GenConfig gen_config_from_json(const Json& j, bool strict) {
    if (!j.is_object()) throw std::invalid_argument("generator config must be a JSON object");
    if (strict)
        reject_unknown_keys(j,
                            {"n_train", "n_test_easy", "n_test_hard", "m", "content_vocab",
                             "filler_vocab", "cue_token", "cue_rate", "rule_strength", "seed"},
                            "generator config");
    GenConfig cfg;
    cfg.n_train = j.value("n_train", cfg.n_train);
    cfg.n_test_easy = j.value("n_test_easy", cfg.n_test_easy);
    cfg.n_test_hard = j.value("n_test_hard", cfg.n_test_hard);
    cfg.m = j.value("m", cfg.m);
    cfg.content_vocab = j.value("content_vocab", cfg.content_vocab);
    cfg.filler_vocab = j.value("filler_vocab", cfg.filler_vocab);
    cfg.cue_token = j.value("cue_token", cfg.cue_token);
    cfg.cue_rate = j.value("cue_rate", cfg.cue_rate);
    cfg.rule_strength = j.value("rule_strength", cfg.rule_strength);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

Json train_config_to_json(const TrainConfig& cfg) {
    Json j = Json::object();
    j["inner_lr"] = cfg.inner_lr;
    j["outer_lr"] = cfg.outer_lr;
    j["inner_updates"] = cfg.inner_updates;
    j["inner_batch_size"] = cfg.inner_batch_size;
    j["meta_test_batch_size"] = cfg.meta_test_batch_size;
    j["train_batch_size"] = cfg.train_batch_size;
    j["max_epochs"] = cfg.max_epochs;
    j["early_stop_patience"] = cfg.early_stop_patience;
    j["warmup_proportion"] = cfg.warmup_proportion;
    j["lr_schedule"] = cfg.lr_schedule;
    j["weight_decay"] = cfg.weight_decay;
    j["adam_beta2"] = cfg.adam_beta2;
    if (cfg.grad_clip)
        j["grad_clip"] = *cfg.grad_clip;
    else
        j["grad_clip"] = nullptr;
    j["lambda_loss"] = cfg.lambda_loss;
    j["lambda_enc"] = cfg.lambda_enc;
    j["seed"] = cfg.seed;
    j["mode"] = encode_mode_name(cfg.mode);
    j["embed_dim"] = cfg.embed_dim;
    j["hidden_dim"] = cfg.hidden_dim;
    j["max_choices"] = cfg.max_choices;
    j["init_scale"] = cfg.init_scale;
    j["max_evals"] = cfg.max_evals;
    return j;
}

TrainConfig train_config_from_json(const Json& j, bool strict) {
    if (!j.is_object()) throw std::invalid_argument("train config must be a JSON object");
    if (strict)
        reject_unknown_keys(
            j,
            {"inner_lr", "outer_lr", "inner_updates", "inner_batch_size", "meta_test_batch_size",
             "train_batch_size", "max_epochs", "early_stop_patience", "warmup_proportion",
             "lr_schedule", "weight_decay", "adam_beta2", "grad_clip", "lambda_loss", "lambda_enc",
             "seed", "mode", "embed_dim", "hidden_dim", "max_choices", "init_scale", "max_evals"},
            "train config");
    TrainConfig cfg;
    cfg.inner_lr = j.value("inner_lr", cfg.inner_lr);
    cfg.outer_lr = j.value("outer_lr", cfg.outer_lr);
    cfg.inner_updates = j.value("inner_updates", cfg.inner_updates);
    cfg.inner_batch_size = j.value("inner_batch_size", cfg.inner_batch_size);
    cfg.meta_test_batch_size = j.value("meta_test_batch_size", cfg.meta_test_batch_size);
    cfg.train_batch_size = j.value("train_batch_size", cfg.train_batch_size);
    cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
    cfg.early_stop_patience = j.value("early_stop_patience", cfg.early_stop_patience);
    cfg.warmup_proportion = j.value("warmup_proportion", cfg.warmup_proportion);
    cfg.lr_schedule = j.value("lr_schedule", cfg.lr_schedule);
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    cfg.adam_beta2 = j.value("adam_beta2", cfg.adam_beta2);
    if (j.contains("grad_clip")) {
        if (j.at("grad_clip").is_null())
            cfg.grad_clip.reset();
        else
            cfg.grad_clip = j.at("grad_clip").get<double>();
    }
    cfg.lambda_loss = j.value("lambda_loss", cfg.lambda_loss);
    cfg.lambda_enc = j.value("lambda_enc", cfg.lambda_enc);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("mode")) cfg.mode = encode_mode_from_name(j.at("mode").get<std::string>());
    cfg.embed_dim = j.value("embed_dim", cfg.embed_dim);
    cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
    cfg.max_choices = j.value("max_choices", cfg.max_choices);
    cfg.init_scale = j.value("init_scale", cfg.init_scale);
    cfg.max_evals = j.value("max_evals", cfg.max_evals);
    return cfg;
}

Json checkpoint_to_json(const Checkpoint& cp) {
    Json j = Json::object();
    j["version"] = cp.version;
    j["kind"] = cp.kind;
    j["vocab"] = cp.vocab.tokens;
    j["config"] = train_config_to_json(cp.config);
    j["state"] = trainer_state_to_json(cp.state);
    return j;
}

Checkpoint checkpoint_from_json(const Json& j) {
    require_fields(j, {"version", "kind", "vocab", "config", "state"});
    const std::string version = j.at("version").get<std::string>();
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version \"" + version +
                                 "\"; this build reads \"" + kCheckpointVersion + "\"");
    Checkpoint cp;
    cp.version = version;
    cp.kind = j.at("kind").get<std::string>();
    cp.vocab = vocab_from_tokens(j.at("vocab").get<std::vector<std::string>>());
    cp.config = train_config_from_json(j.at("config"), /*strict=*/false);
    cp.state = trainer_state_from_json(j.at("state"));
    return cp;
}

Json history_to_json(const TrainHistory& history) {
    Json j = Json::object();
    Json points = Json::array();
    for (const EvalPoint& p : history.points) points.push_back(eval_point_to_json(p));
    j["points"] = points;
    j["best_step"] = history.best_step;
    j["stop_reason"] = history.stop_reason;
    return j;
}

TrainHistory history_from_json(const Json& j) {
    require_fields(j, {"points", "best_step", "stop_reason"});
    TrainHistory history;
    for (const Json& p : j.at("points")) history.points.push_back(eval_point_from_json(p));
    history.best_step = j.at("best_step").get<std::size_t>();
    history.stop_reason = j.at("stop_reason").get<std::string>();
    return history;
}

Json cue_report_to_json(const CueReport& report) {
    Json j = Json::object();
    j["dataset"] = report.dataset_name;
    j["n"] = report.n;
    j["min_applicability"] = report.min_applicability;
    j["random_baseline"] = report.random_baseline;
    Json probes = Json::array();
    for (const auto& [seed, accuracy] : report.probe_accuracies) {
        Json p = Json::object();
        p["seed"] = seed;
        p["accuracy"] = accuracy;
        probes.push_back(p);
    }
    j["probe_accuracies"] = probes;
    Json tokens = Json::array();
    for (const TokenStats& stats : report.ranked) {
        Json t = Json::object();
        t["token"] = stats.token;
        t["applicability"] = stats.applicability;
        t["productive_count"] = stats.productive_count;
        if (stats.productivity)
            t["productivity"] = *stats.productivity;
        else
            t["productivity"] = nullptr;
        t["coverage"] = stats.coverage;
        tokens.push_back(t);
    }
    j["tokens"] = tokens;
    return j;
}

CueReport cue_report_from_json(const Json& j) {
    require_fields(j, {"dataset", "n", "min_applicability", "random_baseline", "probe_accuracies",
                       "tokens"});
    CueReport report;
    report.dataset_name = j.at("dataset").get<std::string>();
    report.n = j.at("n").get<std::size_t>();
    report.min_applicability = j.at("min_applicability").get<std::size_t>();
    report.random_baseline = j.at("random_baseline").get<double>();
    for (const Json& p : j.at("probe_accuracies"))
        report.probe_accuracies.emplace_back(p.at("seed").get<std::uint64_t>(),
                                             p.at("accuracy").get<double>());
    for (const Json& t : j.at("tokens")) {
        TokenStats stats;
        stats.token = t.at("token").get<std::string>();
        stats.applicability = t.at("applicability").get<std::size_t>();
        stats.productive_count = t.at("productive_count").get<std::size_t>();
        if (!t.at("productivity").is_null()) stats.productivity = t.at("productivity").get<double>();
        stats.coverage = t.at("coverage").get<double>();
        report.ranked.push_back(std::move(stats));
    }
    return report;
}

Json split_report_to_json(const SplitReport& report) {
    Json j = Json::object();
    j["instance_ids"] = report.instance_ids;
    j["probe_seeds"] = report.probe_seeds;
    Json correct = Json::array();
    for (const auto& row : report.correct) correct.push_back(row);
    j["correct"] = correct;
    j["easy_ids"] = report.easy_ids;
    j["hard_ids"] = report.hard_ids;
    j["n_easy"] = report.easy_ids.size();
    j["n_hard"] = report.hard_ids.size();
    return j;
}

SplitReport split_report_from_json(const Json& j) {
    require_fields(j, {"instance_ids", "probe_seeds", "correct", "easy_ids", "hard_ids"});
    SplitReport report;
    report.instance_ids = j.at("instance_ids").get<std::vector<std::string>>();
    report.probe_seeds = j.at("probe_seeds").get<std::vector<std::uint64_t>>();
    for (const Json& row : j.at("correct")) report.correct.push_back(row.get<std::vector<bool>>());
    report.easy_ids = j.at("easy_ids").get<std::vector<std::string>>();
    report.hard_ids = j.at("hard_ids").get<std::vector<std::string>>();
    return report;
}

Json eval_report_to_json(const EvalReport& report) {
    Json j = Json::object();
    j["dataset"] = report.dataset_name;
    j["model"] = report.model_id;
    j["seed"] = report.seed;
    j["easy"] = counts_to_json(report.easy);
    j["hard"] = counts_to_json(report.hard);
    j["unknown"] = counts_to_json(report.unknown);
    j["overall"] = counts_to_json(report.overall);
    Json per_instance = Json::array();
    for (const PredictionRecord& r : report.per_instance) {
        Json p = Json::object();
        p["id"] = r.id;
        p["predicted"] = r.predicted;
        p["correct"] = r.correct;
        p["tag"] = subset_tag_name(r.tag);
        per_instance.push_back(p);
    }
    j["per_instance"] = per_instance;
    return j;
}

EvalReport eval_report_from_json(const Json& j) {
    require_fields(j, {"dataset", "model", "seed", "easy", "hard", "unknown", "overall",
                       "per_instance"});
    EvalReport report;
    report.dataset_name = j.at("dataset").get<std::string>();
    report.model_id = j.at("model").get<std::string>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.easy = counts_from_json(j.at("easy"));
    report.hard = counts_from_json(j.at("hard"));
    report.unknown = counts_from_json(j.at("unknown"));
    report.overall = counts_from_json(j.at("overall"));
    for (const Json& p : j.at("per_instance")) {
        PredictionRecord r;
        r.id = p.at("id").get<std::string>();
        r.predicted = p.at("predicted").get<int>();
        r.correct = p.at("correct").get<bool>();
        r.tag = subset_tag_from_name(p.at("tag").get<std::string>());
        report.per_instance.push_back(std::move(r));
    }
    return report;
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace suml

#include "suml/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>

#include "suml/cue_stats.hpp"
#include "suml/synthetic.hpp"
#include "suml/text.hpp"

namespace suml {

namespace fs = std::filesystem;

namespace {

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known) throw std::invalid_argument(what + ": unknown key \"" + it.key() + "\"");
    }
}

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

// run-<timestamp>-<seed> plus a refreshed "latest" link; --out overrides.
fs::path resolve_out(const CommonOpts& opts, std::uint64_t seed) {
    if (opts.out) {
        fs::create_directories(*opts.out);
        return *opts.out;
    }
    const std::string base = "run-" + timestamp_utc() + "-" + std::to_string(seed);
    fs::path dir = base;
    for (int suffix = 2; fs::exists(dir); ++suffix)
        dir = base + "-" + std::to_string(suffix);
    fs::create_directories(dir);
    try {
        const fs::path link = "latest";
        if (fs::is_symlink(link)) fs::remove(link);
        fs::create_directory_symlink(dir, link);
    } catch (const fs::filesystem_error&) {
        // the link is a convenience; filesystems without symlinks skip it
    }
    return dir;
}

// single-object record file (same line syntax as the dataset files)
void write_record_file(const Json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

int report_threads() {
    const char* env = std::getenv("SUML_THREADS");
    if (!env || !*env) return 1;
    const int n = std::atoi(env);
    return n < 1 ? 1 : n;
}

TrainConfig probe_defaults() {
    TrainConfig cfg;
    cfg.outer_lr = 3e-3;
    cfg.train_batch_size = 32;
    cfg.max_epochs = 10;
    cfg.early_stop_patience = 3;
    cfg.mode = EncodeMode::Contextless;
    return cfg;
}

struct TrainInputs {
    TrainerKind kind = TrainerKind::Erm;
    Dataset train;
    Dataset val;
    Dataset meta_test;
    TrainConfig cfg;
    Json resolved;  // snapshot written into the run directory
};

TrainInputs load_train_inputs(const Json& j, const CommonOpts& opts) {
    reject_unknown_keys(j, {"kind", "train_data", "val_data", "meta_test_data", "train"},
                        "train config");
    if (!j.contains("kind")) throw std::invalid_argument("train config: missing \"kind\"");
    if (!j.contains("train_data")) throw std::invalid_argument("train config: missing \"train_data\"");

    TrainInputs in;
    in.kind = trainer_kind_from_name(j.at("kind").get<std::string>());
    in.cfg = train_config_from_json(j.value("train", Json::object()));
    if (opts.seed) in.cfg.seed = *opts.seed;

    in.train = load_jsonl(j.at("train_data").get<std::string>());
    if (j.contains("val_data")) {
        in.val = load_jsonl(j.at("val_data").get<std::string>());
    } else {
        auto [tr, val] = train_val_split(in.train, SplitSpec{0.1, in.cfg.seed});
        in.train = std::move(tr);
        in.val = std::move(val);
    }
    if (in.kind == TrainerKind::Suml) {
        if (!j.contains("meta_test_data"))
            throw std::invalid_argument("train config: kind=suml needs \"meta_test_data\"");
        in.meta_test = load_jsonl(j.at("meta_test_data").get<std::string>());
    } else if (j.contains("meta_test_data")) {
        throw std::invalid_argument("train config: \"meta_test_data\" only applies to kind=suml");
    }

    in.resolved = Json::object();
    in.resolved["kind"] = trainer_kind_name(in.kind);
    in.resolved["train_data"] = j.at("train_data");
    if (j.contains("val_data")) in.resolved["val_data"] = j.at("val_data");
    if (j.contains("meta_test_data")) in.resolved["meta_test_data"] = j.at("meta_test_data");
    in.resolved["train"] = train_config_to_json(in.cfg);
    return in;
}

TrainResult run_training(const TrainInputs& in) {
    std::vector<const Dataset*> corpora{&in.train, &in.val};
    if (in.kind == TrainerKind::Suml) corpora.push_back(&in.meta_test);
    Vocab vocab = build_vocab(corpora, 1);
    switch (in.kind) {
        case TrainerKind::Erm: return train_erm(in.train, in.val, vocab, in.cfg);
        case TrainerKind::Adversarial:
            return train_adversarial(in.train, in.val, vocab, in.cfg);
        case TrainerKind::Suml:
            return train_suml(in.train, in.meta_test, in.val, vocab, in.cfg);
    }
    throw std::logic_error("unreachable trainer kind");
}

}  // namespace

int cmd_gen(const fs::path& config_path, const CommonOpts& opts) {
    GenConfig cfg = gen_config_from_json(read_json_file(config_path));
    if (opts.seed) cfg.seed = *opts.seed;
    const fs::path out = resolve_out(opts, cfg.seed);

    SyntheticData data = generate_synthetic(cfg);
    save_jsonl(data.train, out / "train.jsonl");
    save_jsonl(data.test_easy, out / "test_easy.jsonl");
    save_jsonl(data.test_hard, out / "test_hard.jsonl");
    write_json_file(gen_config_to_json(cfg), out / "resolved_config.json");

    std::size_t cued = 0;
    for (const Instance& instance : data.train.instances)
        if (instance.cue_meta && instance.cue_meta->cued) ++cued;
    Json manifest = Json::object();
    manifest["seed"] = cfg.seed;
    manifest["config"] = gen_config_to_json(cfg);
    manifest["n_train"] = data.train.size();
    manifest["n_test_easy"] = data.test_easy.size();
    manifest["n_test_hard"] = data.test_hard.size();
    manifest["cued_fraction"] =
        data.train.empty() ? 0.0 : static_cast<double>(cued) / data.train.size();
    Json cue = Json::object();
    cue["token"] = cfg.cue_token;
    cue["applicability"] = applicability(data.train, cfg.cue_token);
    auto pi = productivity(data.train, cfg.cue_token);
    if (pi)
        cue["productivity"] = *pi;
    else
        cue["productivity"] = nullptr;
    cue["coverage"] = data.train.empty()
                          ? 0.0
                          : static_cast<double>(applicability(data.train, cfg.cue_token)) /
                                data.train.size();
    manifest["cue"] = cue;
    write_json_file(manifest, out / "manifest.json");

    std::cout << "gen: wrote " << data.train.size() << "/" << data.test_easy.size() << "/"
              << data.test_hard.size() << " instances to " << out.string() << "\n";
    return kExitOk;
}

int cmd_analyze(const fs::path& dataset_path, std::size_t top_k, const CommonOpts& opts) {
    Dataset dataset = load_jsonl(dataset_path);
    CueReport report = cue_report(dataset, top_k);
    const fs::path out = resolve_out(opts, opts.seed.value_or(0));
    write_record_file(cue_report_to_json(report), out / "cue_report.json");

    std::cout << "cue report: " << report.dataset_name << " n=" << report.n
              << " baseline=" << std::fixed << std::setprecision(3) << report.random_baseline
              << "\n";
    std::cout << std::left << std::setw(6) << "rank" << std::setw(16) << "token" << std::setw(14)
              << "productivity" << std::setw(10) << "coverage" << "applicability\n";
    for (std::size_t i = 0; i < report.ranked.size(); ++i) {
        const TokenStats& stats = report.ranked[i];
        std::cout << std::left << std::setw(6) << i + 1 << std::setw(16) << stats.token
                  << std::setw(14) << std::fixed << std::setprecision(3)
                  << stats.productivity.value_or(0.0) << std::setw(10) << stats.coverage
                  << stats.applicability << "\n";
    }
    std::cout << "report file: " << (out / "cue_report.json").string() << "\n";
    return kExitOk;
}

int cmd_split(const fs::path& train_path, const fs::path& eval_path, int n_seeds,
              const CommonOpts& opts) {
    if (n_seeds < 1) throw std::invalid_argument("split: --seeds must be >= 1");
    Dataset pool = load_jsonl(train_path);
    Dataset eval_set = load_jsonl(eval_path);
    const std::uint64_t base_seed = opts.seed.value_or(0);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < n_seeds; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));

    const fs::path out = resolve_out(opts, base_seed);
    std::vector<Checkpoint> probes = train_contextless_probe(pool, probe_defaults(), seeds);
    SplitReport report = split_easy_hard(eval_set, probes);
    Dataset tagged = apply_split_tags(eval_set, report);

    write_record_file(split_report_to_json(report), out / "split_report.json");
    const fs::path tagged_path = out / (eval_path.stem().string() + "_tagged.jsonl");
    save_jsonl(tagged, tagged_path);

    std::cout << "split: " << report.easy_ids.size() << " easy / " << report.hard_ids.size()
              << " hard over " << report.instance_ids.size() << " instances (" << n_seeds
              << " probes)\n";
    std::cout << "tagged copy: " << tagged_path.string() << "\n";
    return kExitOk;
}

int cmd_train(const fs::path& config_path, const CommonOpts& opts) {
    TrainInputs in = load_train_inputs(read_json_file(config_path), opts);
    const fs::path out = resolve_out(opts, in.cfg.seed);
    write_json_file(in.resolved, out / "resolved_config.json");

    TrainResult result;
    try {
        result = run_training(in);
    } catch (const DivergenceError& e) {
        save_checkpoint(e.last_finite, out / "diverged_checkpoint.json");
        std::cerr << "train: " << e.what() << " (last finite state saved)\n";
        throw;
    }
    save_checkpoint(result.checkpoint, out / "checkpoint.json");
    write_json_file(history_to_json(result.history), out / "history.json");

    const TrainerState& state = result.checkpoint.state;
    std::cout << "train: kind=" << result.checkpoint.kind << " epochs=" << state.epoch
              << " stop=" << state.stop_reason << std::setprecision(6)
              << " best_val_loss=" << state.best_val_loss << " (step " << state.best_step << ")\n";
    std::cout << "checkpoint: " << (out / "checkpoint.json").string() << "\n";
    return kExitOk;
}

int cmd_eval(const fs::path& checkpoint_path, const std::vector<fs::path>& dataset_paths,
             ReportFormat format, const CommonOpts& opts) {
    if (dataset_paths.empty()) throw std::invalid_argument("eval: at least one dataset required");
    Checkpoint checkpoint = load_checkpoint(checkpoint_path);
    const fs::path out = resolve_out(opts, checkpoint.config.seed);

    std::vector<EvalReport> reports;
    for (const fs::path& path : dataset_paths) {
        Dataset dataset = load_jsonl(path);
        EvalReport report = evaluate(checkpoint, dataset, checkpoint.config.mode);
        write_record_file(eval_report_to_json(report),
                          out / ("eval_" + path.stem().string() + ".json"));
        reports.push_back(std::move(report));
    }
    std::cout << emit_report(compare(reports), format);
    return kExitOk;
}

namespace {

// seeded random model + batch shared by the healthy and fault harness paths
struct GradcheckFixture {
    SyntheticData data;
    Vocab vocab;
    ModelDims dims;
    ModelParams params;
    Rng rng{0};

    explicit GradcheckFixture(std::uint64_t seed) {
        GenConfig gen;
        gen.n_train = 6;
        gen.n_test_easy = 0;
        gen.n_test_hard = 0;
        gen.m = 3;
        gen.content_vocab = 6;
        gen.filler_vocab = 6;
        gen.cue_rate = 0.5;
        gen.seed = seed;
        data = generate_synthetic(gen);
        vocab = build_vocab({&data.train}, 1);
        dims = ModelDims{vocab.size(), 5, 4, 3};
        params = ModelParams{dims, std::vector<double>(dims.total())};
        rng = Rng(seed ^ 0xdecafbadULL);
        for (double& x : params.flat) x = 0.3 * rng.normal();
    }

    std::span<const Instance> batch() const { return {data.train.instances.data(), 4}; }
};

constexpr double kGradcheckStep = 1e-5;

}  // namespace

double gradcheck_max_rel_error(std::uint64_t seed) {
    GradcheckFixture fx(seed);
    double worst = grad_check(fx.params, fx.vocab, fx.batch(), EncodeMode::Full, kGradcheckStep);
    worst = std::max(worst, grad_check(fx.params, fx.vocab, fx.batch(), EncodeMode::Contextless,
                                       kGradcheckStep));
    worst = std::max(worst, grad_check_adversarial(fx.params, fx.vocab, fx.batch(), 0.7, 0.5,
                                                   kGradcheckStep));
    return worst;
}

int cmd_gradcheck(std::uint64_t seed, bool inject_fault, double* max_rel_error_out) {
    constexpr double kTolerance = 1e-6;
    constexpr double kStep = kGradcheckStep;

    double worst = 0.0;
    if (inject_fault) {
        GradcheckFixture fx(seed);
        const Vocab& vocab = fx.vocab;
        const ModelDims& dims = fx.dims;
        const ModelParams& params = fx.params;
        Rng& rng = fx.rng;
        std::span<const Instance> batch = fx.batch();
        // sanity path: a deliberately zeroed embedding gradient must fail
        LossGrad analytic = ce_loss_and_grad(params, vocab, batch, EncodeMode::Full);
        std::fill(analytic.grad.begin(), analytic.grad.begin() + dims.off_w1(), 0.0);
        ModelParams probe = params;
        for (int i = 0; i < 20; ++i) {
            const std::size_t c = rng.index(dims.off_w1());
            const double saved = probe.flat[c];
            probe.flat[c] = saved + kStep;
            const double up = ce_loss(probe, vocab, batch, EncodeMode::Full);
            probe.flat[c] = saved - kStep;
            const double down = ce_loss(probe, vocab, batch, EncodeMode::Full);
            probe.flat[c] = saved;
            const double numeric = (up - down) / (2.0 * kStep);
            const double rel = std::abs(analytic.grad[c] - numeric) /
                               std::max(1e-12, std::abs(analytic.grad[c]) + std::abs(numeric));
            worst = std::max(worst, rel);
        }
    } else {
        worst = gradcheck_max_rel_error(seed);
    }
    if (max_rel_error_out) *max_rel_error_out = worst;

    const bool pass = worst <= kTolerance;
    std::cout << "gradcheck seed=" << seed << " max_rel_error=" << std::scientific
              << std::setprecision(3) << worst << (pass ? " pass" : " fail") << "\n";
    return pass ? kExitOk : kExitFailure;
}

std::vector<Json> expand_grid(const Json& grid) {
    if (!grid.is_object()) throw std::invalid_argument("sweep: grid must be an object of arrays");
    std::vector<Json> points{Json::object()};
    for (auto it = grid.begin(); it != grid.end(); ++it) {
        if (!it.value().is_array() || it.value().empty())
            throw std::invalid_argument("sweep: grid key \"" + it.key() +
                                        "\" must map to a nonempty array");
        std::vector<Json> next;
        next.reserve(points.size() * it.value().size());
        for (const Json& point : points)
            for (const Json& value : it.value()) {
                Json q = point;
                q[it.key()] = value;
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    return points;
}

int cmd_sweep(const fs::path& config_path, const CommonOpts& opts) {
    Json j = read_json_file(config_path);
    reject_unknown_keys(j, {"kind", "train_data", "val_data", "meta_test_data", "base", "grid"},
                        "sweep config");
    if (!j.contains("grid")) throw std::invalid_argument("sweep config: missing \"grid\"");

    // reuse the train loader; the base section plays the role of "train"
    Json train_view = Json::object();
    for (const char* key : {"kind", "train_data", "val_data", "meta_test_data"})
        if (j.contains(key)) train_view[key] = j.at(key);
    train_view["train"] = j.value("base", Json::object());
    TrainInputs base = load_train_inputs(train_view, opts);

    const std::vector<Json> overlays = expand_grid(j.at("grid"));
    const fs::path out = resolve_out(opts, base.cfg.seed);
    write_json_file(j, out / "resolved_config.json");

    struct PointResult {
        Json overlay;
        fs::path dir;
        double best_val_loss = 0.0;
        double best_val_accuracy = 0.0;
        std::string stop_reason;
    };
    std::vector<PointResult> results(overlays.size());
    std::vector<TrainInputs> inputs(overlays.size());
    int width = 1;
    for (std::size_t limit = 10; limit < overlays.size(); limit *= 10) ++width;
    for (std::size_t i = 0; i < overlays.size(); ++i) {
        Json merged = train_config_to_json(base.cfg);
        for (auto it = overlays[i].begin(); it != overlays[i].end(); ++it)
            merged[it.key()] = it.value();
        inputs[i] = base;
        inputs[i].cfg = train_config_from_json(merged);
        if (opts.seed) inputs[i].cfg.seed = *opts.seed;
        inputs[i].resolved["train"] = merged;

        std::string name = std::to_string(i);
        while (static_cast<int>(name.size()) < width) name.insert(name.begin(), '0');
        results[i].dir = out / ("point-" + name);
        results[i].overlay = overlays[i];
    }

    const int threads = report_threads();
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run_point = [&](std::size_t i) {
        try {
            fs::create_directories(results[i].dir);
            write_json_file(inputs[i].resolved, results[i].dir / "resolved_config.json");
            TrainResult r = run_training(inputs[i]);
            save_checkpoint(r.checkpoint, results[i].dir / "checkpoint.json");
            write_json_file(history_to_json(r.history), results[i].dir / "history.json");
            results[i].best_val_loss = r.checkpoint.state.best_val_loss;
            results[i].stop_reason = r.checkpoint.state.stop_reason;
            for (const EvalPoint& point : r.history.points)
                if (point.step == r.history.best_step)
                    results[i].best_val_accuracy = point.val_accuracy;
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    for (std::size_t begin = 0; begin < overlays.size();
         begin += static_cast<std::size_t>(threads)) {
        std::vector<std::thread> workers;
        const std::size_t end = std::min(overlays.size(), begin + static_cast<std::size_t>(threads));
        for (std::size_t i = begin; i < end; ++i) workers.emplace_back(run_point, i);
        for (std::thread& w : workers) w.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].best_val_loss < results[best].best_val_loss) best = i;

    Json summary = Json::object();
    Json points = Json::array();
    for (const PointResult& r : results) {
        Json p = Json::object();
        p["dir"] = r.dir.filename().string();
        p["overlay"] = r.overlay;
        p["best_val_loss"] = r.best_val_loss;
        p["best_val_accuracy"] = r.best_val_accuracy;
        p["stop_reason"] = r.stop_reason;
        points.push_back(std::move(p));
    }
    summary["points"] = points;
    summary["best_index"] = best;
    summary["best"] = points[best];
    write_json_file(summary, out / "sweep_summary.json");

    std::cout << "sweep: " << overlays.size() << " points, best point-" << best << " val_loss="
              << std::setprecision(6) << results[best].best_val_loss << " overlay="
              << results[best].overlay.dump() << "\n";
    return kExitOk;
}

}  // namespace suml

// Acceptance harness: nine end-to-end checks over the built library and CLI.
// Each check prints exactly one PASS/FAIL line; the process exits nonzero if
// any check fails. Experiment-scale checks share one benchmark dataset.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "helpers.hpp"
#include "suml/commands.hpp"
#include "suml/cue_stats.hpp"
#include "suml/data.hpp"
#include "suml/eval.hpp"
#include "suml/model.hpp"
#include "suml/rng.hpp"
#include "suml/serialize.hpp"
#include "suml/synthetic.hpp"
#include "suml/trainer.hpp"
#include "suml/vocab.hpp"

using namespace suml;
using testing::TempDir;
using testing::ToyScorer;
using testing::toy_solvable;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string pct(double x) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1) << 100.0 * x << "%";
    return out.str();
}

std::string sci(double x) {
    std::ostringstream out;
    out << std::scientific << std::setprecision(2) << x;
    return out.str();
}

std::string num(double x, int precision = 3) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << x;
    return out.str();
}

double mean(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

struct Harness {
    int total = 0;
    int passed = 0;

    void run(const std::string& name, std::optional<double> budget_s,
             const std::function<std::string()>& body) {
        ++total;
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = body();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && budget_s && elapsed > *budget_s) {
            ok = false;
            detail = "over time budget (" + num(elapsed, 1) + "s > " + num(*budget_s, 1) + "s)";
        }
        passed += ok;
        std::cout << "[" << total << "/9] " << (ok ? "PASS" : "FAIL") << " " << std::setw(7)
                  << (num(elapsed, 1) + "s") << "  " << name << " — " << detail << "\n"
                  << std::flush;
    }
};

// ---- shared benchmark -------------------------------------------------------

GenConfig bench_gen(std::uint64_t seed) {
    GenConfig cfg;
    cfg.n_train = 2000;
    cfg.n_test_easy = 500;
    cfg.n_test_hard = 500;
    cfg.m = 3;
    cfg.content_vocab = 8;
    cfg.filler_vocab = 50;
    cfg.cue_rate = 0.9;
    cfg.rule_strength = 0.95;
    cfg.seed = seed;
    return cfg;
}

// Shared base for every experiment-scale training run: one architecture and
// budget for all methods, so comparisons differ only in the objective.
TrainConfig scorer_cfg(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.outer_lr = 3e-3;
    cfg.train_batch_size = 32;
    cfg.embed_dim = 48;
    cfg.max_epochs = 150;
    cfg.early_stop_patience = 10;
    cfg.seed = seed;
    return cfg;
}

TrainConfig suml_cfg(std::uint64_t seed) {
    TrainConfig cfg = scorer_cfg(seed);
    cfg.inner_updates = 3;
    cfg.inner_batch_size = 8;
    cfg.meta_test_batch_size = 8;
    cfg.inner_lr = 0.1;
    cfg.outer_lr = 0.01;
    cfg.weight_decay = 0.1;
    return cfg;
}

TrainConfig probe_cfg() {
    TrainConfig cfg;
    cfg.outer_lr = 3e-3;
    cfg.train_batch_size = 32;
    cfg.max_epochs = 10;
    cfg.early_stop_patience = 3;
    cfg.mode = EncodeMode::Contextless;
    return cfg;
}

Dataset filter_pool(const Dataset& ds, const std::vector<std::string>& ids, std::string name) {
    std::unordered_set<std::string> keep(ids.begin(), ids.end());
    Dataset out{std::move(name), {}};
    for (const Instance& instance : ds.instances)
        if (keep.contains(instance.id)) out.instances.push_back(instance);
    return out;
}

struct Bench {
    std::optional<SyntheticData> data_;
    Vocab vocab_;
    double suml_overall_mean = -1.0;  // set by the meta-learning check

    // probe-split protocol artifacts, shared by the comparison checks
    bool protocol_ready_ = false;
    Dataset meta_;     // balanced meta-test set, removed from train
    Dataset balval_;   // balanced dev split for model selection, removed from train
    Dataset remaining_;

    const SyntheticData& data() {
        if (!data_) {
            data_ = generate_synthetic(bench_gen(100));
            vocab_ = build_vocab({&data_->train}, 1);
        }
        return *data_;
    }
    const Vocab& vocab() {
        data();
        return vocab_;
    }
    void protocol() {
        if (protocol_ready_) return;
        const SyntheticData& d = data();
        const auto probes = train_contextless_probe(d.train, probe_cfg(), {201, 202, 203});
        const SplitReport split = split_easy_hard(d.train, probes);
        if (split.easy_ids.size() < 150 || split.hard_ids.size() < 150)
            throw Failure("probe split too lopsided for the balanced protocol sets (" +
                          std::to_string(split.easy_ids.size()) + " easy / " +
                          std::to_string(split.hard_ids.size()) + " hard)");
        const Dataset easy_pool = filter_pool(d.train, split.easy_ids, "easy_pool");
        const Dataset hard_pool = filter_pool(d.train, split.hard_ids, "hard_pool");
        meta_ = build_meta_test(easy_pool, hard_pool, 200, 7);
        const Dataset easy_rest = subtract_by_ids(easy_pool, id_set(meta_));
        const Dataset hard_rest = subtract_by_ids(hard_pool, id_set(meta_));
        const std::size_t n_val = 2 * std::min<std::size_t>(50, hard_rest.instances.size());
        balval_ = build_meta_test(easy_rest, hard_rest, n_val, 11);
        remaining_ = subtract_by_ids(d.train, id_set(meta_));
        remaining_ = subtract_by_ids(remaining_, id_set(balval_));
        protocol_ready_ = true;
    }
};

double accuracy_on(const Checkpoint& cp, const Dataset& ds, EncodeMode mode) {
    return evaluate(cp, ds, mode).overall.accuracy();
}

double combined_test_accuracy(const Checkpoint& cp, const SyntheticData& data) {
    const EvalReport easy = evaluate(cp, data.test_easy, EncodeMode::Full);
    const EvalReport hard = evaluate(cp, data.test_hard, EncodeMode::Full);
    return static_cast<double>(easy.overall.correct + hard.overall.correct) /
           static_cast<double>(easy.overall.total + hard.overall.total);
}

double metric_at_best(const TrainResult& r, double EvalPoint::* field) {
    for (const EvalPoint& p : r.history.points)
        if (p.step == r.history.best_step) return p.*field;
    throw Failure("history has no eval point at the best step");
}

// ---- CLI plumbing for the byte-determinism check ---------------------------

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("SUML_THREADS=1 '") + SUML_CLI_PATH + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

void require_same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
    if (testing::read_file(a).empty()) throw Failure("empty or missing file " + a.string());
    if (testing::read_file(a) != testing::read_file(b))
        throw Failure("rerun differs: " + a.string() + " vs " + b.string());
}

// ---- randomized micro-datasets for the counting check ----------------------

Dataset random_micro(Rng& rng, int index) {
    const char* alphabet[] = {"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"};
    const std::size_t n = 1 + rng.index(20);
    const int m = 2 + static_cast<int>(rng.index(2));
    Dataset ds{"micro-" + std::to_string(index), {}};
    for (std::size_t i = 0; i < n; ++i) {
        Instance instance;
        instance.id = "d" + std::to_string(index) + "-i" + std::to_string(i);
        if (rng.bernoulli(0.5)) instance.context = "t0 t1";  // context must never count
        for (int c = 0; c < m; ++c) {
            std::string choice;
            const std::size_t words = 1 + rng.index(3);
            for (std::size_t w = 0; w < words; ++w) {
                if (w) choice += ' ';
                choice += alphabet[rng.index(8)];
            }
            instance.choices.push_back(std::move(choice));
        }
        instance.label = static_cast<int>(rng.index(static_cast<std::size_t>(m)));
        ds.instances.push_back(std::move(instance));
    }
    return ds;
}

}  // namespace

int main() {
    std::cout << "acceptance: nine checks over the planted-cue laboratory\n";
    Harness h;
    Bench bench;

    // 1 — analytic gradients against central differences, ten seeds, all
    //     three objectives (standard, contextless, adversarial/reversal).
    h.run("gradient check, 10 seeds, tolerance 1e-6", 30.0, [&] {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            double err = 0.0;
            if (cmd_gradcheck(seed, false, &err) != kExitOk)
                throw Failure("seed " + std::to_string(seed) + " exceeded 1e-6 (max rel err " +
                              sci(err) + ")");
            worst = std::max(worst, err);
        }
        return "worst relative error " + sci(worst) + " across erm/contextless/adversarial";
    });

    // 2 — the meta step against the hand-derived quadratic values.
    h.run("meta step quadratic oracle, tolerance 1e-10", 1.0, [&] {
        const LossGradFn inner = [](const std::vector<double>& t) {
            return std::make_pair((t[0] - 1.0) * (t[0] - 1.0),
                                  std::vector<double>{2.0 * (t[0] - 1.0)});
        };
        const LossGradFn meta = [](const std::vector<double>& t) {
            return std::make_pair((t[0] - 2.0) * (t[0] - 2.0),
                                  std::vector<double>{2.0 * (t[0] - 2.0)});
        };
        const OuterApplyFn sgd = [](const std::vector<double>& t,
                                    const std::vector<double>& g) {
            return std::vector<double>{t[0] - 0.1 * g[0]};
        };
        const double k1 = suml_outer_step({0.0}, 1, 0.1, inner, meta, sgd).theta_after[0];
        const double k2 = suml_outer_step({0.0}, 2, 0.1, inner, meta, sgd).theta_after[0];
        if (std::abs(k1 - 0.36) > 1e-10)
            throw Failure("k=1 produced " + num(k1, 12) + ", expected 0.36");
        if (std::abs(k2 - 0.328) > 1e-10)
            throw Failure("k=2 produced " + num(k2, 12) + ", expected 0.328");
        return "k=1 -> " + num(k1, 6) + ", k=2 -> " + num(k2, 6);
    });

    // 3 — applicability / productivity / coverage against a from-scratch
    //     indicator recount on randomized micro-datasets.
    h.run("cue statistics vs brute-force recount, 25 micro-datasets", std::nullopt, [&] {
        Rng rng(4242);
        std::size_t compared = 0;
        for (int d = 0; d < 25; ++d) {
            const Dataset ds = random_micro(rng, d);
            const auto stats = token_stats_all(ds);

            std::unordered_set<std::string> universe;
            for (const Instance& instance : ds.instances)
                for (const auto& set : token_sets(instance))
                    universe.insert(set.begin(), set.end());

            std::size_t with_alpha = 0;
            for (const std::string& token : universe) {
                std::size_t alpha = 0, productive = 0;
                for (const Instance& instance : ds.instances) {
                    const auto sets = token_sets(instance);
                    int hits = 0, where = -1;
                    for (int c = 0; c < static_cast<int>(sets.size()); ++c)
                        if (sets[c].contains(token)) {
                            ++hits;
                            where = c;
                        }
                    if (hits == 1) {
                        ++alpha;
                        productive += where == instance.label;
                    }
                }
                ++compared;
                if (alpha == 0) {
                    if (stats.contains(token))
                        throw Failure("token " + token + " tabulated despite applicability 0");
                    continue;
                }
                ++with_alpha;
                if (!stats.contains(token)) throw Failure("token " + token + " missing");
                const TokenStats& st = stats.at(token);
                const bool exact =
                    st.applicability == alpha && st.productive_count == productive &&
                    st.productivity.has_value() &&
                    *st.productivity ==
                        static_cast<double>(productive) / static_cast<double>(alpha) &&
                    st.coverage ==
                        static_cast<double>(alpha) / static_cast<double>(ds.size());
                if (!exact)
                    throw Failure("token " + token + " in " + ds.name +
                                  " disagrees with the recount");
            }
            if (stats.size() != with_alpha)
                throw Failure(ds.name + " tabulated " + std::to_string(stats.size()) +
                              " tokens, recount found " + std::to_string(with_alpha));
        }
        return std::to_string(compared) + " token comparisons matched exactly";
    });

    // 4 — a contextless probe must read off the planted cue far above chance.
    h.run("contextless probe finds the cue, 3 benchmark seeds", 180.0, [&] {
        double worst = 1.0;
        for (std::uint64_t seed : {301, 302, 303}) {
            const SyntheticData data = generate_synthetic(bench_gen(seed));
            const auto probes = train_contextless_probe(data.train, probe_cfg(), {0});
            worst = std::min(worst,
                             accuracy_on(probes[0], data.train, EncodeMode::Contextless));
        }
        const double bar = 1.0 / 3.0 + 0.30;
        if (worst < bar)
            throw Failure("probe accuracy " + pct(worst) + " under the bar " + pct(bar));
        return "train-pool accuracy >= " + pct(worst) + " on every seed (bar " + pct(bar) + ")";
    });

    // 5 — plain training rides the cue: large easy-hard accuracy gap.
    h.run("plain training easy-hard gap >= 10pp, 5 seeds", std::nullopt, [&] {
        const SyntheticData& data = bench.data();
        std::vector<double> easy, hard;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto [tr, val] = train_val_split(data.train, SplitSpec{0.1, seed});
            const TrainResult r = train_erm(tr, val, bench.vocab(), scorer_cfg(seed));
            easy.push_back(accuracy_on(r.checkpoint, data.test_easy, EncodeMode::Full));
            hard.push_back(accuracy_on(r.checkpoint, data.test_hard, EncodeMode::Full));
        }
        const double gap = mean(easy) - mean(hard);
        if (gap < 0.10)
            throw Failure("cued " + pct(mean(easy)) + " vs uncued " + pct(mean(hard)) +
                          ": gap " + pct(gap) + " under 10pp");
        return "cued " + pct(mean(easy)) + " vs uncued " + pct(mean(hard)) + " (gap " +
               pct(gap) + ")";
    });

    // 6 — meta-learning with a balanced held-out meta-test set beats plain
    //     training on hard instances without giving up easy ones. Both methods
    //     train on the same remaining pool, share the architecture and epoch
    //     budget, and select their checkpoint on the same balanced dev split.
    h.run("meta-learning vs plain on hard instances, 5 seeds", 600.0, [&] {
        bench.protocol();
        const SyntheticData& data = bench.data();

        std::vector<double> erm_easy, erm_hard, suml_easy, suml_hard, suml_overall;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const TrainResult erm =
                train_erm(bench.remaining_, bench.balval_, bench.vocab(), scorer_cfg(seed));
            const TrainResult suml = train_suml(bench.remaining_, bench.meta_, bench.balval_,
                                                bench.vocab(), suml_cfg(seed));
            erm_easy.push_back(accuracy_on(erm.checkpoint, data.test_easy, EncodeMode::Full));
            erm_hard.push_back(accuracy_on(erm.checkpoint, data.test_hard, EncodeMode::Full));
            suml_easy.push_back(accuracy_on(suml.checkpoint, data.test_easy, EncodeMode::Full));
            suml_hard.push_back(accuracy_on(suml.checkpoint, data.test_hard, EncodeMode::Full));
            suml_overall.push_back(combined_test_accuracy(suml.checkpoint, data));
        }
        bench.suml_overall_mean = mean(suml_overall);

        const std::string summary = "hard " + pct(mean(suml_hard)) + " vs " +
                                    pct(mean(erm_hard)) + ", easy " + pct(mean(suml_easy)) +
                                    " vs " + pct(mean(erm_easy));
        if (mean(suml_hard) < mean(erm_hard) + 0.05)
            throw Failure("hard-instance margin under 5pp (" + summary + ")");
        if (mean(suml_easy) < mean(erm_easy) - 0.01)
            throw Failure("easy-instance accuracy dropped over 1pp (" + summary + ")");
        return summary;
    });

    // 7 — gradient-reversal training blinds the adversary without winning
    //     overall. Dev selection scans the lambda grid and scores each point by
    //     the reversal objective at unit weights (scorer CE minus adversary CE
    //     on the balanced dev split) so points with different lambdas stay
    //     comparable; plain scorer CE would always favor the weakest reversal
    //     and make the check measure snapshot noise instead of the method.
    h.run("reversal blinds the adversary, dev-selected lambdas, 3 seeds", std::nullopt, [&] {
        if (bench.suml_overall_mean < 0.0)
            throw Failure("needs the meta-learning accuracies from the previous check");
        bench.protocol();
        const SyntheticData& data = bench.data();
        const Dataset tr = subtract_by_ids(data.train, id_set(bench.balval_));

        double best_score = std::numeric_limits<double>::max();
        double best_ll = 0.0, best_le = 0.0;
        for (int i = 1; i <= 10; ++i)
            for (int j = 1; j <= 10; ++j) {
                TrainConfig cfg = scorer_cfg(0);
                cfg.lambda_loss = 0.1 * i;
                cfg.lambda_enc = 0.1 * j;
                const TrainResult r = train_adversarial(tr, bench.balval_, bench.vocab(), cfg);
                const double score = metric_at_best(r, &EvalPoint::scorer_loss) -
                                     metric_at_best(r, &EvalPoint::adv_loss);
                if (score < best_score) {
                    best_score = score;
                    best_ll = cfg.lambda_loss;
                    best_le = cfg.lambda_enc;
                }
            }

        std::vector<double> treated_adv, control_adv, treated_overall;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            TrainConfig treated_cfg = scorer_cfg(seed);
            treated_cfg.lambda_loss = best_ll;
            treated_cfg.lambda_enc = best_le;
            const TrainResult treated = train_adversarial(tr, bench.balval_, bench.vocab(), treated_cfg);
            TrainConfig control_cfg = treated_cfg;
            control_cfg.lambda_enc = 0.0;  // adversary trains, encoder never pushes back
            const TrainResult control = train_adversarial(tr, bench.balval_, bench.vocab(), control_cfg);
            treated_adv.push_back(metric_at_best(treated, &EvalPoint::adv_accuracy));
            control_adv.push_back(metric_at_best(control, &EvalPoint::adv_accuracy));
            treated_overall.push_back(combined_test_accuracy(treated.checkpoint, data));
        }

        const double drop = mean(control_adv) - mean(treated_adv);
        const std::string summary =
            "lambdas (" + num(best_ll, 1) + ", " + num(best_le, 1) + "): adversary " +
            pct(mean(treated_adv)) + " vs control " + pct(mean(control_adv)) + ", overall " +
            pct(mean(treated_overall)) + " vs meta " + pct(bench.suml_overall_mean);
        if (drop < 0.05) throw Failure("adversary accuracy drop under 5pp (" + summary + ")");
        if (mean(treated_overall) > bench.suml_overall_mean + 1e-12)
            throw Failure("reversal beat the meta-learner overall (" + summary + ")");
        return summary;
    });

    // 8 — identical config + seed through the installed CLI is byte-identical.
    h.run("CLI reruns byte-identical: gen, train, eval", std::nullopt, [&] {
        TempDir tmp;
        GenConfig gen = bench_gen(42);
        gen.n_train = 300;
        gen.n_test_easy = 60;
        gen.n_test_hard = 60;
        write_json_file(gen_config_to_json(gen), tmp.file("gen.json"));
        const auto dir = [&](const std::string& name) { return (tmp.path() / name).string(); };
        for (const char* d : {"d1", "d2"})
            if (run_cli("gen --config " + tmp.file("gen.json").string() + " --out " + dir(d)) != 0)
                throw Failure("gen exited nonzero");
        std::size_t files = 0;
        for (const char* name : {"train.jsonl", "test_easy.jsonl", "test_hard.jsonl",
                                 "manifest.json", "resolved_config.json"}) {
            require_same_bytes(tmp.path() / "d1" / name, tmp.path() / "d2" / name);
            ++files;
        }

        Json train = Json::object();
        train["kind"] = "erm";
        train["train_data"] = dir("d1") + "/train.jsonl";
        train["train"] = Json::object();
        train["train"]["max_epochs"] = 2;
        train["train"]["embed_dim"] = 8;
        train["train"]["hidden_dim"] = 8;
        train["train"]["early_stop_patience"] = 0;
        train["train"]["seed"] = 3;
        write_json_file(train, tmp.file("train.json"));
        for (const char* t : {"t1", "t2"})
            if (run_cli("train --config " + tmp.file("train.json").string() + " --out " + dir(t)) !=
                0)
                throw Failure("train exited nonzero");
        for (const char* name : {"checkpoint.json", "history.json", "resolved_config.json"}) {
            require_same_bytes(tmp.path() / "t1" / name, tmp.path() / "t2" / name);
            ++files;
        }

        for (const char* v : {"v1", "v2"})
            if (run_cli("eval " + dir("t1") + "/checkpoint.json " + dir("d1") +
                        "/test_easy.jsonl --format records --out " + dir(v)) != 0)
                throw Failure("eval exited nonzero");
        require_same_bytes(tmp.path() / "v1" / "eval_test_easy.json",
                           tmp.path() / "v2" / "eval_test_easy.json");
        ++files;
        return std::to_string(files) + " files identical across single-threaded reruns";
    });

    // 9 — subset bookkeeping: easy/hard/untagged counts always recombine into
    //     the overall row, and the fixed 190/310 example lands on 0.864.
    h.run("report subset identity, 1000 randomized reports", std::nullopt, [&] {
        const ToyScorer toy;
        const Checkpoint cp = toy.checkpoint();
        Rng rng(2026);
        for (int t = 0; t < 1000; ++t) {
            const std::size_t n = 1 + rng.index(40);
            Dataset ds{"r" + std::to_string(t), {}};
            std::size_t want[3][2] = {};  // [easy, hard, untagged] x [total, correct]
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t bucket = rng.index(3);
                const bool correct = rng.bernoulli(0.5);
                std::optional<SubsetTag> tag;
                if (bucket == 0) tag = SubsetTag::Easy;
                if (bucket == 1) tag = SubsetTag::Hard;
                ds.instances.push_back(
                    toy_solvable("i" + std::to_string(i), correct, tag));
                ++want[bucket][0];
                want[bucket][1] += correct;
            }
            const EvalReport rep = evaluate(cp, ds, EncodeMode::Full);
            const SubsetCounts* got[3] = {&rep.easy, &rep.hard, &rep.unknown};
            std::size_t total = 0, correct = 0;
            for (int b = 0; b < 3; ++b) {
                if (got[b]->total != want[b][0] || got[b]->correct != want[b][1])
                    throw Failure("subset counts drifted on report " + std::to_string(t));
                total += got[b]->total;
                correct += got[b]->correct;
            }
            if (rep.overall.total != total || rep.overall.correct != correct ||
                rep.per_instance.size() != n)
                throw Failure("overall row is not the subset sum on report " +
                              std::to_string(t));
            double weighted = 0.0;
            for (int b = 0; b < 3; ++b)
                if (got[b]->total > 0)
                    weighted += got[b]->accuracy() * static_cast<double>(got[b]->total);
            if (std::abs(rep.overall.accuracy() - weighted / static_cast<double>(total)) > 1e-12)
                throw Failure("weighted subset mean misses overall accuracy on report " +
                              std::to_string(t));
        }

        // fixed example: 172/190 easy and 260/310 hard must recombine to 0.864
        Dataset fixed{"fixed", {}};
        for (std::size_t i = 0; i < 190; ++i)
            fixed.instances.push_back(
                toy_solvable("e" + std::to_string(i), i < 172, SubsetTag::Easy));
        for (std::size_t i = 0; i < 310; ++i)
            fixed.instances.push_back(
                toy_solvable("h" + std::to_string(i), i < 260, SubsetTag::Hard));
        const EvalReport rep = evaluate(cp, fixed, EncodeMode::Full);
        if (std::abs(rep.overall.accuracy() - 0.864) > 1e-12)
            throw Failure("fixed example overall " + num(rep.overall.accuracy(), 6) +
                          " != 0.864");
        if (std::abs((0.905 * 190 + 0.839 * 310) / 500.0 - rep.overall.accuracy()) > 1e-3)
            throw Failure("rounded weighted mean strayed from the overall accuracy");
        return "1000 randomized reports exact; fixed 190/310 example lands on 0.864";
    });

    std::cout << "acceptance: " << h.passed << "/" << h.total << " checks passed\n";
    return h.passed == h.total ? 0 : 1;
}

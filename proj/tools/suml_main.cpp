#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "suml/commands.hpp"
#include "suml/trainer.hpp"

namespace {

struct Options {
    std::uint64_t seed = 0;
    std::string out;
    std::string config;
    std::string dataset;
    std::string train_data;
    std::string eval_data;
    std::string checkpoint;
    std::vector<std::string> datasets;
    std::string format = "table";
    std::size_t top_k = 15;
    int n_seeds = 3;
    bool inject_fault = false;
};

suml::CommonOpts common(const CLI::App* sub, const Options& opt) {
    suml::CommonOpts c;
    if (sub->count("--seed") > 0) c.seed = opt.seed;
    if (!opt.out.empty()) c.out = opt.out;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planted-cue robustness laboratory"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--out", opt.out, "output directory (default run-<timestamp>-<seed>)");
        return sub;
    };

    CLI::App* gen = add_common(app.add_subcommand("gen", "generate a planted-cue benchmark"));
    gen->add_option("--config", opt.config, "generator config file")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* analyze =
        add_common(app.add_subcommand("analyze", "rank choice-side cue tokens by productivity"));
    analyze->add_option("dataset", opt.dataset, "dataset file")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--top-k", opt.top_k, "rows to keep (default 15)");

    CLI::App* split = add_common(
        app.add_subcommand("split", "train contextless probes and split a dataset easy/hard"));
    split->add_option("train", opt.train_data, "probe training pool")
        ->required()
        ->check(CLI::ExistingFile);
    split->add_option("eval", opt.eval_data, "dataset to split")
        ->required()
        ->check(CLI::ExistingFile);
    split->add_option("--seeds", opt.n_seeds, "number of probe seeds (default 3)");

    CLI::App* train = add_common(app.add_subcommand("train", "run one training job"));
    train->add_option("--config", opt.config, "train config file")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* eval =
        add_common(app.add_subcommand("eval", "evaluate a checkpoint on tagged datasets"));
    eval->add_option("checkpoint", opt.checkpoint, "checkpoint file")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("datasets", opt.datasets, "dataset files")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--format", opt.format, "table | records");

    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "finite-difference verification of the analytic gradients");
    gradcheck->add_option("--seed", opt.seed, "model/batch seed (default 0)");
    gradcheck->add_flag("--inject-fault", opt.inject_fault)->group("");

    CLI::App* sweep = add_common(app.add_subcommand("sweep", "grid search over train configs"));
    sweep->add_option("--config", opt.config, "sweep config file")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? suml::kExitOk : suml::kExitUsage;
    }

    try {
        if (gen->parsed()) return suml::cmd_gen(opt.config, common(gen, opt));
        if (analyze->parsed())
            return suml::cmd_analyze(opt.dataset, opt.top_k, common(analyze, opt));
        if (split->parsed())
            return suml::cmd_split(opt.train_data, opt.eval_data, opt.n_seeds, common(split, opt));
        if (train->parsed()) return suml::cmd_train(opt.config, common(train, opt));
        if (eval->parsed()) {
            std::vector<std::filesystem::path> paths(opt.datasets.begin(), opt.datasets.end());
            return suml::cmd_eval(opt.checkpoint, paths,
                                  suml::report_format_from_name(opt.format), common(eval, opt));
        }
        if (gradcheck->parsed()) return suml::cmd_gradcheck(opt.seed, opt.inject_fault);
        if (sweep->parsed()) return suml::cmd_sweep(opt.config, common(sweep, opt));
    } catch (const suml::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return suml::kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return suml::kExitUsage;
    }
    return suml::kExitUsage;
}

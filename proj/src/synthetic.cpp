#include "suml/synthetic.hpp"

#include <stdexcept>

#include "suml/rng.hpp"

namespace suml {

namespace {

enum class CueMode { PerRate, Always, Never };

std::string padded(std::size_t value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

std::vector<std::string> token_pool(const std::string& stem, int count) {
    int width = 2;
    for (int limit = 100; limit <= count; limit *= 10) ++width;
    std::vector<std::string> pool;
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.push_back(stem + padded(i, width));
    return pool;
}

void validate(const GenConfig& cfg) {
    if (cfg.m < 2) throw std::invalid_argument("generator: m must be >= 2");
    if (cfg.content_vocab < cfg.m + 1)
        throw std::invalid_argument("generator: content_vocab must exceed m");
    if (cfg.filler_vocab < 1) throw std::invalid_argument("generator: filler_vocab must be >= 1");
    if (cfg.cue_rate < 0.0 || cfg.cue_rate > 1.0)
        throw std::invalid_argument("generator: cue_rate must lie in [0, 1]");
    if (cfg.rule_strength <= 0.0 || cfg.rule_strength > 1.0)
        throw std::invalid_argument("generator: rule_strength must lie in (0, 1]");
    if (cfg.cue_token.empty()) throw std::invalid_argument("generator: cue_token must be nonempty");
}

}  // namespace

SyntheticData generate_synthetic(const GenConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);

    SyntheticData data;
    data.key_tokens = token_pool("key", cfg.content_vocab);
    std::vector<std::string> answers = token_pool("ans", cfg.content_vocab);
    std::vector<std::string> fillers = token_pool("fil", cfg.filler_vocab);

    // the fixed pairing: a random bijection key index -> answer index
    std::vector<int> paired(cfg.content_vocab);
    for (int i = 0; i < cfg.content_vocab; ++i) paired[i] = i;
    rng.shuffle(paired);
    data.answer_of.resize(cfg.content_vocab);
    for (int k = 0; k < cfg.content_vocab; ++k) data.answer_of[k] = answers[paired[k]];

    auto filler = [&] { return fillers[rng.index(fillers.size())]; };

    auto make_instance = [&](const std::string& prefix, std::size_t index, CueMode cue_mode) {
        Instance instance;
        instance.id = prefix + "-" + padded(index, 6);
        instance.label = static_cast<int>(rng.index(cfg.m));
        const int key = static_cast<int>(rng.index(cfg.content_vocab));
        instance.context = data.key_tokens[key] + " " + filler() + " " + filler();

        const bool rule_holds = rng.bernoulli(cfg.rule_strength);
        // m distinct decoy answers, none of them the paired one; when the rule
        // fails the correct choice takes the spare decoy instead of the pair
        auto draws = rng.sample_without_replacement(cfg.content_vocab - 1, cfg.m);
        std::vector<int> decoys;
        for (std::size_t d : draws)
            decoys.push_back(static_cast<int>(d) < paired[key] ? static_cast<int>(d)
                                                               : static_cast<int>(d) + 1);
        instance.choices.resize(cfg.m);
        int next_decoy = 0;
        for (int j = 0; j < cfg.m; ++j) {
            int answer;
            if (j == instance.label)
                answer = rule_holds ? paired[key] : decoys[cfg.m - 1];
            else
                answer = decoys[next_decoy++];
            instance.choices[j] = answers[answer] + " " + filler();
        }

        bool cued = false;
        if (cue_mode == CueMode::Always)
            cued = true;
        else if (cue_mode == CueMode::PerRate)
            cued = rng.bernoulli(cfg.cue_rate);
        if (cued) instance.choices[instance.label] += " " + cfg.cue_token;
        instance.cue_meta = CueMeta{cfg.cue_token, cued};
        return instance;
    };

    data.train.name = "train";
    for (std::size_t i = 0; i < cfg.n_train; ++i)
        data.train.instances.push_back(make_instance("train", i, CueMode::PerRate));
    data.test_easy.name = "test_easy";
    for (std::size_t i = 0; i < cfg.n_test_easy; ++i)
        data.test_easy.instances.push_back(make_instance("easy", i, CueMode::Always));
    data.test_hard.name = "test_hard";
    for (std::size_t i = 0; i < cfg.n_test_hard; ++i)
        data.test_hard.instances.push_back(make_instance("hard", i, CueMode::Never));

    // the generated test subsets are easy/hard by construction
    for (Instance& instance : data.test_easy.instances) instance.subset_tag = SubsetTag::Easy;
    for (Instance& instance : data.test_hard.instances) instance.subset_tag = SubsetTag::Hard;
    return data;
}

}  // namespace suml

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "suml/data.hpp"

namespace suml {

// Planted-cue benchmark. Every context carries one key token; a fixed random
// bijection pairs each key with an answer token, and with probability
// rule_strength the correct choice carries its context's paired answer (the
// "right reason"). Wrong choices carry unpaired answers plus filler. Training
// instances append cue_token to the correct choice with probability cue_rate;
// the easy test set always carries the cue, the hard test set never does.
struct GenConfig {
    std::size_t n_train = 2000;
    std::size_t n_test_easy = 500;
    std::size_t n_test_hard = 500;
    int m = 2;                      // choices per instance
    int content_vocab = 24;         // number of key tokens (= number of answer tokens)
    int filler_vocab = 50;
    std::string cue_token = "zz_cue";
    double cue_rate = 0.9;          // p: fraction of cued training instances
    double rule_strength = 1.0;     // probability the pairing rule fixes the gold label
    std::uint64_t seed = 0;
};

struct SyntheticData {
    Dataset train;
    Dataset test_easy;
    Dataset test_hard;
    // The planted pairing, exposed for verification: answer_of[k] is the
    // answer token paired with key token key_tokens[k].
    std::vector<std::string> key_tokens;
    std::vector<std::string> answer_of;
};

SyntheticData generate_synthetic(const GenConfig& cfg);

}  // namespace suml

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "suml/data.hpp"

namespace suml {

// Per-token cue statistics over choice-side unigrams.
//
// A token is applicable on an instance when it appears in exactly one choice's
// token set (the m >= 2 generalization of "one label but not the other"); it
// is productive there when that choice is the gold answer.
struct TokenStats {
    std::string token;
    std::size_t applicability = 0;
    std::size_t productive_count = 0;
    std::optional<double> productivity;  // productive_count / applicability; unset when never applicable
    double coverage = 0.0;               // applicability / n
};

// Token sets of the m choices, contexts excluded, tokenized as the model does.
std::vector<std::set<std::string>> token_sets(const Instance& instance);

std::size_t applicability(const Dataset& dataset, const std::string& token);
std::optional<double> productivity(const Dataset& dataset, const std::string& token);

struct CueReport {
    std::string dataset_name;
    std::size_t n = 0;
    std::size_t min_applicability = 5;
    std::vector<TokenStats> ranked;                          // truncated to top_k
    std::vector<std::pair<std::uint64_t, double>> probe_accuracies;  // (seed, accuracy)
    double random_baseline = 0.0;                            // mean of 1/m over instances
};

// Stats for every token with applicability >= min_applicability, ranked by
// productivity, ties by applicability then token, truncated to top_k.
CueReport cue_report(const Dataset& dataset, std::size_t top_k, std::size_t min_applicability = 5,
                     const std::vector<std::pair<std::uint64_t, double>>& probe_accuracies = {});

// Full per-token table (no applicability floor, no truncation); the report
// builds on top of this. Tokens that are never applicable are omitted, so
// every entry carries a defined productivity.
std::map<std::string, TokenStats> token_stats_all(const Dataset& dataset);

}  // namespace suml

#include "suml/cue_stats.hpp"

#include <algorithm>
#include <stdexcept>

#include "suml/text.hpp"

namespace suml {

std::vector<std::set<std::string>> token_sets(const Instance& instance) {
    std::vector<std::set<std::string>> sets;
    sets.reserve(instance.choices.size());
    for (const std::string& choice : instance.choices) {
        auto tokens = tokenize(choice);
        sets.emplace_back(tokens.begin(), tokens.end());
    }
    return sets;
}

namespace {

// when `token` sits in exactly one choice set, returns that choice index
std::optional<int> sole_choice(const std::vector<std::set<std::string>>& sets,
                               const std::string& token) {
    std::optional<int> owner;
    for (int j = 0; j < static_cast<int>(sets.size()); ++j) {
        if (!sets[j].contains(token)) continue;
        if (owner) return std::nullopt;
        owner = j;
    }
    return owner;
}

}  // namespace

std::size_t applicability(const Dataset& dataset, const std::string& token) {
    std::size_t count = 0;
    for (const Instance& instance : dataset.instances)
        if (sole_choice(token_sets(instance), token)) ++count;
    return count;
}

std::optional<double> productivity(const Dataset& dataset, const std::string& token) {
    std::size_t applicable = 0;
    std::size_t productive = 0;
    for (const Instance& instance : dataset.instances) {
        auto owner = sole_choice(token_sets(instance), token);
        if (!owner) continue;
        ++applicable;
        if (*owner == instance.label) ++productive;
    }
    if (applicable == 0) return std::nullopt;
    return static_cast<double>(productive) / static_cast<double>(applicable);
}

std::map<std::string, TokenStats> token_stats_all(const Dataset& dataset) {
    std::map<std::string, TokenStats> all;
    for (const Instance& instance : dataset.instances) {
        auto sets = token_sets(instance);
        std::map<std::string, int> membership;
        std::map<std::string, int> owner;
        for (int j = 0; j < static_cast<int>(sets.size()); ++j)
            for (const std::string& token : sets[j]) {
                ++membership[token];
                owner[token] = j;
            }
        for (const auto& [token, count] : membership) {
            auto [it, inserted] = all.try_emplace(token);
            if (inserted) it->second.token = token;
            TokenStats& stats = it->second;
            if (count != 1) continue;
            ++stats.applicability;
            if (owner[token] == instance.label) ++stats.productive_count;
        }
    }
    // tokens that never sit in exactly one choice have no defined statistics
    for (auto it = all.begin(); it != all.end();)
        it = it->second.applicability == 0 ? all.erase(it) : std::next(it);
    const double n = static_cast<double>(dataset.size());
    for (auto& [token, stats] : all) {
        stats.productivity = static_cast<double>(stats.productive_count) /
                             static_cast<double>(stats.applicability);
        stats.coverage = n == 0.0 ? 0.0 : static_cast<double>(stats.applicability) / n;
    }
    return all;
}

CueReport cue_report(const Dataset& dataset, std::size_t top_k, std::size_t min_applicability,
                     const std::vector<std::pair<std::uint64_t, double>>& probe_accuracies) {
    if (top_k < 1) throw std::invalid_argument("cue_report: top_k must be >= 1");
    CueReport report;
    report.dataset_name = dataset.name;
    report.n = dataset.size();
    report.min_applicability = min_applicability;
    report.probe_accuracies = probe_accuracies;

    double baseline_sum = 0.0;
    for (const Instance& instance : dataset.instances)
        if (instance.num_choices() > 0) baseline_sum += 1.0 / instance.num_choices();
    report.random_baseline = dataset.empty() ? 0.0 : baseline_sum / dataset.size();

    for (const auto& [token, stats] : token_stats_all(dataset)) {
        if (stats.applicability < min_applicability) continue;
        report.ranked.push_back(stats);
    }
    std::sort(report.ranked.begin(), report.ranked.end(),
              [](const TokenStats& a, const TokenStats& b) {
                  if (*a.productivity != *b.productivity)
                      return *a.productivity > *b.productivity;
                  if (a.applicability != b.applicability) return a.applicability > b.applicability;
                  return a.token < b.token;
              });
    if (report.ranked.size() > top_k) report.ranked.resize(top_k);
    return report;
}

}  // namespace suml

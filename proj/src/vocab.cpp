#include "suml/vocab.hpp"

#include <stdexcept>
#include <unordered_map>

#include "suml/text.hpp"

namespace suml {

Vocab build_vocab(const std::vector<const Dataset*>& datasets, int min_count) {
    if (datasets.empty()) throw std::invalid_argument("empty corpus");
    if (min_count < 1) throw std::invalid_argument("build_vocab: min_count must be >= 1");

    std::unordered_map<std::string, std::size_t> counts;
    std::vector<std::string> first_seen;  // deterministic id order
    auto feed = [&](const std::string& text) {
        for (auto& token : tokenize(text)) {
            auto [it, inserted] = counts.try_emplace(token, 0);
            if (inserted) first_seen.push_back(token);
            ++it->second;
        }
    };
    for (const Dataset* dataset : datasets) {
        for (const Instance& instance : dataset->instances) {
            feed(instance.context);
            for (const std::string& choice : instance.choices) feed(choice);
        }
    }
    if (first_seen.empty()) throw std::invalid_argument("empty corpus");

    Vocab vocab;
    vocab.tokens.push_back("<unk>");
    vocab.ids.emplace("<unk>", 0);
    for (const std::string& token : first_seen) {
        if (counts[token] < static_cast<std::size_t>(min_count)) continue;
        if (token == "<unk>") continue;  // reserved
        int id = vocab.size();
        vocab.tokens.push_back(token);
        vocab.ids.emplace(token, id);
    }
    return vocab;
}

Vocab vocab_from_tokens(std::vector<std::string> tokens) {
    if (tokens.empty() || tokens[0] != "<unk>")
        throw std::runtime_error("vocab token list must start with <unk>");
    Vocab vocab;
    vocab.tokens = std::move(tokens);
    for (int id = 0; id < vocab.size(); ++id) {
        auto [it, inserted] = vocab.ids.emplace(vocab.tokens[id], id);
        if (!inserted) throw std::runtime_error("duplicate token in vocab: " + vocab.tokens[id]);
    }
    return vocab;
}

}  // namespace suml

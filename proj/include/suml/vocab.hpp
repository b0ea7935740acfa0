#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "suml/data.hpp"

namespace suml {

// Token ids are dense in [0, V); id 0 is the trained unknown-token slot and
// every unseen token maps to it.
struct Vocab {
    std::vector<std::string> tokens;                 // id -> token; tokens[0] == "<unk>"
    std::unordered_map<std::string, int> ids;        // token -> id

    int size() const { return static_cast<int>(tokens.size()); }

    int id_of(std::string_view token) const {
        auto it = ids.find(std::string(token));
        return it == ids.end() ? 0 : it->second;
    }

    bool operator==(const Vocab& other) const { return tokens == other.tokens; }
};

// Tokens occurring >= min_count times across all contexts and choices, ids
// assigned in first-occurrence order. Throws "empty corpus" when there is
// nothing to index.
Vocab build_vocab(const std::vector<const Dataset*>& datasets, int min_count);

Vocab vocab_from_tokens(std::vector<std::string> tokens);  // checkpoint reload path

}  // namespace suml

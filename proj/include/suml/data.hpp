#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "suml/rng.hpp"

namespace suml {

enum class SubsetTag { Unknown, Easy, Hard };

std::string subset_tag_name(SubsetTag tag);
SubsetTag subset_tag_from_name(const std::string& name);

struct CueMeta {
    std::string cue_token;
    bool cued = false;

    bool operator==(const CueMeta&) const = default;
};

// One multiple-choice question. `context` may be empty; `label` indexes into
// `choices`; `subset_tag` is absent until a splitting pass assigns one.
struct Instance {
    std::string id;
    std::string context;
    std::optional<std::string> ask_kind;
    std::vector<std::string> choices;
    int label = 0;
    std::optional<SubsetTag> subset_tag;
    std::optional<CueMeta> cue_meta;

    int num_choices() const { return static_cast<int>(choices.size()); }
    SubsetTag tag_or_unknown() const { return subset_tag.value_or(SubsetTag::Unknown); }

    bool operator==(const Instance&) const = default;
};

struct Dataset {
    std::string name;
    std::vector<Instance> instances;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }

    bool operator==(const Dataset&) const = default;
};

// Line-delimited JSON, one instance per line. Load validates the schema and
// reports malformed lines by number and label/choice violations by id.
Dataset load_jsonl(const std::filesystem::path& path);
void save_jsonl(const Dataset& dataset, const std::filesystem::path& path);

struct SplitSpec {
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
};

// Deterministic 9:1-style split; val gets round(n * val_fraction) instances.
// Relative instance order is preserved on both sides.
std::pair<Dataset, Dataset> train_val_split(const Dataset& dataset, const SplitSpec& spec);

// Uniform batch; without replacement inside the batch while size <= |dataset|,
// with replacement otherwise. Advances rng.
std::vector<Instance> sample_batch(const Dataset& dataset, std::size_t size, Rng& rng);

// n/2 easy + n/2 hard instances sampled without replacement, tagged with their
// origin. Callers must remove the returned ids from their training pool
// (subtract_by_ids); train_suml enforces the disjointness.
Dataset build_meta_test(const Dataset& pool_easy, const Dataset& pool_hard, std::size_t n,
                        std::uint64_t seed);

Dataset subtract_by_ids(const Dataset& dataset, const std::unordered_set<std::string>& ids);

std::unordered_set<std::string> id_set(const Dataset& dataset);

}  // namespace suml

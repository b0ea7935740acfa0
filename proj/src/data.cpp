#include "suml/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "suml/serialize.hpp"

namespace suml {

std::string subset_tag_name(SubsetTag tag) {
    switch (tag) {
        case SubsetTag::Easy: return "easy";
        case SubsetTag::Hard: return "hard";
        case SubsetTag::Unknown: return "unknown";
    }
    return "unknown";
}

SubsetTag subset_tag_from_name(const std::string& name) {
    if (name == "easy") return SubsetTag::Easy;
    if (name == "hard") return SubsetTag::Hard;
    if (name == "unknown") return SubsetTag::Unknown;
    throw std::runtime_error("unknown subset_tag: " + name);
}

Dataset load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

    Dataset dataset;
    dataset.name = path.stem().string();

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> bad_label_ids;
    std::vector<std::string> bad_choice_ids;
    std::unordered_set<std::string> seen_ids;
    std::vector<std::string> duplicate_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed record: " + e.what());
        }
        Instance instance;
        try {
            instance = instance_from_json(j);
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
        if (instance.num_choices() < 2) bad_choice_ids.push_back(instance.id);
        if (instance.label < 0 || instance.label >= instance.num_choices())
            bad_label_ids.push_back(instance.id);
        if (!seen_ids.insert(instance.id).second) duplicate_ids.push_back(instance.id);
        dataset.instances.push_back(std::move(instance));
    }

    auto join = [](const std::vector<std::string>& ids) {
        std::ostringstream out;
        for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? ", " : "") << ids[i];
        return out.str();
    };
    if (!bad_label_ids.empty())
        throw std::runtime_error(path.string() + ": label out of range for: " + join(bad_label_ids));
    if (!bad_choice_ids.empty())
        throw std::runtime_error(path.string() + ": fewer than 2 choices for: " + join(bad_choice_ids));
    if (!duplicate_ids.empty())
        throw std::runtime_error(path.string() + ": duplicate ids: " + join(duplicate_ids));
    return dataset;
}

void save_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path.string());
    for (const Instance& instance : dataset.instances) {
        out << instance_to_json(instance).dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::pair<Dataset, Dataset> train_val_split(const Dataset& dataset, const SplitSpec& spec) {
    if (spec.val_fraction <= 0.0 || spec.val_fraction >= 1.0)
        throw std::invalid_argument("train_val_split: val_fraction must be in (0, 1)");
    if (dataset.size() < 10)
        throw std::invalid_argument("train_val_split: dataset too small (need >= 10 instances)");

    auto val_n = static_cast<std::size_t>(std::llround(dataset.size() * spec.val_fraction));
    Rng rng(spec.seed);
    auto picked = rng.sample_without_replacement(dataset.size(), val_n);
    std::vector<bool> in_val(dataset.size(), false);
    for (std::size_t i : picked) in_val[i] = true;

    Dataset train{dataset.name + "-train", {}};
    Dataset val{dataset.name + "-val", {}};
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (in_val[i] ? val : train).instances.push_back(dataset.instances[i]);
    }
    return {std::move(train), std::move(val)};
}

std::vector<Instance> sample_batch(const Dataset& dataset, std::size_t size, Rng& rng) {
    if (dataset.empty()) throw std::invalid_argument("sample_batch: empty dataset");
    if (size < 1) throw std::invalid_argument("sample_batch: size must be >= 1");

    std::vector<Instance> batch;
    batch.reserve(size);
    if (size <= dataset.size()) {
        for (std::size_t i : rng.sample_without_replacement(dataset.size(), size))
            batch.push_back(dataset.instances[i]);
    } else {
        for (std::size_t i = 0; i < size; ++i)
            batch.push_back(dataset.instances[rng.index(dataset.size())]);
    }
    return batch;
}

Dataset build_meta_test(const Dataset& pool_easy, const Dataset& pool_hard, std::size_t n,
                        std::uint64_t seed) {
    if (n % 2 != 0) throw std::invalid_argument("build_meta_test: n must be even");
    std::size_t half = n / 2;
    auto check = [&](const Dataset& pool, const char* which) {
        if (pool.size() < half) {
            std::ostringstream msg;
            msg << "build_meta_test: " << which << " pool has " << pool.size()
                << " instances, need " << half << " (short by " << (half - pool.size()) << ")";
            throw std::invalid_argument(msg.str());
        }
    };
    check(pool_easy, "easy");
    check(pool_hard, "hard");

    Rng rng(seed);
    Dataset meta{"meta-test", {}};
    auto draw = [&](const Dataset& pool, SubsetTag tag) {
        auto picked = rng.sample_without_replacement(pool.size(), half);
        for (std::size_t i : picked) {
            Instance instance = pool.instances[i];
            instance.subset_tag = tag;
            meta.instances.push_back(std::move(instance));
        }
    };
    draw(pool_easy, SubsetTag::Easy);
    draw(pool_hard, SubsetTag::Hard);
    return meta;
}

Dataset subtract_by_ids(const Dataset& dataset, const std::unordered_set<std::string>& ids) {
    Dataset out{dataset.name, {}};
    for (const Instance& instance : dataset.instances) {
        if (!ids.contains(instance.id)) out.instances.push_back(instance);
    }
    return out;
}

std::unordered_set<std::string> id_set(const Dataset& dataset) {
    std::unordered_set<std::string> ids;
    ids.reserve(dataset.size());
    for (const Instance& instance : dataset.instances) ids.insert(instance.id);
    return ids;
}

}  // namespace suml

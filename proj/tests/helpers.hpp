#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "suml/data.hpp"
#include "suml/model.hpp"
#include "suml/trainer.hpp"
#include "suml/vocab.hpp"

namespace suml::testing {

namespace fs = std::filesystem;

// Unique scratch directory, removed on destruction.
class TempDir {
  public:
    TempDir() {
        static std::mt19937_64 gen(std::random_device{}());
        std::ostringstream name;
        name << "suml-test-" << std::hex << gen();
        path_ = fs::temp_directory_path() / name.str();
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path file(const std::string& name) const { return path_ / name; }

  private:
    fs::path path_;
};

inline Instance make_instance(std::string id, std::string context,
                              std::vector<std::string> choices, int label) {
    Instance instance;
    instance.id = std::move(id);
    instance.context = std::move(context);
    instance.choices = std::move(choices);
    instance.label = label;
    return instance;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Minimal hand-built scorer over the vocabulary {<unk>, a, b}: d = h = 1,
// emb(a) = 1, emb(b) = -1, identity-ish MLP. Any choice whose mean embedding
// is positive outscores one whose mean is <= 0, so single-token choices "a"
// and "b" order as a > b in both encode modes (unknown context tokens embed
// to zero and only dilute the mean).
struct ToyScorer {
    Vocab vocab;
    ModelParams params;

    ToyScorer() {
        vocab = vocab_from_tokens({"<unk>", "a", "b"});
        ModelDims dims{3, 1, 1, 3};
        params = ModelParams{dims, std::vector<double>(dims.total(), 0.0)};
        params.flat[1] = 1.0;                  // emb(a)
        params.flat[2] = -1.0;                 // emb(b)
        params.flat[dims.off_w1()] = 1.0;      // w1
        params.flat[dims.off_w2()] = 1.0;      // w2
    }

    Checkpoint checkpoint(std::string kind = "erm", std::uint64_t seed = 0) const {
        Checkpoint cp;
        cp.kind = std::move(kind);
        cp.vocab = vocab;
        cp.config.seed = seed;
        cp.config.embed_dim = 1;
        cp.config.hidden_dim = 1;
        cp.state.params = params;
        cp.state.best_params = params;
        return cp;
    }
};

// An instance the toy scorer gets right iff the label sits on the "a" choice.
inline Instance toy_solvable(std::string id, bool label_on_a,
                             std::optional<SubsetTag> tag = std::nullopt) {
    Instance instance = make_instance(std::move(id), "ctx", {"a", "b"}, label_on_a ? 0 : 1);
    instance.subset_tag = tag;
    return instance;
}

}  // namespace suml::testing

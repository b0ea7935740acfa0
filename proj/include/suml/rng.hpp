#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace suml {

// Deterministic random stream. All sampling in the project goes through this
// wrapper so that runs are bit-reproducible across platforms; std::*_distribution
// output is implementation-defined, so the helpers are hand-rolled.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t index(std::uint64_t n);

    // Standard normal, Box-Muller with a cached spare.
    double normal();

    template <class T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(index(i + 1));
            std::swap(v[i], v[j]);
        }
    }

    // First k positions of a Fisher-Yates shuffle of [0, n); k <= n.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    // Full state round trip, used by checkpoint resume.
    std::string serialize() const;
    static Rng deserialize(const std::string& text);

    bool operator==(const Rng& other) const = default;

  private:
    Rng() : engine_(0) {}

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace suml

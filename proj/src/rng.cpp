#include "suml/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace suml {

std::uint64_t Rng::index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: n must be positive");
    unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
        std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            product = static_cast<unsigned __int128>(next_u64()) * n;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

// Layout: "<flag> <spare-hexfloat> <engine words...>". Hexfloat keeps the
// Box-Muller spare exact; the engine state is the textual mt19937_64 dump.
std::string Rng::serialize() const {
    std::ostringstream out;
    out << (has_spare_ ? 1 : 0) << ' ' << std::hexfloat << spare_ << ' ' << engine_;
    return out.str();
}

Rng Rng::deserialize(const std::string& text) {
    std::istringstream in(text);
    int flag = 0;
    std::string spare_token;
    if (!(in >> flag >> spare_token)) throw std::runtime_error("bad rng state");
    Rng rng;
    rng.has_spare_ = (flag != 0);
    rng.spare_ = std::strtod(spare_token.c_str(), nullptr);
    if (!(in >> rng.engine_)) throw std::runtime_error("bad rng state");
    return rng;
}

}  // namespace suml

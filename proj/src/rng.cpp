#include "stpca/rng.hpp"

namespace stpca {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : key_(splitmix64(seed)), engine_(key_) {}

Rng::Rng(std::uint64_t seed, std::uint64_t run_index, StreamPurpose purpose)
    : key_(splitmix64(splitmix64(splitmix64(seed) ^ run_index) ^
                      static_cast<std::uint64_t>(purpose))),
      engine_(key_) {}

Rng Rng::split(std::uint64_t tag) const {
    Rng child(0);
    child.key_ = splitmix64(key_ ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
    child.engine_.seed(child.key_);
    return child;
}

double Rng::normal(double mean, double stddev) {
    return mean + stddev * normal_(engine_);
}

double Rng::uniform01() {
    return std::generate_canonical<double, 53>(engine_);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(engine_);
}

}  // namespace stpca

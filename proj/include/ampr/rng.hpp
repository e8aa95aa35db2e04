#pragma once

#include <cmath>
#include <cstdint>

namespace ampr {

// splitmix64: fast 64-bit stream used both as a PRNG and to derive
// independent per-replicate seeds from a master seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1); never returns 0 so log() below is safe
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; one spare value is cached
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = next_uniform();
        double v = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double theta = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Deterministic seed for replicate `index` of stream `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 s(master ^ (0xa0761d6478bd642fULL + index * 0xe7037ed1a0b428dbULL));
    s.next_u64();
    return s.next_u64();
}

}  // namespace ampr

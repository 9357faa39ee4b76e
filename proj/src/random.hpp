#ifndef ALPHAFAIR_SRC_RANDOM_HPP_
#define ALPHAFAIR_SRC_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace alphafair::detail {

// std::mt19937_64 output is fixed by the standard, the distributions are
// not. These helpers keep generated instances identical across toolchains.
class Rng {
 public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1).
    double open_unit() {
        double u;
        do {
            u = unit();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

 private:
    std::mt19937_64 engine_;
};

}  // namespace alphafair::detail

#endif  // ALPHAFAIR_SRC_RANDOM_HPP_

#pragma once

#include <cstdint>
#include <random>

namespace csent {

// All stochastic code in the library draws through this wrapper instead of
// <random> distributions, whose output is implementation-defined.  Everything
// here is pinned down bit-for-bit by the mt19937_64 stream, so a fixed seed
// gives identical runs on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n). Rejection-free modulo is fine here: n is
    // always tiny relative to 2^64, the bias is unobservable.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    template <typename Seq>
    void shuffle(Seq& seq) {
        if (seq.size() < 2) return;
        for (std::size_t i = seq.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(seq[i], seq[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace csent

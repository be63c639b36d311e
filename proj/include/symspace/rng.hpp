#pragma once

#include <cstdint>

namespace symspace {

/// Deterministic splittable generator (splitmix64 core).  Every randomized
/// harness derives one child stream per trial index, so results do not depend
/// on evaluation order and trials can run concurrently.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Child stream; independent of further draws from the parent.
    Rng split(std::uint64_t tag) const {
        Rng probe(state_ ^ (0xd1342543de82ef95ULL * (tag + 1)));
        Rng child(probe.next());
        return child;
    }

    /// Uniform in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Uniform in [lo, hi], inclusive.
    long long range(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t state_;
};

} // namespace symspace

#pragma once

// Test-side oracles, independent of the library's formula-based code paths.
// A primitive zero modulo p^3 of a quadratic form with coefficient valuations
// <= 1 lifts to a genuine p-adic zero by Hensel's lemma (odd p), and every
// genuine zero scales to such a primitive solution, so counting solutions
// modulo p^3 decides isotropy exactly.

#include <cstdint>
#include <vector>

namespace oracles {

inline long long pow3(long long p) { return p * p * p; }

/// Solubility of a x^2 + b y^2 = z^2 over Q_p, by enumeration modulo p^3.
inline bool hilbert_soluble(long long a, long long b, long long p) {
    const long long m = pow3(p);
    auto mod = [&](long long t) { return ((t % m) + m) % m; };
    std::vector<char> sq_any(static_cast<std::size_t>(m), 0);
    std::vector<char> sq_unit(static_cast<std::size_t>(m), 0);
    for (long long z = 0; z < m; ++z) {
        const long long s = z * z % m;
        sq_any[static_cast<std::size_t>(s)] = 1;
        if (z % p != 0) sq_unit[static_cast<std::size_t>(s)] = 1;
    }
    for (long long x = 0; x < m; ++x)
        for (long long y = 0; y < m; ++y) {
            const long long lhs = mod(mod(a * x % m * x) + mod(b * y % m * y));
            const bool xy_primitive = (x % p != 0) || (y % p != 0);
            if (xy_primitive ? sq_any[static_cast<std::size_t>(lhs)]
                             : sq_unit[static_cast<std::size_t>(lhs)])
                return true;
        }
    return false;
}

/// Number of solutions of sum_i a_i x_i^2 = target mod m, x_i mod m,
/// via value-count convolution.
inline std::uint64_t zero_count_mod(const std::vector<long long>& coeffs, long long target,
                                    long long m) {
    auto mod = [&](long long t) { return ((t % m) + m) % m; };
    std::vector<std::uint64_t> acc(static_cast<std::size_t>(m), 0);
    acc[static_cast<std::size_t>(mod(-target))] = 1;
    for (long long a : coeffs) {
        std::vector<std::uint64_t> vals(static_cast<std::size_t>(m), 0);
        for (long long x = 0; x < m; ++x) ++vals[static_cast<std::size_t>(mod(a * x % m * x))];
        std::vector<std::uint64_t> next(static_cast<std::size_t>(m), 0);
        for (long long u = 0; u < m; ++u) {
            if (!acc[static_cast<std::size_t>(u)]) continue;
            for (long long v = 0; v < m; ++v)
                next[static_cast<std::size_t>((u + v) % m)] +=
                    acc[static_cast<std::size_t>(u)] * vals[static_cast<std::size_t>(v)];
        }
        acc = std::move(next);
    }
    return acc[0];
}

/// Exact isotropy test over Q_p for coefficient valuations <= 1: a primitive
/// zero modulo p^3 exists iff the count modulo p^3 exceeds the count of
/// non-primitive solutions (x = p*y with f(y) = 0 mod p, lifted freely).
inline bool isotropic(const std::vector<long long>& coeffs, long long p) {
    const long long m = pow3(p);
    const std::uint64_t total = zero_count_mod(coeffs, 0, m);
    const std::uint64_t modp = zero_count_mod(coeffs, 0, p);
    std::uint64_t lift = 1;
    for (std::size_t i = 0; i < coeffs.size(); ++i) lift *= static_cast<std::uint64_t>(p);
    return total > modp * lift;
}

/// Exact representability test: f represents c iff f perp <-c> is isotropic.
inline bool represents(std::vector<long long> coeffs, long long c, long long p) {
    coeffs.push_back(-c);
    return isotropic(coeffs, p);
}

} // namespace oracles

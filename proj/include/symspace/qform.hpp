#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "symspace/padic.hpp"

namespace symspace {

// ---------------------------------------------------------------------------
// Diagonal quadratic forms over Q_p and their complete invariants
// ---------------------------------------------------------------------------

/// a_1 X_1^2 + ... + a_n X_n^2 with all a_i nonzero.
struct DiagonalForm {
    std::vector<PAdicNumber> coeffs;

    explicit DiagonalForm(std::vector<PAdicNumber> a) : coeffs(std::move(a)) {
        if (coeffs.empty()) throw DomainError("DiagonalForm: rank must be >= 1");
        for (const auto& c : coeffs)
            if (c.vanishes()) throw DomainError("DiagonalForm: zero coefficient");
    }

    int rank() const { return static_cast<int>(coeffs.size()); }
};

inline DiagonalForm form_from_classes(const PrimeConfig& cfg,
                                      const std::vector<SquareClass>& classes) {
    std::vector<PAdicNumber> a;
    a.reserve(classes.size());
    for (SquareClass c : classes) a.push_back(class_representative(cfg, c));
    return DiagonalForm(std::move(a));
}

/// Rank, discriminant square class, Hasse symbol (product of pairwise Hilbert
/// symbols; +1 for rank 1 by the empty-product convention).
struct FormInvariants {
    int rank;
    SquareClass disc;
    int hasse;

    bool operator==(const FormInvariants& o) const {
        return rank == o.rank && disc == o.disc && hasse == o.hasse;
    }
};

inline FormInvariants invariants(const PrimeConfig& cfg, const DiagonalForm& f) {
    FormInvariants inv{f.rank(), SquareClass::One, 1};
    for (const auto& a : f.coeffs) inv.disc = inv.disc * square_class_of(cfg, a);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i)
        for (std::size_t j = i + 1; j < f.coeffs.size(); ++j)
            inv.hasse *= hilbert(cfg, f.coeffs[i], f.coeffs[j]);
    return inv;
}

/// Complete invariants: equal rank, discriminant class and Hasse symbol.
inline bool equivalent(const PrimeConfig& cfg, const DiagonalForm& f, const DiagonalForm& g) {
    return invariants(cfg, f) == invariants(cfg, g);
}

/// Isotropy over Q_p by rank:
///   1: never; 2: disc = class(-1); 3: (-1,-d) = hasse;
///   4: always unless disc = 1 and hasse != (-1,-1); >= 5: always.
inline bool is_isotropic(const PrimeConfig& cfg, const DiagonalForm& f) {
    const int n = f.rank();
    if (n == 1) return false;
    const FormInvariants inv = invariants(cfg, f);
    const PAdicNumber minus_one = PAdicNumber::from_int(cfg, -1);
    if (n == 2) return inv.disc == square_class_of(cfg, minus_one);
    if (n == 3) {
        PAdicNumber d = f.coeffs[0];
        for (std::size_t i = 1; i < f.coeffs.size(); ++i) d = d * f.coeffs[i];
        return hilbert(cfg, minus_one, -d) == inv.hasse;
    }
    if (n == 4)
        return !(inv.disc == SquareClass::One &&
                 inv.hasse != hilbert(cfg, minus_one, minus_one));
    return true;
}

/// c != 0 is represented iff f perp <-c> is isotropic.
inline bool represents(const PrimeConfig& cfg, const DiagonalForm& f, const PAdicNumber& c) {
    if (c.vanishes()) throw DomainError("represents: c must be nonzero");
    std::vector<PAdicNumber> ext = f.coeffs;
    ext.push_back(-c);
    return is_isotropic(cfg, DiagonalForm(std::move(ext)));
}

// ---------------------------------------------------------------------------
// Explicit representation witnesses
// ---------------------------------------------------------------------------

namespace detail {

inline long long int_pow(long long p, long long e) {
    long long r = 1;
    for (long long i = 0; i < e; ++i) r *= p;
    return r;
}

/// Deterministic candidate stream for one coordinate: 0, the integers
/// 1..p^3, then short expansions t/p^s at negative valuations.  The needed
/// depth is bounded because a non-square stays a non-square under
/// perturbation one digit past its valuation (odd p), so cancellation in
/// c - a t^2 cannot hide arbitrarily deep.  Stops early when the visitor
/// returns true.
template <class Visit>
bool visit_coordinate_candidates(const PrimeConfig& cfg, Visit&& visit) {
    const long long limit = cfg.p * cfg.p * cfg.p;
    if (visit(PAdicNumber::zero(cfg))) return true;
    for (long long t = 1; t <= limit; ++t)
        if (visit(PAdicNumber::from_int(cfg, t))) return true;
    for (long long s = 1; s <= 4; ++s)
        for (long long t = 1; t <= limit; ++t) {
            if (t % cfg.p == 0) continue;
            if (visit(PAdicNumber::from_rational(cfg, t, int_pow(cfg.p, s)))) return true;
        }
    return false;
}

} // namespace detail

/// A vector x with f(x) = c in all tracked digits.  Deterministic order:
/// single-coordinate witnesses sqrt(c/a_i) by index first, then the leading
/// coordinate runs through 0, 1, 2, ... (then short denominators) and the
/// tail is solved recursively, descending only when the tail still
/// represents the remainder.
inline std::vector<PAdicNumber> represent_witness(const PrimeConfig& cfg,
                                                  const DiagonalForm& f,
                                                  const PAdicNumber& c) {
    if (!represents(cfg, f, c)) {
        const FormInvariants inv = invariants(cfg, f);
        throw DomainError(std::string("represent_witness: value not represented (rank ") +
                          std::to_string(inv.rank) + ", disc " + class_name(inv.disc) +
                          ", hasse " + std::to_string(inv.hasse) + ")");
    }
    const int n = f.rank();
    std::vector<PAdicNumber> x(static_cast<std::size_t>(n), PAdicNumber::zero(cfg));
    // single-coordinate witnesses first
    for (int i = 0; i < n; ++i) {
        const PAdicNumber q = c / f.coeffs[static_cast<std::size_t>(i)];
        if (auto r = (q.valuation() % 2 == 0 && legendre_unit(q) == 1)
                         ? hensel_sqrt(q)
                         : std::nullopt) {
            x[static_cast<std::size_t>(i)] = *r;
            return x;
        }
    }
    if (n == 1) throw DomainError("represent_witness: internal rank-1 failure");
    // peel the leading coordinate
    std::vector<PAdicNumber> tail_coeffs(f.coeffs.begin() + 1, f.coeffs.end());
    const DiagonalForm tail(std::move(tail_coeffs));
    const bool found = detail::visit_coordinate_candidates(cfg, [&](const PAdicNumber& t) {
        PAdicNumber rest = c;
        if (!t.is_zero()) rest = c - f.coeffs[0] * t * t;
        if (rest.is_zero()) {
            x[0] = t;
            return true;  // tail stays zero
        }
        if (rest.is_zero_mod()) return false;  // class unresolved at this depth
        if (!represents(cfg, tail, rest)) return false;
        std::vector<PAdicNumber> y = represent_witness(cfg, tail, rest);
        x[0] = t;
        for (int i = 1; i < n; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i - 1)];
        return true;
    });
    if (!found) throw DomainError("represent_witness: candidate search exhausted");
    return x;
}

inline PAdicNumber evaluate(const DiagonalForm& f, const std::vector<PAdicNumber>& x) {
    PAdicNumber acc = x[0].zero_like();
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        if (x[i].is_zero()) continue;
        acc = acc + f.coeffs[i] * x[i] * x[i];
    }
    return acc;
}

// ---------------------------------------------------------------------------
// The image criterion and the realizable class tuples
// ---------------------------------------------------------------------------

/// A diagonal class is realizable iff its form is equivalent to the sum of
/// squares X_1^2 + ... + X_n^2, i.e. trivial discriminant and Hasse +1.
inline bool in_image_iota(const PrimeConfig& cfg, const DiagonalForm& f) {
    const FormInvariants inv = invariants(cfg, f);
    return inv.disc == SquareClass::One && inv.hasse == 1;
}

/// All sorted n-tuples of square classes whose diagonal form passes
/// in_image_iota (class order One < Xi < Pi < XiPi).
inline std::vector<std::vector<SquareClass>> j_representatives(int n, const PrimeConfig& cfg) {
    if (n < 1) throw DomainError("j_representatives: n >= 1 required");
    std::vector<std::vector<SquareClass>> out;
    std::vector<unsigned> tuple(static_cast<std::size_t>(n), 0);
    // enumerate nondecreasing tuples over {0,1,2,3}
    while (true) {
        std::vector<SquareClass> classes;
        classes.reserve(static_cast<std::size_t>(n));
        for (unsigned t : tuple) classes.push_back(static_cast<SquareClass>(t));
        if (in_image_iota(cfg, form_from_classes(cfg, classes))) out.push_back(classes);
        int i = n - 1;
        while (i >= 0 && tuple[static_cast<std::size_t>(i)] == 3) --i;
        if (i < 0) break;
        const unsigned next = tuple[static_cast<std::size_t>(i)] + 1;
        for (int j = i; j < n; ++j) tuple[static_cast<std::size_t>(j)] = next;
    }
    return out;
}

} // namespace symspace

#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "symspace/lattice.hpp"
#include "symspace/qform.hpp"
#include "symspace/rng.hpp"

namespace symspace {

// ---------------------------------------------------------------------------
// The symmetric space GL_n(Q_p) / O_n: double cosets and the constructive
// Cartan factorization g = h * y * s * kappa.
// ---------------------------------------------------------------------------

/// Sorted tuple of square classes; only class tuples whose diagonal form is
/// equivalent to the sum of squares are realizable.
using CosetClass = std::vector<SquareClass>;

inline std::string class_tuple_name(const CosetClass& cls) {
    std::string s = "(";
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (i) s += ",";
        s += class_name(cls[i]);
    }
    return s + ")";
}

/// Canonical form of a class tuple: within each uniformizer parity, a
/// unimodular diagonal block <u_1,...,u_r> is integrally congruent to
/// <1,...,1,disc>, so only the per-parity rank and discriminant survive
/// K-twisting.  (The finer multiset does classify the (H,N)-double cosets of
/// the Gram-diagonal elements, but the components H y_j S K overlap in G.)
inline CosetClass canonical_class(const CosetClass& cls) {
    int rank[2] = {0, 0};
    bool xi[2] = {false, false};
    for (SquareClass c : cls) {
        const int par = class_has_pi(c) ? 1 : 0;
        ++rank[par];
        if (class_has_xi(c)) xi[par] = !xi[par];
    }
    CosetClass out;
    for (int par = 0; par < 2; ++par) {
        const SquareClass base = par ? SquareClass::Pi : SquareClass::One;
        for (int i = 0; i + 1 < rank[par]; ++i) out.push_back(base);
        if (rank[par] > 0) out.push_back(xi[par] ? base * SquareClass::Xi : base);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

inline SquareClass parity_class(long long v) {
    return (((v % 2) + 2) % 2) != 0 ? SquareClass::Pi : SquareClass::One;
}

/// Square classes of a diagonal Gram, reduced to the canonical label of the
/// integral congruence class: per Jordan scale, rank and discriminant.
inline CosetClass canonical_label_of_gram(const PrimeConfig& cfg,
                                          const std::vector<PAdicNumber>& d) {
    std::vector<long long> scales;
    std::vector<int> ranks;
    std::vector<bool> xis;
    for (const auto& x : d) {
        const long long v = x.valuation();
        const bool is_xi = legendre_unit(x) == -1;
        std::size_t k = 0;
        while (k < scales.size() && scales[k] != v) ++k;
        if (k == scales.size()) {
            scales.push_back(v);
            ranks.push_back(0);
            xis.push_back(false);
        }
        ++ranks[k];
        if (is_xi) xis[k] = !xis[k];
    }
    (void)cfg;
    CosetClass out;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const SquareClass base = parity_class(scales[k]);
        for (int i = 0; i + 1 < ranks[k]; ++i) out.push_back(base);
        out.push_back(xis[k] ? base * SquareClass::Xi : base);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// The double-coset label of g: per Jordan scale of the Gram form of the
/// orthogonal-basis factor, the rank and the discriminant class.  This datum
/// is a complete invariant of the integral congruence class of tr(g)*g for
/// odd p, hence constant on H g K.
inline CosetClass classify(const PrimeConfig& cfg, const Mat<PAdicNumber>& g) {
    const EkFactor fac = ek_factor(g);
    const Mat<PAdicNumber> gram = fac.e.transpose() * fac.e;
    std::vector<PAdicNumber> d;
    for (int i = 0; i < g.rows(); ++i) d.push_back(gram.at(i, i));
    return detail::canonical_label_of_gram(cfg, d);
}

namespace detail {

/// Sign-normalize a column: flip so that the first minimal-valuation
/// coordinate has unit residue in the lower half range, mirroring the Hensel
/// root tie-break.  Keeps witnesses reproducible.
inline void sign_normalize_column(const PrimeConfig& cfg, std::vector<PAdicNumber>& col) {
    long long best = 0;
    int lead = -1;
    for (std::size_t i = 0; i < col.size(); ++i) {
        auto v = col[i].regular_valuation();
        if (v && (lead < 0 || *v < best)) { lead = static_cast<int>(i); best = *v; }
    }
    if (lead < 0) return;
    if (col[static_cast<std::size_t>(lead)].unit_residue() > (cfg.p - 1) / 2)
        for (auto& x : col) x = -x;
}

} // namespace detail

/// Deterministic witness y with tr(y)*y = diag(rep(c_1), ..., rep(c_n)).
/// Column i represents rep(c_i) inside the orthogonal complement of the
/// previous columns; throws naming the failing invariant for unrealizable
/// class tuples.
inline Mat<PAdicNumber> witness(const CosetClass& cls, const PrimeConfig& cfg) {
    const int n = static_cast<int>(cls.size());
    const DiagonalForm target = form_from_classes(cfg, cls);
    if (!in_image_iota(cfg, target)) {
        const FormInvariants inv = invariants(cfg, target);
        throw DomainError("witness: unrealizable class " + class_tuple_name(cls) +
                          (inv.disc != SquareClass::One
                               ? std::string(" (discriminant ") + class_name(inv.disc) + ")"
                               : std::string(" (hasse ") + std::to_string(inv.hasse) + ")"));
    }
    Mat<PAdicNumber> y(n, n, PAdicNumber::zero(cfg));
    // complement basis of the standard form, kept orthogonal with diagonal
    // Gram `gram`
    Mat<PAdicNumber> comp = Mat<PAdicNumber>::identity(n, PAdicNumber::zero(cfg));
    std::vector<PAdicNumber> gram(static_cast<std::size_t>(n),
                                  PAdicNumber::from_int(cfg, 1));
    for (int i = 0; i < n; ++i) {
        const int r = n - i;
        const PAdicNumber t = class_representative(cfg, cls[static_cast<std::size_t>(i)]);
        std::vector<PAdicNumber> small_coeffs(gram.begin(), gram.begin() + r);
        const DiagonalForm restricted(std::move(small_coeffs));
        const std::vector<PAdicNumber> xs = represent_witness(cfg, restricted, t);
        std::vector<PAdicNumber> col(static_cast<std::size_t>(n), PAdicNumber::zero(cfg));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < r; ++b)
                if (!comp.at(a, b).is_zero() && !xs[static_cast<std::size_t>(b)].is_zero())
                    col[static_cast<std::size_t>(a)] =
                        col[static_cast<std::size_t>(a)] +
                        comp.at(a, b) * xs[static_cast<std::size_t>(b)];
        y.set_col(i, col);
        if (i + 1 == n) break;
        // split the small space as <x> + x^perp: extend x to a basis by
        // dropping the coordinate of minimal valuation, then project
        int drop = -1;
        long long best = 0;
        for (int b = 0; b < r; ++b) {
            auto v = xs[static_cast<std::size_t>(b)].regular_valuation();
            if (v && (drop < 0 || *v < best)) { drop = b; best = *v; }
        }
        if (drop < 0) throw PrecisionError("witness: vanishing representation vector");
        Mat<PAdicNumber> next(n, r - 1, PAdicNumber::zero(cfg));
        std::vector<PAdicNumber> next_gram;
        Mat<PAdicNumber> small_gram(r - 1, r - 1, PAdicNumber::zero(cfg));
        std::vector<std::vector<PAdicNumber>> small_vecs;
        int out = 0;
        for (int b = 0; b < r; ++b) {
            if (b == drop) continue;
            // e_b - (B(x,e_b)/B(x,x)) x in small coordinates
            std::vector<PAdicNumber> v(static_cast<std::size_t>(r), PAdicNumber::zero(cfg));
            v[static_cast<std::size_t>(b)] = PAdicNumber::from_int(cfg, 1);
            const PAdicNumber num = gram[static_cast<std::size_t>(b)] * xs[static_cast<std::size_t>(b)];
            if (!num.vanishes()) {
                const PAdicNumber fcoef = num / t;
                for (int a = 0; a < r; ++a)
                    v[static_cast<std::size_t>(a)] =
                        v[static_cast<std::size_t>(a)] - fcoef * xs[static_cast<std::size_t>(a)];
            }
            small_vecs.push_back(std::move(v));
            ++out;
        }
        // Gram of the projected vectors under diag(gram)
        for (int a = 0; a < out; ++a)
            for (int b = a; b < out; ++b) {
                PAdicNumber acc = PAdicNumber::zero(cfg);
                for (int q = 0; q < r; ++q) {
                    const auto& xa = small_vecs[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
                    const auto& xb = small_vecs[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
                    if (xa.is_zero() || xb.is_zero()) continue;
                    acc = acc + xa * gram[static_cast<std::size_t>(q)] * xb;
                }
                small_gram.at(a, b) = acc;
                small_gram.at(b, a) = acc;
            }
        // re-diagonalize so the next restriction is diagonal again
        const Congruence cong = diagonalize(small_gram);
        next_gram.clear();
        for (int a = 0; a < out; ++a) next_gram.push_back(cong.d.at(a, a));
        // lift to ambient coordinates: comp * small_vecs * C
        Mat<PAdicNumber> lifted(n, out, PAdicNumber::zero(cfg));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < out; ++b) {
                PAdicNumber acc = PAdicNumber::zero(cfg);
                for (int q = 0; q < r; ++q) {
                    const auto& w = small_vecs[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
                    if (comp.at(a, q).is_zero() || w.is_zero()) continue;
                    acc = acc + comp.at(a, q) * w;
                }
                lifted.at(a, b) = acc;
            }
        next = lifted * cong.c;
        for (int b = 0; b < out; ++b) {
            auto colv = next.col(b);
            detail::sign_normalize_column(cfg, colv);
            next.set_col(b, colv);
        }
        // write back into a full-width complement matrix
        Mat<PAdicNumber> comp_next = Mat<PAdicNumber>(n, n, PAdicNumber::zero(cfg));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < out; ++b) comp_next.at(a, b) = next.at(a, b);
        comp = comp_next;
        gram = next_gram;
        gram.resize(static_cast<std::size_t>(n), PAdicNumber::zero(cfg));
    }
    return y;
}

/// Witness tuple of the factorization g = h * y * s * kappa with h
/// orthogonal, y the canonical class witness, s diagonal and kappa in K.
struct CartanFactorization {
    Mat<PAdicNumber> h;
    Mat<PAdicNumber> y;
    Mat<PAdicNumber> s;
    Mat<PAdicNumber> kappa;
    CosetClass cls;
};

/// Valuations of the diagonal of s.
inline std::vector<long long> valuation_vector(const CartanFactorization& fac) {
    std::vector<long long> v;
    for (int i = 0; i < fac.s.rows(); ++i) v.push_back(fac.s.at(i, i).valuation());
    return v;
}

namespace detail {

inline Mat<PAdicNumber> permutation_matrix(const PrimeConfig& cfg,
                                           const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    Mat<PAdicNumber> w(n, n, PAdicNumber::zero(cfg));
    const PAdicNumber one = PAdicNumber::from_int(cfg, 1);
    for (int j = 0; j < n; ++j) w.at(perm[static_cast<std::size_t>(j)], j) = one;
    return w;
}

/// Integral vector x with sum u_i x_i^2 = 1 for a diagonal of units: a
/// single-coordinate square root when available, else a two-coordinate
/// residue solution lifted in the first unit slot (a binary unimodular form
/// covers every residue class).
inline std::vector<PAdicNumber> integral_unit_one_witness(const PrimeConfig& cfg,
                                                          const std::vector<PAdicNumber>& units) {
    const std::size_t r = units.size();
    std::vector<PAdicNumber> x(r, PAdicNumber::zero(cfg));
    for (std::size_t j = 0; j < r; ++j) {
        if (legendre_unit(units[j]) == 1) {
            x[j] = *hensel_sqrt(units[j].inverse());
            return x;
        }
    }
    if (r < 2) throw DomainError("integral_unit_one_witness: impossible class");
    for (long long a = 0; a < cfg.p; ++a)
        for (long long b = 0; b < cfg.p; ++b) {
            if (a == 0 && b == 0) continue;
            const long long u0 = units[0].unit_residue();
            const long long u1 = units[1].unit_residue();
            if (((u0 * a * a + u1 * b * b) % cfg.p + cfg.p) % cfg.p != 1 % cfg.p) continue;
            if (a != 0) {
                x[1] = PAdicNumber::from_int(cfg, b);
                const PAdicNumber rest =
                    PAdicNumber::from_int(cfg, 1) - units[1] * x[1] * x[1];
                x[0] = *hensel_sqrt(rest / units[0]);
            } else {
                x[0] = PAdicNumber::from_int(cfg, a);
                const PAdicNumber rest =
                    PAdicNumber::from_int(cfg, 1) - units[0] * x[0] * x[0];
                x[1] = *hensel_sqrt(rest / units[1]);
            }
            return x;
        }
    throw DomainError("integral_unit_one_witness: residue search failed");
}

/// GL_r(Z_p) transform T with tr(T) diag(units) T = diag(1,...,1,disc).
inline Mat<PAdicNumber> unimodular_block_transform(const PrimeConfig& cfg,
                                                   const std::vector<PAdicNumber>& units) {
    const int r = static_cast<int>(units.size());
    if (r == 1) return Mat<PAdicNumber>::identity(1, PAdicNumber::zero(cfg));
    const std::vector<PAdicNumber> x = integral_unit_one_witness(cfg, units);
    int drop = -1;
    for (int j = 0; j < r && drop < 0; ++j)
        if (x[static_cast<std::size_t>(j)].is_regular() &&
            x[static_cast<std::size_t>(j)].valuation() == 0)
            drop = j;
    if (drop < 0) throw DomainError("unimodular_block_transform: no unit coordinate");
    // columns: x, then e_l (l != drop) projected to x^perp under diag(units)
    Mat<PAdicNumber> t(r, r, PAdicNumber::zero(cfg));
    t.set_col(0, x);
    PAdicNumber norm = PAdicNumber::zero(cfg);
    for (int i = 0; i < r; ++i) {
        const auto& xi = x[static_cast<std::size_t>(i)];
        if (!xi.is_zero()) norm = norm + units[static_cast<std::size_t>(i)] * xi * xi;
    }
    Mat<PAdicNumber> sub_gram(r - 1, r - 1, PAdicNumber::zero(cfg));
    std::vector<std::vector<PAdicNumber>> proj;
    for (int l = 0; l < r; ++l) {
        if (l == drop) continue;
        std::vector<PAdicNumber> v(static_cast<std::size_t>(r), PAdicNumber::zero(cfg));
        v[static_cast<std::size_t>(l)] = PAdicNumber::from_int(cfg, 1);
        const PAdicNumber inner = units[static_cast<std::size_t>(l)] * x[static_cast<std::size_t>(l)];
        if (!inner.vanishes()) {
            const PAdicNumber f = inner / norm;
            for (int i = 0; i < r; ++i)
                v[static_cast<std::size_t>(i)] =
                    v[static_cast<std::size_t>(i)] - f * x[static_cast<std::size_t>(i)];
        }
        proj.push_back(std::move(v));
    }
    for (int a = 0; a < r - 1; ++a)
        for (int b = a; b < r - 1; ++b) {
            PAdicNumber acc = PAdicNumber::zero(cfg);
            for (int q = 0; q < r; ++q) {
                const auto& xa = proj[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
                const auto& xb = proj[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
                if (xa.is_zero() || xb.is_zero()) continue;
                acc = acc + xa * units[static_cast<std::size_t>(q)] * xb;
            }
            sub_gram.at(a, b) = acc;
            sub_gram.at(b, a) = acc;
        }
    // integral diagonalization of the complement, then recurse on its units
    const auto sub_basis = orthogonalize_lattice(
        sub_gram, Mat<PAdicNumber>::identity(r - 1, PAdicNumber::zero(cfg)));
    const auto sub_diag = sub_basis.transpose() * sub_gram * sub_basis;
    std::vector<PAdicNumber> sub_units;
    for (int a = 0; a < r - 1; ++a) {
        const PAdicNumber d = sub_diag.at(a, a);
        if (!d.is_regular() || d.valuation() != 0)
            throw PrecisionError("unimodular_block_transform: complement not unimodular");
        sub_units.push_back(d);
    }
    const Mat<PAdicNumber> rec = unimodular_block_transform(cfg, sub_units);
    const Mat<PAdicNumber> tail = sub_basis * rec;
    for (int i = 0; i < r; ++i)
        for (int b = 0; b < r - 1; ++b) {
            PAdicNumber acc = PAdicNumber::zero(cfg);
            for (int q = 0; q < r - 1; ++q) {
                const auto& w = proj[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
                if (w.is_zero() || tail.at(q, b).is_zero()) continue;
                acc = acc + w * tail.at(q, b);
            }
            t.at(i, b + 1) = acc;
        }
    return t;
}

/// Right-multiplies e by a K element so that every Jordan block of the Gram
/// becomes p^v * diag(1,...,1,disc); the class tuple of the result is the
/// canonical label.
inline void jordan_normalize(const PrimeConfig& cfg, Mat<PAdicNumber>& e,
                             Mat<PAdicNumber>& kappa) {
    const int n = e.rows();
    const Mat<PAdicNumber> gram = e.transpose() * e;
    std::vector<long long> scales;
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < n; ++i) {
        const long long v = gram.at(i, i).valuation();
        std::size_t k = 0;
        while (k < scales.size() && scales[k] != v) ++k;
        if (k == scales.size()) {
            scales.push_back(v);
            groups.emplace_back();
        }
        groups[k].push_back(i);
    }
    Mat<PAdicNumber> t = Mat<PAdicNumber>::identity(n, PAdicNumber::zero(cfg));
    bool changed = false;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto& idx = groups[k];
        if (idx.size() < 2) continue;
        std::vector<PAdicNumber> units;
        int xi_count = 0;
        const PAdicNumber scale_inv =
            PAdicNumber::from_int(cfg, cfg.p).pow(scales[k]).inverse();
        for (int i : idx) {
            PAdicNumber u = gram.at(i, i) * scale_inv;
            if (legendre_unit(u) == -1) ++xi_count;
            units.push_back(std::move(u));
        }
        if (xi_count <= 1) continue;  // classes already canonical
        const Mat<PAdicNumber> block = unimodular_block_transform(cfg, units);
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b)
                t.at(idx[a], idx[b]) = block.at(static_cast<int>(a), static_cast<int>(b));
        changed = true;
    }
    if (!changed) return;
    e = e * t;
    kappa = t.inverse() * kappa;
}

} // namespace detail

/// Constructive Cartan-type factorization through the orthogonal-basis
/// factor: g = e*kappa0; the diagonal Gram of e splits into square classes,
/// whose square parts move into s and whose class part is realized by the
/// canonical witness; a permutation sorts the classes and is absorbed into h
/// and kappa.
inline CartanFactorization cartan_factor(const PrimeConfig& cfg, const Mat<PAdicNumber>& g) {
    const int n = g.rows();
    EkFactor ek = ek_factor(g);
    detail::jordan_normalize(cfg, ek.e, ek.kappa);
    const Mat<PAdicNumber> gram = ek.e.transpose() * ek.e;
    std::vector<SquareClass> classes;
    Mat<PAdicNumber> s0(n, n, PAdicNumber::zero(cfg));
    for (int i = 0; i < n; ++i) {
        auto [cls_i, c_i] = square_class(cfg, gram.at(i, i));
        classes.push_back(cls_i);
        s0.at(i, i) = c_i;
    }
    // stable sort of the classes; perm[j] = original index in slot j
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return classes[static_cast<std::size_t>(a)] < classes[static_cast<std::size_t>(b)];
    });
    const Mat<PAdicNumber> w = detail::permutation_matrix(cfg, order);
    const Mat<PAdicNumber> w_inv = w.transpose();
    CosetClass sorted;
    for (int j = 0; j < n; ++j) sorted.push_back(classes[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]);

    Mat<PAdicNumber> s0_inv(n, n, PAdicNumber::zero(cfg));
    for (int i = 0; i < n; ++i) s0_inv.at(i, i) = s0.at(i, i).inverse();
    const Mat<PAdicNumber> f = ek.e * s0_inv * w;
    const Mat<PAdicNumber> s = w_inv * s0 * w;
    const Mat<PAdicNumber> kappa = w_inv * ek.kappa;
    const Mat<PAdicNumber> y = witness(sorted, cfg);
    const Mat<PAdicNumber> h = f * y.inverse();
    return {h, y, s, kappa, sorted};
}

/// Entrywise congruence of a and b modulo p^floor(i,j); certification
/// requires each difference window to reach the floor.
template <class Floor>
bool matrices_agree_below(const Mat<PAdicNumber>& a, const Mat<PAdicNumber>& b,
                          Floor&& floor_of) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const PAdicNumber diff = a.at(i, j) - b.at(i, j);
            const long long want = floor_of(i, j);
            if (diff.is_regular() && diff.valuation() < want) return false;
            if (!diff.is_regular() && diff.window() < want) return false;
        }
    return true;
}

/// Checks all factorization invariants: recomposition and orthogonality of h
/// certified to `certified_digits` significant digits, diagonality of s,
/// K-membership of kappa, and the class label.  Callers construct inputs
/// with a few guard digits beyond the digits they want certified.
inline bool verify_factorization(const PrimeConfig& cfg, const Mat<PAdicNumber>& g,
                                 const CartanFactorization& fac,
                                 long long certified_digits = 0) {
    if (certified_digits <= 0) certified_digits = cfg.precision - 5;
    const int n = g.rows();
    const Mat<PAdicNumber> recomposed = fac.h * fac.y * fac.s * fac.kappa;
    if (!matrices_agree_below(recomposed, g, [&](int i, int j) {
            const auto v = g.at(i, j).regular_valuation();
            return (v ? *v : 0) + certified_digits;
        }))
        return false;
    const Mat<PAdicNumber> hth = fac.h.transpose() * fac.h;
    const Mat<PAdicNumber> id = Mat<PAdicNumber>::identity(n, g.proto());
    if (!matrices_agree_below(hth, id, [&](int, int) { return certified_digits; }))
        return false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && fac.s.at(i, j).is_regular()) return false;
    if (!in_K(fac.kappa)) return false;
    if (classify(cfg, g) != fac.cls) return false;
    return true;
}

/// Conjugates a sorting permutation through the factorization so the
/// valuations of s become non-increasing.  Valid when the witness Gram is
/// scalar (all classes equal): then y rho y^-1 is orthogonal and the class
/// witness is unchanged.
inline CartanFactorization anti_dominant_normalize(const PrimeConfig& cfg,
                                                   const CartanFactorization& fac) {
    const int n = fac.s.rows();
    for (std::size_t i = 1; i < fac.cls.size(); ++i)
        if (fac.cls[i] != fac.cls[0])
            throw DomainError(
                "anti_dominant_normalize: witness Gram is not scalar; class " +
                class_tuple_name(fac.cls) + " is not normalizable by this method");
    std::vector<long long> vals;
    for (int i = 0; i < n; ++i) vals.push_back(fac.s.at(i, i).valuation());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return vals[static_cast<std::size_t>(a)] > vals[static_cast<std::size_t>(b)];
    });
    const Mat<PAdicNumber> rho = detail::permutation_matrix(cfg, order);
    const Mat<PAdicNumber> rho_inv = rho.transpose();
    const Mat<PAdicNumber> conj = fac.y * rho * fac.y.inverse();
    CartanFactorization out = fac;
    out.h = fac.h * conj;
    out.s = rho_inv * fac.s * rho;
    out.kappa = rho_inv * fac.kappa;
    return out;
}

/// Product of 2n random hyperplane reflections v - 2 B(v,u)/B(u,u) u with
/// anisotropic u; orthogonal to precision with determinant +-1.  Unit-norm
/// vectors always exist; a small budget of positive norm valuations keeps
/// non-integral reflections in the mix without draining tracked digits.
inline Mat<PAdicNumber> random_orthogonal(const PrimeConfig& cfg, int n, Rng& rng) {
    Mat<PAdicNumber> h = Mat<PAdicNumber>::identity(n, PAdicNumber::zero(cfg));
    const PAdicNumber two = PAdicNumber::from_int(cfg, 2);
    long long budget = 4;
    for (int rep = 0; rep < 2 * n; ++rep) {
        while (true) {
            std::vector<PAdicNumber> u;
            for (int i = 0; i < n; ++i)
                u.push_back(PAdicNumber::from_int(
                    cfg, static_cast<long long>(rng.below(static_cast<std::uint64_t>(cfg.p * cfg.p * cfg.p))) -
                             cfg.p * cfg.p));
            PAdicNumber norm = PAdicNumber::zero(cfg);
            for (const auto& x : u)
                if (!x.is_zero()) norm = norm + x * x;
            if (!norm.is_regular() || norm.valuation() > budget) continue;
            budget -= norm.valuation();
            Mat<PAdicNumber> refl = Mat<PAdicNumber>::identity(n, PAdicNumber::zero(cfg));
            const PAdicNumber scale = two / norm;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (u[static_cast<std::size_t>(i)].is_zero() ||
                        u[static_cast<std::size_t>(j)].is_zero())
                        continue;
                    refl.at(i, j) = refl.at(i, j) -
                                    scale * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
                }
            h = h * refl;
            break;
        }
    }
    return h;
}

} // namespace symspace

#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "symspace/matrix.hpp"
#include "symspace/padic.hpp"

namespace symspace {

// ---------------------------------------------------------------------------
// Hermite normal form over the valuation ring (generic in the field F)
// ---------------------------------------------------------------------------

template <class F>
F uniformizer_power(const F& pi, long long e) {
    if (e == 0) return pi.one_like();
    if (e < 0) return uniformizer_power(pi.inverse(), -e);
    F r = pi.one_like();
    F b = pi;
    long long k = e;
    while (k > 0) {
        if (k & 1) r = r * b;
        if ((k >>= 1)) b = b * b;
    }
    return r;
}

namespace detail {

template <class F>
long long entry_valuation(const F& x) {
    auto v = x.regular_valuation();
    if (!v) throw PrecisionError("lattice algorithm: entry valuation undecidable");
    return *v;
}

} // namespace detail

/// Canonical basis of the lattice spanned by the columns of b: column
/// operations over the valuation ring bring it to the triangular form with
/// pivots pi^(d_i) on the diagonal, zeros above them, and entries below a
/// pivot row reduced modulo that row's pivot.  Two bases of the same lattice
/// yield the identical matrix.
template <class F>
Mat<F> hnf_basis(Mat<F> b, const F& pi) {
    const int n = b.rows();
    if (b.cols() != n) throw DomainError("hnf_basis: square basis expected");
    std::vector<long long> pivot_val(static_cast<std::size_t>(n), 0);
    for (int r = 0; r < n; ++r) {
        int pc = -1;
        long long best = 0;
        bool saw_uncertain = false;
        for (int j = r; j < n; ++j) {
            auto v = b.at(r, j).regular_valuation();
            if (v) {
                if (pc < 0 || *v < best) { pc = j; best = *v; }
            } else if (!b.at(r, j).is_zero()) {
                saw_uncertain = true;
            }
        }
        if (pc < 0) {
            if (saw_uncertain)
                throw PrecisionError("hnf_basis: pivot row vanishes to precision");
            throw DomainError("hnf_basis: singular input");
        }
        // a vanishing entry whose window stops above the pivot could hide a
        // smaller valuation
        for (int j = r; j < n; ++j) {
            const F& x = b.at(r, j);
            if (!x.is_regular() && !x.is_zero() && x.window() < best)
                throw PrecisionError("hnf_basis: undecidable pivot comparison");
        }
        if (pc != r)
            for (int i = 0; i < n; ++i) std::swap(b.at(i, pc), b.at(i, r));
        // make the pivot an exact power of pi
        const F unit_inv = (b.at(r, r) / uniformizer_power(pi, best)).inverse();
        for (int i = 0; i < n; ++i) b.at(i, r) = b.at(i, r) * unit_inv;
        b.at(r, r) = uniformizer_power(pi, best);
        pivot_val[static_cast<std::size_t>(r)] = best;
        for (int j = r + 1; j < n; ++j) {
            const F& x = b.at(r, j);
            if (x.vanishes()) continue;
            const F f = x / b.at(r, r);
            for (int i = 0; i < n; ++i) b.at(i, j) = b.at(i, j) - f * b.at(i, r);
            b.at(r, j) = x.zero_like();
        }
    }
    // reduce below-pivot entries modulo the pivot of their row
    for (int j = 0; j < n; ++j) {
        for (int i = j + 1; i < n; ++i) {
            const F& x = b.at(i, j);
            if (x.vanishes()) continue;
            auto [q, r] = x.split_at(pivot_val[static_cast<std::size_t>(i)]);
            if (q.vanishes()) continue;  // already reduced (to precision)
            for (int k = i + 1; k < n; ++k) b.at(k, j) = b.at(k, j) - q * b.at(k, i);
            b.at(i, j) = r;
        }
    }
    return b;
}

/// Membership in GL_n(o): every entry integral and the determinant a unit.
template <class F>
bool in_gln_o(const Mat<F>& g) {
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            if (!g.at(i, j).valuation_at_least(0)) return false;
    const F det = g.determinant();
    if (det.is_zero()) return false;
    auto v = det.regular_valuation();
    if (v) return *v == 0;
    // det vanishes mod pi^b: if b >= 1 the determinant is certainly not a unit
    if (det.valuation_at_least(1)) return false;
    throw PrecisionError("in_gln_o: determinant valuation undecidable");
}

/// K = GL_n(Z_p) membership for the base field.
inline bool in_K(const Mat<PAdicNumber>& g) { return in_gln_o(g); }

// ---------------------------------------------------------------------------
// 2x2 Smith normal form over the valuation ring
// ---------------------------------------------------------------------------

template <class F>
struct Smith2 {
    Mat<F> left;   // unimodular
    Mat<F> right;  // unimodular
    std::array<long long, 2> d;  // elementary divisor valuations, d[0] <= d[1]
};

/// A = left * diag(pi^d0, pi^d1) * right with both transforms in GL_2(o).
template <class F>
Smith2<F> smith2(const Mat<F>& a0, const F& pi) {
    Mat<F> d = a0;
    Mat<F> u = Mat<F>::identity(2, a0.proto());
    Mat<F> v = Mat<F>::identity(2, a0.proto());
    // locate the minimal-valuation entry
    int bi = -1, bj = -1;
    long long best = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const auto v = d.at(i, j).regular_valuation();
            if (!v) continue;
            if (bi < 0 || *v < best) { bi = i; bj = j; best = *v; }
        }
    if (bi < 0) throw DomainError("smith2: zero matrix (to precision)");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const F& x = d.at(i, j);
            if (!x.is_regular() && !x.is_zero() && x.window() < best)
                throw PrecisionError("smith2: undecidable pivot comparison");
        }
    if (bi != 0) {  // swap rows; record inverse swap in u
        for (int j = 0; j < 2; ++j) std::swap(d.at(0, j), d.at(1, j));
        for (int i = 0; i < 2; ++i) std::swap(u.at(i, 0), u.at(i, 1));
    }
    if (bj != 0) {
        for (int i = 0; i < 2; ++i) std::swap(d.at(i, 0), d.at(i, 1));
        for (int j = 0; j < 2; ++j) std::swap(v.at(0, j), v.at(1, j));
    }
    // clear column: row1 -= f*row0  =>  u col0 += f*col1
    if (!d.at(1, 0).vanishes()) {
        const F f = d.at(1, 0) / d.at(0, 0);
        for (int j = 0; j < 2; ++j) d.at(1, j) = d.at(1, j) - f * d.at(0, j);
        d.at(1, 0) = a0.proto().zero_like();
        for (int i = 0; i < 2; ++i) u.at(i, 0) = u.at(i, 0) + f * u.at(i, 1);
    }
    // clear row: col1 -= g*col0  =>  v row0 += g*row1
    if (!d.at(0, 1).vanishes()) {
        const F g = d.at(0, 1) / d.at(0, 0);
        for (int i = 0; i < 2; ++i) d.at(i, 1) = d.at(i, 1) - g * d.at(i, 0);
        d.at(0, 1) = a0.proto().zero_like();
        for (int j = 0; j < 2; ++j) v.at(0, j) = v.at(0, j) + g * v.at(1, j);
    }
    Smith2<F> out{u, v, {0, 0}};
    out.d[0] = detail::entry_valuation(d.at(0, 0));
    if (d.at(1, 1).vanishes()) {
        if (d.at(1, 1).is_zero()) throw DomainError("smith2: singular matrix");
        throw PrecisionError("smith2: second divisor vanishes to precision");
    }
    out.d[1] = detail::entry_valuation(d.at(1, 1));
    // absorb the remaining units into the transforms
    const F u0 = d.at(0, 0) / uniformizer_power(pi, out.d[0]);
    const F u1 = d.at(1, 1) / uniformizer_power(pi, out.d[1]);
    for (int i = 0; i < 2; ++i) {
        out.left.at(i, 0) = out.left.at(i, 0) * u0;
        out.left.at(i, 1) = out.left.at(i, 1) * u1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lattice orthogonalization (base field)
// ---------------------------------------------------------------------------

namespace detail {

inline PAdicNumber gram_entry(const Mat<PAdicNumber>& form, const Mat<PAdicNumber>& w,
                              int i, int j) {
    PAdicNumber acc = form.proto().zero_like();
    const int n = form.rows();
    for (int r = 0; r < n; ++r) {
        if (w.at(r, i).is_zero()) continue;
        for (int c = 0; c < n; ++c) {
            if (form.at(r, c).is_zero() || w.at(c, j).is_zero()) continue;
            acc = acc + w.at(r, i) * form.at(r, c) * w.at(c, j);
        }
    }
    return acc;
}

} // namespace detail

/// Returns a basis of the same lattice (columns) that is orthogonal for the
/// symmetric form B.  Recursion of the splitting Lambda = o*e + (Lambda n
/// e^perp): scale B so its restriction has a unit value, pick e among single
/// basis vectors by index then pairwise sums in lexicographic order (a
/// non-isotropic residue vector exists since the residue characteristic is
/// odd), then project the rest through x - (B(e,x)/B(e,e)) e.
/// A zero restriction of B terminates the recursion.
inline Mat<PAdicNumber> orthogonalize_lattice(const Mat<PAdicNumber>& form,
                                              Mat<PAdicNumber> basis) {
    const int n = basis.rows();
    if (form.rows() != n || form.cols() != n || basis.cols() != n)
        throw DomainError("orthogonalize_lattice: shape mismatch");
    for (int k = 0; k < n; ++k) {
        // Gram of the remaining columns
        const int r = n - k;
        std::vector<PAdicNumber> gram(static_cast<std::size_t>(r * r), form.proto().zero_like());
        bool all_zero = true;
        std::optional<long long> minval;
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) {
                PAdicNumber g = detail::gram_entry(form, basis, k + i, k + j);
                gram[static_cast<std::size_t>(i * r + j)] = g;
                gram[static_cast<std::size_t>(j * r + i)] = g;
                if (!g.is_zero()) all_zero = false;
                if (g.is_regular() && (!minval || g.valuation() < *minval)) minval = g.valuation();
            }
        if (all_zero) return basis;  // null restriction: already (trivially) orthogonal
        if (!minval) throw PrecisionError("orthogonalize_lattice: restriction vanishes to precision");
        for (auto& g : gram)
            if (g.is_zero_mod() && g.window() <= *minval)
                throw PrecisionError("orthogonalize_lattice: Gram entry too uncertain");
        const long long m = *minval;
        // pivot vector with unit scaled norm: single columns first, then sums
        int pi_ = -1, pj_ = -1;
        for (int i = 0; i < r && pi_ < 0; ++i) {
            const PAdicNumber& g = gram[static_cast<std::size_t>(i * r + i)];
            if (g.is_regular() && g.valuation() == m) { pi_ = i; pj_ = i; }
        }
        for (int i = 0; i < r && pi_ < 0; ++i)
            for (int j = i + 1; j < r && pi_ < 0; ++j) {
                const PAdicNumber norm = gram[static_cast<std::size_t>(i * r + i)] +
                                         gram[static_cast<std::size_t>(i * r + j)] +
                                         gram[static_cast<std::size_t>(i * r + j)] +
                                         gram[static_cast<std::size_t>(j * r + j)];
                if (norm.is_regular() && norm.valuation() == m) { pi_ = i; pj_ = j; }
            }
        if (pi_ < 0) throw PrecisionError("orthogonalize_lattice: no unit pivot found");
        if (pj_ != pi_) {
            // e = col_i + col_j keeps the span: replace col_i by e
            for (int t = 0; t < n; ++t)
                basis.at(t, k + pi_) = basis.at(t, k + pi_) + basis.at(t, k + pj_);
        }
        if (pi_ != 0)
            for (int t = 0; t < n; ++t) std::swap(basis.at(t, k), basis.at(t, k + pi_));
        const PAdicNumber ee = detail::gram_entry(form, basis, k, k);
        for (int j = k + 1; j < n; ++j) {
            const PAdicNumber ex = detail::gram_entry(form, basis, k, j);
            if (ex.vanishes()) continue;  // already orthogonal to precision
            const PAdicNumber f = ex / ee;
            for (int t = 0; t < n; ++t)
                basis.at(t, j) = basis.at(t, j) - f * basis.at(t, k);
        }
    }
    return basis;
}

// ---------------------------------------------------------------------------
// E*K factorization: g = e * kappa with tr(e)*e diagonal, kappa in K
// ---------------------------------------------------------------------------

struct EkFactor {
    Mat<PAdicNumber> e;
    Mat<PAdicNumber> kappa;
};

/// Factor g through an orthogonal basis of its column lattice: e maps the
/// standard basis to a basis of g*o^n that is orthogonal for the standard
/// form, so tr(e)*e is diagonal and kappa = e^-1 g lies in K.
inline EkFactor ek_factor(const Mat<PAdicNumber>& g) {
    const Mat<PAdicNumber> form = Mat<PAdicNumber>::identity(g.rows(), g.proto());
    Mat<PAdicNumber> e = orthogonalize_lattice(form, g);
    Mat<PAdicNumber> kappa = e.inverse() * g;
    return {std::move(e), std::move(kappa)};
}

// ---------------------------------------------------------------------------
// Field-level congruence diagonalization
// ---------------------------------------------------------------------------

struct Congruence {
    Mat<PAdicNumber> c;  // invertible
    Mat<PAdicNumber> d;  // diagonal, tr(C) M C = D
};

/// tr(C) M C = D with C invertible.  Pivot strategy: the minimal-valuation
/// diagonal entry, else a two-vector combination e_i +- e_j (one of the two
/// signs has the minimal valuation since p is odd).
inline Congruence diagonalize(const Mat<PAdicNumber>& m0) {
    const int n = m0.rows();
    if (m0.cols() != n) throw DomainError("diagonalize: square matrix expected");
    Mat<PAdicNumber> a = m0;
    Mat<PAdicNumber> c = Mat<PAdicNumber>::identity(n, m0.proto());
    auto add_col = [&](Mat<PAdicNumber>& mat, int dst, int src, const PAdicNumber& f) {
        for (int t = 0; t < mat.rows(); ++t)
            mat.at(t, dst) = mat.at(t, dst) + f * mat.at(t, src);
    };
    auto add_row = [&](Mat<PAdicNumber>& mat, int dst, int src, const PAdicNumber& f) {
        for (int t = 0; t < mat.cols(); ++t)
            mat.at(dst, t) = mat.at(dst, t) + f * mat.at(src, t);
    };
    for (int k = 0; k < n; ++k) {
        // an already-diagonal block is left untouched, in order
        bool block_diagonal = true;
        for (int i = k; i < n && block_diagonal; ++i)
            for (int j = k; j < n; ++j)
                if (i != j && !a.at(i, j).vanishes()) { block_diagonal = false; break; }
        if (block_diagonal) break;
        std::optional<long long> minval;
        bool all_zero = true;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j) {
                const PAdicNumber& x = a.at(i, j);
                if (!x.is_zero()) all_zero = false;
                if (x.is_regular() && (!minval || x.valuation() < *minval)) minval = x.valuation();
            }
        if (all_zero) break;  // remaining block is exactly null
        if (!minval) throw PrecisionError("diagonalize: block vanishes to precision");
        const long long m = *minval;
        int pv = -1;
        for (int i = k; i < n && pv < 0; ++i)
            if (a.at(i, i).is_regular() && a.at(i, i).valuation() == m) pv = i;
        if (pv < 0) {
            // combine two basis vectors; for one of the signs the valuation
            // stays minimal because their difference is 4*M_ij
            const PAdicNumber one = m0.proto().one_like();
            for (int i = k; i < n && pv < 0; ++i)
                for (int j = i + 1; j < n && pv < 0; ++j) {
                    if (!a.at(i, j).is_regular() || a.at(i, j).valuation() != m) continue;
                    for (const int sign : {+1, -1}) {
                        const PAdicNumber f = sign > 0 ? one : -one;
                        PAdicNumber norm = a.at(i, i) + f * a.at(i, j) + f * a.at(i, j) + a.at(j, j);
                        if (norm.is_regular() && norm.valuation() == m) {
                            add_col(a, i, j, f);
                            add_row(a, i, j, f);
                            add_col(c, i, j, f);
                            pv = i;
                            break;
                        }
                    }
                }
            if (pv < 0) throw PrecisionError("diagonalize: no pivot at minimal valuation");
        }
        if (pv != k) {
            for (int t = 0; t < n; ++t) std::swap(a.at(t, pv), a.at(t, k));
            for (int t = 0; t < n; ++t) std::swap(a.at(pv, t), a.at(k, t));
            for (int t = 0; t < n; ++t) std::swap(c.at(t, pv), c.at(t, k));
        }
        const PAdicNumber piv = a.at(k, k);
        for (int j = k + 1; j < n; ++j) {
            const PAdicNumber x = a.at(k, j);
            if (x.vanishes()) continue;
            const PAdicNumber f = -(x / piv);
            add_col(a, j, k, f);
            add_row(a, j, k, f);
            add_col(c, j, k, f);
            a.at(k, j) = x.zero_like();
            a.at(j, k) = x.zero_like();
        }
    }
    Mat<PAdicNumber> d(n, n, m0.proto().zero_like());
    for (int i = 0; i < n; ++i) d.at(i, i) = a.at(i, i);
    return {std::move(c), std::move(d)};
}

} // namespace symspace

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symspace/quadext.hpp"
#include "symspace/tree.hpp"

namespace symspace {

// ---------------------------------------------------------------------------
// The symmetric space (GL_n(k'), Galois involution, H = GL_n(k)): cocycle
// classes, the explicit witnesses u_i, and the rank-one factorization.
// ---------------------------------------------------------------------------

inline Mat<ExtElement> ext_identity(const QuadExt& ext, int n) {
    return Mat<ExtElement>::identity(n, ExtElement::zero(ext));
}

inline bool is_rational(const Mat<ExtElement>& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).im().vanishes()) return false;
    return true;
}

/// Underlying permutation of a monomial matrix: perm[j] = the row of the
/// single essential entry of column j.  nullopt when the matrix is not
/// monomial; PrecisionError when an entry cannot be certified small.
inline std::optional<std::vector<int>> monomial_pattern(const Mat<ExtElement>& m) {
    const int n = m.rows();
    std::vector<int> perm(static_cast<std::size_t>(n), -1);
    std::vector<bool> row_used(static_cast<std::size_t>(n), false);
    for (int j = 0; j < n; ++j) {
        int pivot = -1;
        long long best = 0;
        for (int i = 0; i < n; ++i) {
            const auto v = m.at(i, j).regular_valuation();
            if (v && (pivot < 0 || *v < best)) { pivot = i; best = *v; }
        }
        if (pivot < 0) throw PrecisionError("monomial_pattern: column vanishes");
        for (int i = 0; i < n; ++i) {
            if (i == pivot) continue;
            const ExtElement& x = m.at(i, j);
            if (x.is_zero()) continue;
            if (x.is_regular()) return std::nullopt;  // second essential entry
            if (x.window() <= best)
                throw PrecisionError("monomial_pattern: entry not certifiably small");
        }
        if (row_used[static_cast<std::size_t>(pivot)]) return std::nullopt;
        row_used[static_cast<std::size_t>(pivot)] = true;
        perm[static_cast<std::size_t>(j)] = pivot;
    }
    return perm;
}

inline bool is_monomial(const Mat<ExtElement>& m) { return monomial_pattern(m).has_value(); }

/// Cocycle condition for the Galois involution: w monomial with
/// w * sigma(w) = 1 in all tracked digits.
inline bool is_cocycle(const Mat<ExtElement>& w) {
    auto pattern = monomial_pattern(w);
    if (!pattern) throw DomainError("is_cocycle: non-monomial input");
    const Mat<ExtElement> prod = w * sigma_matrix(w);
    const Mat<ExtElement> id = Mat<ExtElement>::identity(w.rows(), w.proto());
    return prod.agrees_with(id);
}

/// Number of 2-cycles of the underlying involution; this indexes the
/// cohomology class (involution classes in S_n are counted by that number).
inline int cocycle_class_of(const Mat<ExtElement>& w) {
    auto pattern = monomial_pattern(w);
    if (!pattern) throw DomainError("cocycle_class_of: non-monomial input");
    const auto& perm = *pattern;
    const int n = static_cast<int>(perm.size());
    int two_cycles = 0;
    for (int j = 0; j < n; ++j) {
        const int img = perm[static_cast<std::size_t>(j)];
        if (perm[static_cast<std::size_t>(img)] != j)
            throw DomainError("cocycle_class_of: permutation part has order > 2");
        if (img > j) ++two_cycles;
    }
    return two_cycles;
}

/// tau_i = diag(swap, ..., swap, 1, ..., 1) with i swap blocks.
inline Mat<ExtElement> tau_involution(const QuadExt& ext, int n, int i) {
    if (i < 0 || 2 * i > n) throw DomainError("tau_involution: class out of range");
    Mat<ExtElement> t = ext_identity(ext, n);
    const ExtElement one = ExtElement::from_int(ext, 1);
    const ExtElement zero = ExtElement::zero(ext);
    for (int b = 0; b < i; ++b) {
        t.at(2 * b, 2 * b) = zero;
        t.at(2 * b + 1, 2 * b + 1) = zero;
        t.at(2 * b, 2 * b + 1) = one;
        t.at(2 * b + 1, 2 * b) = one;
    }
    return t;
}

/// Block-diagonal witness with i copies of [[a, sigma(a)], [1, 1]] for
/// a = sqrt(delta); satisfies u_i^-1 sigma(u_i) = tau_i.
inline Mat<ExtElement> u_witness(const QuadExt& ext, int n, int i) {
    if (i < 0 || 2 * i > n) throw DomainError("u_witness: class out of range");
    Mat<ExtElement> u = ext_identity(ext, n);
    const ExtElement a = ExtElement::sqrt_delta(ext);
    const ExtElement one = ExtElement::from_int(ext, 1);
    for (int b = 0; b < i; ++b) {
        u.at(2 * b, 2 * b) = a;
        u.at(2 * b, 2 * b + 1) = -a;
        u.at(2 * b + 1, 2 * b) = one;
        u.at(2 * b + 1, 2 * b + 1) = one;
    }
    return u;
}

/// Constructive coboundary: nu monomial with c = nu^-1 tau_i sigma(nu).
/// The permutation part is conjugated to tau_i by an integral permutation;
/// fixed-point scalars use the explicit Hilbert-90 section nu = 1 + sigma(c)
/// (or sqrt(delta) at c = -1); a swap block [[0,a],[b,0]] takes diag(a^-1,1).
inline Mat<ExtElement> solve_coboundary(const QuadExt& ext, const Mat<ExtElement>& c,
                                        int target_class) {
    const int n = c.rows();
    const int cls = cocycle_class_of(c);
    if (cls != target_class)
        throw DomainError("solve_coboundary: class mismatch (cocycle has class " +
                          std::to_string(cls) + ", requested " + std::to_string(target_class) +
                          ")");
    const auto perm = *monomial_pattern(c);
    // rho sends the tau pattern to the cocycle's: pairs first, then fixed
    std::vector<int> rho;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int j = 0; j < n; ++j) {
        const int img = perm[static_cast<std::size_t>(j)];
        if (img != j && !seen[static_cast<std::size_t>(j)]) {
            rho.push_back(j);
            rho.push_back(img);
            seen[static_cast<std::size_t>(j)] = true;
            seen[static_cast<std::size_t>(img)] = true;
        }
    }
    for (int j = 0; j < n; ++j)
        if (perm[static_cast<std::size_t>(j)] == j) rho.push_back(j);
    Mat<ExtElement> rho_mat(n, n, ExtElement::zero(ext));
    const ExtElement one = ExtElement::from_int(ext, 1);
    for (int j = 0; j < n; ++j) rho_mat.at(rho[static_cast<std::size_t>(j)], j) = one;
    const Mat<ExtElement> conj = rho_mat.transpose() * c * rho_mat;  // rho^-1 c rho
    // assemble the diagonal solution for the tau_i-pattern cocycle
    Mat<ExtElement> nu_diag = ext_identity(ext, n);
    for (int b = 0; b < cls; ++b) {
        const ExtElement alpha = conj.at(2 * b, 2 * b + 1);
        nu_diag.at(2 * b, 2 * b) = alpha.inverse();
    }
    for (int j = 2 * cls; j < n; ++j) {
        const ExtElement gamma = conj.at(j, j);
        const ExtElement shifted = gamma + one;
        if (shifted.vanishes()) {
            nu_diag.at(j, j) = ExtElement::sqrt_delta(ext);
        } else {
            nu_diag.at(j, j) = one + gamma.conj();
        }
    }
    return nu_diag * rho_mat.transpose();
}

/// O-membership: g^-1 sigma(g) normalizes the diagonal torus, i.e. is
/// monomial to precision.
inline bool in_O(const Mat<ExtElement>& g) {
    return is_monomial(g.inverse() * sigma_matrix(g));
}

// ---------------------------------------------------------------------------
// The rank-one factorization g = h u_i z kappa through the tree
// ---------------------------------------------------------------------------

struct GaloisFactorization {
    Mat<ExtElement> h;      // sigma-fixed (k-rational)
    int cls = 0;            // the cocycle class i
    Mat<ExtElement> z;      // diagonal over k'
    Mat<ExtElement> kappa;  // in GL_2(o')
    int radius_used = 0;
};

/// Factors g in GL_2(k') as h u_i z kappa: a sigma-stable apartment through
/// g*x0 supplies g' in O with g'^-1 g fixing the base vertex, the coboundary
/// solver trivializes the attached cocycle, and an Iwasawa-style peel
/// separates the diagonal from the integral part.
inline GaloisFactorization factor_n2(const QuadExt& ext, const Mat<ExtElement>& g,
                                     int max_radius = 8) {
    if (g.rows() != 2 || g.cols() != 2) throw DomainError("factor_n2: 2x2 input required");
    const auto tf = tree_field(ext);
    const auto x0 = base_vertex(tf);
    const auto vx = act(tf, g, x0);
    std::optional<Apartment<ExtElement>> ap;
    int radius = 1;
    for (; radius <= max_radius; ++radius) {
        ap = find_sigma_stable_apartment(ext, tf, vx, radius);
        if (ap) break;
    }
    if (!ap) throw SearchError("factor_n2: no sigma-stable apartment found", max_radius);
    const auto data = detail::split_data(tf, *ap, vx);
    if (!data.splits) throw DomainError("factor_n2: internal containment failure");
    const auto w1 = ap->l1.direction();
    const auto w2 = ap->l2.direction();
    Mat<ExtElement> gp(2, 2, ExtElement::zero(ext));
    const ExtElement s1 = uniformizer_power(tf.pi, data.m[0]);
    const ExtElement s2 = uniformizer_power(tf.pi, data.m[1]);
    gp.at(0, 0) = w1[0] * s1;
    gp.at(1, 0) = w1[1] * s1;
    gp.at(0, 1) = w2[0] * s2;
    gp.at(1, 1) = w2[1] * s2;
    // gp spans the same lattice class as g: the cocycle of gp decides i
    const Mat<ExtElement> c = gp.inverse() * sigma_matrix(gp);
    const int i = cocycle_class_of(c);
    const Mat<ExtElement> nu = solve_coboundary(ext, c, i);
    const Mat<ExtElement> ui = u_witness(ext, 2, i);
    const Mat<ExtElement> h = gp * nu.inverse() * ui.inverse();
    // remainder nu * gp^-1 g lies in (diagonal) * GL_2(o')
    const Mat<ExtElement> r = nu * (gp.inverse() * g);
    Mat<ExtElement> z = ext_identity(ext, 2);
    for (int row = 0; row < 2; ++row) {
        int best_col = -1;
        long long best = 0;
        for (int col = 0; col < 2; ++col) {
            const auto v = r.at(row, col).regular_valuation();
            if (v && (best_col < 0 || *v < best)) { best_col = col; best = *v; }
        }
        if (best_col < 0) throw PrecisionError("factor_n2: remainder row vanishes");
        z.at(row, row) = r.at(row, best_col);
    }
    const Mat<ExtElement> kappa = z.inverse() * r;
    return GaloisFactorization{h, i, z, kappa, radius};
}

/// Recomposition, rationality of h, integrality of kappa and diagonality of
/// z, certified to the given number of significant digits.
inline bool verify_galois_factorization(const QuadExt& ext, const Mat<ExtElement>& g,
                                        const GaloisFactorization& fac,
                                        long long certified_digits) {
    const Mat<ExtElement> recomposed = fac.h * u_witness(ext, 2, fac.cls) * fac.z * fac.kappa;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const ExtElement diff = recomposed.at(i, j) - g.at(i, j);
            const auto v = g.at(i, j).regular_valuation();
            const long long want = (v ? *v : 0) + certified_digits;
            if (diff.is_regular() && diff.valuation() < want) return false;
            if (!diff.is_regular() && diff.window() < want) return false;
        }
    if (!is_rational(fac.h)) return false;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (i != j && fac.z.at(i, j).is_regular()) return false;
    if (!in_gln_o(fac.kappa)) return false;
    return true;
}

} // namespace symspace

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "symspace/lattice.hpp"
#include "symspace/matrix.hpp"
#include "symspace/quadext.hpp"

namespace symspace {

// ---------------------------------------------------------------------------
// The Bruhat-Tits tree of GL_2 over k or k': vertices are homothety classes
// of rank-2 lattices, apartments are frames of two lines.
// ---------------------------------------------------------------------------

/// Field data the tree needs: the uniformizer, residue representatives
/// (q of them) and a multiplicative unit prototype.
template <class F>
struct TreeField {
    F one;
    F pi;
    std::vector<F> residues;  // q representatives of the residue field
    long long q = 0;
};

inline TreeField<PAdicNumber> tree_field(const PrimeConfig& cfg) {
    TreeField<PAdicNumber> tf;
    tf.one = PAdicNumber::from_int(cfg, 1);
    tf.pi = PAdicNumber::from_int(cfg, cfg.p);
    for (long long t = 0; t < cfg.p; ++t) tf.residues.push_back(PAdicNumber::from_int(cfg, t));
    tf.q = cfg.p;
    return tf;
}

inline TreeField<ExtElement> tree_field(const QuadExt& ext) {
    TreeField<ExtElement> tf;
    tf.one = ExtElement::from_int(ext, 1);
    tf.pi = ext.ramified() ? ExtElement::sqrt_delta(ext) : ExtElement::from_int(ext, ext.base.p);
    if (ext.ramified()) {
        for (long long t = 0; t < ext.base.p; ++t) tf.residues.push_back(ExtElement::from_int(ext, t));
    } else {
        for (long long a = 0; a < ext.base.p; ++a)
            for (long long b = 0; b < ext.base.p; ++b)
                tf.residues.push_back(ExtElement::from_parts(
                    ext, PAdicNumber::from_int(ext.base, a), PAdicNumber::from_int(ext.base, b)));
    }
    tf.q = ext.q();
    return tf;
}

namespace detail {

inline void append_digits(std::string& key, const PAdicNumber& x, long long from, long long upto) {
    for (long long pos = from; pos < upto; ++pos) {
        long long digit = 0;
        if (x.is_regular() && pos >= x.valuation()) {
            const auto& d = x.digits();
            const std::size_t k = static_cast<std::size_t>(pos - x.valuation());
            if (k < d.size()) digit = d[k];
        }
        key += std::to_string(digit);
        key += '.';
    }
}

/// Exact digit strings below pi^upto (entries of a normalized vertex basis
/// are integral and reduced, so this is finite canonical data).
inline void append_digits_ext(std::string& key, const ExtElement& x, long long upto) {
    if (x.ramified()) {
        append_digits(key, x.re(), 0, detail::floor_div(upto + 1, 2));
        key += '|';
        append_digits(key, x.im(), 0, detail::floor_div(upto, 2));
    } else {
        append_digits(key, x.re(), 0, upto);
        key += '|';
        append_digits(key, x.im(), 0, upto);
    }
}

inline void append_entry_key(std::string& key, const PAdicNumber& x, long long upto) {
    append_digits(key, x, 0, upto);
}

inline void append_entry_key(std::string& key, const ExtElement& x, long long upto) {
    append_digits_ext(key, x, upto);
}

template <class F>
long long min_entry_valuation(const Mat<F>& m) {
    std::optional<long long> best;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const auto v = m.at(i, j).regular_valuation();
            if (v && (!best || *v < *best)) best = *v;
        }
    if (!best) throw DomainError("min_entry_valuation: zero matrix (to precision)");
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const F& x = m.at(i, j);
            if (!x.is_regular() && !x.is_zero() && x.window() < *best)
                throw PrecisionError("min_entry_valuation: undecidable comparison");
        }
    return *best;
}

} // namespace detail

/// Homothety class of a rank-2 lattice, held as the canonical HNF basis
/// scaled so the minimal entry valuation is 0.  Two matrices represent the
/// same vertex iff their normalized keys coincide.
template <class F>
struct TreeVertex {
    Mat<F> basis;
    std::string key;

    bool operator==(const TreeVertex& o) const { return key == o.key; }
    bool operator!=(const TreeVertex& o) const { return key != o.key; }
};

template <class F>
TreeVertex<F> make_vertex(const TreeField<F>& tf, const Mat<F>& b) {
    Mat<F> h = hnf_basis(b, tf.pi);
    const long long shift = detail::min_entry_valuation(h);
    if (shift != 0) {
        const F scale = uniformizer_power(tf.pi, -shift);
        h = h.scaled(scale);
    }
    // pivots are exact powers of pi; the only free entry is the reduced
    // below-diagonal one
    const long long d0 = h.at(0, 0).valuation();
    const long long d1 = h.at(1, 1).valuation();
    std::string key = std::to_string(d0) + "/" + std::to_string(d1) + "/";
    detail::append_entry_key(key, h.at(1, 0), d1);
    return TreeVertex<F>{std::move(h), std::move(key)};
}

template <class F>
TreeVertex<F> base_vertex(const TreeField<F>& tf) {
    return make_vertex(tf, Mat<F>::identity(2, tf.one.zero_like()));
}

template <class F>
TreeVertex<F> act(const TreeField<F>& tf, const Mat<F>& g, const TreeVertex<F>& v) {
    return make_vertex(tf, g * v.basis);
}

/// Galois involution: conjugate the lattice entrywise.
inline Mat<ExtElement> sigma_matrix(const Mat<ExtElement>& m) {
    Mat<ExtElement> s = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s.at(i, j) = m.at(i, j).conj();
    return s;
}

inline TreeVertex<ExtElement> sigma_galois(const TreeField<ExtElement>& tf,
                                           const TreeVertex<ExtElement>& v) {
    return make_vertex(tf, sigma_matrix(v.basis));
}

/// Transpose-inverse involution: a lattice class goes to its dual class for
/// the standard bilinear form, realized on bases by the inverse transpose.
template <class F>
TreeVertex<F> sigma_transpose(const TreeField<F>& tf, const TreeVertex<F>& v) {
    return make_vertex(tf, v.basis.inverse().transpose());
}

/// The q+1 index-pi sublattices up to homothety, in residue order then the
/// distinguished direction.
template <class F>
std::vector<TreeVertex<F>> neighbors(const TreeField<F>& tf, const TreeVertex<F>& v) {
    std::vector<TreeVertex<F>> out;
    const F zero = tf.one.zero_like();
    for (const F& t : tf.residues) {
        Mat<F> b(2, 2, zero);
        for (int i = 0; i < 2; ++i) {
            b.at(i, 0) = t.is_zero() ? v.basis.at(i, 0)
                                     : v.basis.at(i, 0) + t * v.basis.at(i, 1);
            b.at(i, 1) = tf.pi * v.basis.at(i, 1);
        }
        out.push_back(make_vertex(tf, b));
    }
    Mat<F> b(2, 2, zero);
    for (int i = 0; i < 2; ++i) {
        b.at(i, 0) = tf.pi * v.basis.at(i, 0);
        b.at(i, 1) = v.basis.at(i, 1);
    }
    out.push_back(make_vertex(tf, b));
    return out;
}

/// Tree distance: difference of the elementary divisor valuations of the
/// basis-change matrix.
template <class F>
long long tree_distance(const TreeField<F>& tf, const TreeVertex<F>& u, const TreeVertex<F>& v) {
    const Mat<F> change = u.basis.inverse() * v.basis;
    const Smith2<F> s = smith2(change, tf.pi);
    return s.d[1] - s.d[0];
}

/// The vertex path from u to v (inclusive), following the common apartment.
template <class F>
std::vector<TreeVertex<F>> geodesic(const TreeField<F>& tf, const TreeVertex<F>& u,
                                    const TreeVertex<F>& v) {
    const Mat<F> change = u.basis.inverse() * v.basis;
    const Smith2<F> s = smith2(change, tf.pi);
    const Mat<F> w = u.basis * s.left;
    // u = [w1, w2], v = [w1, pi^(d1-d0) w2] up to homothety
    std::vector<TreeVertex<F>> path;
    for (long long t = 0; t <= s.d[1] - s.d[0]; ++t) {
        Mat<F> b = w;
        const F scale = uniformizer_power(tf.pi, t);
        for (int i = 0; i < 2; ++i) b.at(i, 1) = b.at(i, 1) * scale;
        path.push_back(make_vertex(tf, b));
    }
    return path;
}

// ---------------------------------------------------------------------------
// Lines and apartments
// ---------------------------------------------------------------------------

/// A line of the 2-dimensional column space, held as a primitive integral
/// direction: (1, c) with c integral, or (c, 1) with v(c) >= 1.
template <class F>
struct Line {
    bool swapped = false;  // false: (1, c); true: (c, 1)
    F coef;

    std::array<F, 2> direction() const {
        if (swapped) return {coef, coef.one_like()};
        return {coef.one_like(), coef};
    }
};

template <class F>
Line<F> make_line(const F& x, const F& y) {
    const auto vx = x.regular_valuation();
    const auto vy = y.regular_valuation();
    if (!vx && !x.is_zero()) throw PrecisionError("make_line: undecidable coordinate");
    if (!vy && !y.is_zero()) throw PrecisionError("make_line: undecidable coordinate");
    if (x.is_zero() && y.is_zero()) throw DomainError("make_line: zero vector");
    if (!x.is_zero() && (y.is_zero() || *vx <= *vy)) return Line<F>{false, y.is_zero() ? x.zero_like() : y / x};
    return Line<F>{true, x.is_zero() ? y.zero_like() : x / y};
}

template <class F>
bool lines_agree(const Line<F>& a, const Line<F>& b) {
    return a.swapped == b.swapped && a.coef.agrees_with(b.coef);
}

enum class SigmaKind { Galois, TransposeInverse };

inline Line<ExtElement> line_image_galois(const Line<ExtElement>& l) {
    return Line<ExtElement>{l.swapped, l.coef.conj()};
}

/// Orthogonal-complement line for the standard form: (x,y) -> (-y, x).
template <class F>
Line<F> line_image_perp(const Line<F>& l) {
    const auto dir = l.direction();
    return make_line(-dir[1], dir[0]);
}

template <class F>
Line<F> line_image(const Line<F>& l, SigmaKind kind);

template <>
inline Line<ExtElement> line_image<ExtElement>(const Line<ExtElement>& l, SigmaKind kind) {
    if (kind == SigmaKind::Galois) return line_image_galois(l);
    return line_image_perp(l);
}

template <>
inline Line<PAdicNumber> line_image<PAdicNumber>(const Line<PAdicNumber>& l, SigmaKind kind) {
    if (kind == SigmaKind::Galois)
        throw DomainError("Galois involution undefined over the base field tree");
    return line_image_perp(l);
}

/// Unordered frame of two distinct lines; the apartment it spans.
template <class F>
struct Apartment {
    Line<F> l1, l2;
};

template <class F>
bool apartments_agree(const Apartment<F>& a, const Apartment<F>& b) {
    return (lines_agree(a.l1, b.l1) && lines_agree(a.l2, b.l2)) ||
           (lines_agree(a.l1, b.l2) && lines_agree(a.l2, b.l1));
}

/// sigma maps the frame's line pair to itself (fixing or swapping the lines).
template <class F>
bool is_sigma_stable(const Apartment<F>& a, SigmaKind kind) {
    const Line<F> s1 = line_image(a.l1, kind);
    const Line<F> s2 = line_image(a.l2, kind);
    return (lines_agree(s1, a.l1) && lines_agree(s2, a.l2)) ||
           (lines_agree(s1, a.l2) && lines_agree(s2, a.l1));
}

namespace detail {

/// Intersection scales: Lambda n L_i = pi^(m_i) o * w_i in basis coordinates,
/// plus the coordinates of the scaled direction vectors.
template <class F>
struct SplitData {
    bool splits;
    std::array<long long, 2> m;
    Mat<F> scaled_coords;  // columns pi^(m_i) B^-1 w_i
};

template <class F>
SplitData<F> split_data(const TreeField<F>& tf, const Apartment<F>& a, const TreeVertex<F>& v) {
    const Mat<F> binv = v.basis.inverse();
    const std::array<F, 2> w1 = a.l1.direction();
    const std::array<F, 2> w2 = a.l2.direction();
    Mat<F> coords(2, 2, tf.one.zero_like());
    coords.at(0, 0) = binv.at(0, 0) * w1[0] + binv.at(0, 1) * w1[1];
    coords.at(1, 0) = binv.at(1, 0) * w1[0] + binv.at(1, 1) * w1[1];
    coords.at(0, 1) = binv.at(0, 0) * w2[0] + binv.at(0, 1) * w2[1];
    coords.at(1, 1) = binv.at(1, 0) * w2[0] + binv.at(1, 1) * w2[1];
    SplitData<F> out{false, {0, 0}, coords};
    for (int j = 0; j < 2; ++j) {
        std::optional<long long> mv;
        for (int i = 0; i < 2; ++i) {
            const auto rv = coords.at(i, j).regular_valuation();
            if (rv && (!mv || *rv < *mv)) mv = *rv;
        }
        if (!mv) throw PrecisionError("apartment containment: line coordinates vanish");
        for (int i = 0; i < 2; ++i) {
            const F& x = coords.at(i, j);
            if (!x.is_regular() && !x.is_zero() && x.window() < *mv)
                throw PrecisionError("apartment containment: valuation undecidable");
        }
        out.m[static_cast<std::size_t>(j)] = -*mv;
        const F scale = uniformizer_power(tf.pi, -*mv);
        for (int i = 0; i < 2; ++i) out.scaled_coords.at(i, j) = coords.at(i, j) * scale;
    }
    const F det = out.scaled_coords.determinant();
    if (det.is_zero()) return out;
    const auto dv = det.regular_valuation();
    if (!dv) {
        if (det.valuation_at_least(1)) return out;  // certainly not a unit
        throw PrecisionError("apartment containment: determinant undecidable");
    }
    out.splits = (*dv == 0);
    return out;
}

} // namespace detail

/// Lambda = (Lambda n L1) + (Lambda n L2): the vertex lies on the apartment.
template <class F>
bool apartment_contains(const TreeField<F>& tf, const Apartment<F>& a, const TreeVertex<F>& v) {
    return detail::split_data(tf, a, v).splits;
}

/// An apartment through two distinct vertices, from the Smith form of the
/// basis-change matrix (simultaneous diagonalization of the two lattices).
template <class F>
Apartment<F> apartment_through(const TreeField<F>& tf, const TreeVertex<F>& u,
                               const TreeVertex<F>& v) {
    const Mat<F> change = u.basis.inverse() * v.basis;
    const Smith2<F> s = smith2(change, tf.pi);
    const Mat<F> w = u.basis * s.left;
    return Apartment<F>{make_line(w.at(0, 0), w.at(1, 0)), make_line(w.at(0, 1), w.at(1, 1))};
}

/// Vertices of the apartment at signed position t relative to v (t = 0 gives
/// v itself when the apartment contains v).
template <class F>
std::vector<TreeVertex<F>> apartment_vertices(const TreeField<F>& tf, const Apartment<F>& a,
                                              const TreeVertex<F>& v, long long radius) {
    const auto data = detail::split_data(tf, a, v);
    if (!data.splits) throw DomainError("apartment_vertices: vertex not on the apartment");
    const std::array<F, 2> w1 = a.l1.direction();
    const std::array<F, 2> w2 = a.l2.direction();
    std::vector<TreeVertex<F>> out;
    for (long long t = -radius; t <= radius; ++t) {
        Mat<F> b(2, 2, tf.one.zero_like());
        const F s1 = uniformizer_power(tf.pi, data.m[0] + t);
        const F s2 = uniformizer_power(tf.pi, data.m[1]);
        b.at(0, 0) = w1[0] * s1;
        b.at(1, 0) = w1[1] * s1;
        b.at(0, 1) = w2[0] * s2;
        b.at(1, 1) = w2[1] * s2;
        out.push_back(make_vertex(tf, b));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration of candidate lines and the sigma-stable apartment search
// ---------------------------------------------------------------------------

namespace detail {

inline PAdicNumber digits_value(const PrimeConfig& cfg, long long code, int len) {
    // base-p digits of `code`, least significant first
    long long value = 0, mult = 1;
    for (int i = 0; i < len; ++i) {
        value += (code % cfg.p) * mult;
        code /= cfg.p;
        mult *= cfg.p;
    }
    return PAdicNumber::from_int(cfg, value);
}

/// All integral coefficients of pi-adic depth exactly `depth` for the base
/// field (depth 0: just 0).
inline std::vector<PAdicNumber> coefficients_at_depth(const PrimeConfig& cfg, int depth) {
    std::vector<PAdicNumber> out;
    if (depth == 0) {
        out.push_back(PAdicNumber::zero(cfg));
        return out;
    }
    long long count = 1;
    for (int i = 0; i < depth; ++i) count *= cfg.p;
    for (long long code = count / cfg.p; code < count; ++code)
        out.push_back(digits_value(cfg, code, depth));
    return out;
}

/// All integral k'-coefficients of pi'-adic depth exactly `depth`.
inline std::vector<ExtElement> coefficients_at_depth(const QuadExt& ext, int depth) {
    std::vector<ExtElement> out;
    if (depth == 0) {
        out.push_back(ExtElement::zero(ext));
        return out;
    }
    if (ext.ramified()) {
        // digit positions 0..depth-1 in pi' = sqrt(delta): even -> re, odd -> im
        long long total = 1;
        for (int i = 0; i < depth; ++i) total *= ext.base.p;
        for (long long code = total / ext.base.p; code < total; ++code) {
            long long c = code;
            long long re_val = 0, im_val = 0, mult_re = 1, mult_im = 1;
            for (int pos = 0; pos < depth; ++pos) {
                const long long d = c % ext.base.p;
                c /= ext.base.p;
                if (pos % 2 == 0) {
                    re_val += d * mult_re;
                    mult_re *= ext.base.p;
                } else {
                    im_val += d * mult_im;
                    mult_im *= ext.base.p;
                }
            }
            out.push_back(ExtElement::from_parts(ext,
                                                 PAdicNumber::from_int(ext.base, re_val),
                                                 PAdicNumber::from_int(ext.base, im_val)));
        }
    } else {
        long long count = 1;
        for (int i = 0; i < depth; ++i) count *= ext.base.p;
        for (long long re = 0; re < count; ++re)
            for (long long im = 0; im < count; ++im) {
                if (re < count / ext.base.p && im < count / ext.base.p)
                    continue;  // lower depth already emitted
                out.push_back(ExtElement::from_parts(ext,
                                                     digits_value(ext.base, re, depth),
                                                     digits_value(ext.base, im, depth)));
            }
    }
    return out;
}

template <class F, class Ctx>
std::vector<Line<F>> lines_at_depth(const Ctx& ctx, const TreeField<F>& tf, int depth) {
    std::vector<Line<F>> out;
    for (const F& c : coefficients_at_depth(ctx, depth)) out.push_back(Line<F>{false, c});
    // swapped lines (c, 1) with v(c) >= 1: pi * (coefficients of depth-1)
    if (depth == 0) {
        out.push_back(Line<F>{true, tf.one.zero_like()});
    } else {
        for (const F& c : coefficients_at_depth(ctx, depth - 1)) {
            const F scaled = tf.pi * c;
            if (!scaled.is_zero()) out.push_back(Line<F>{true, scaled});
        }
    }
    return out;
}

} // namespace detail

/// Deterministic search for a sigma-stable apartment through v: derived
/// candidates first (the rational-sublattice frame for the Galois case, the
/// orthogonal frame of the lattice for the transpose case, conjugate frames
/// of residue directions), then the exhaustive frames generated by boundary
/// directions of increasing depth up to `radius`.  "nullopt" only reports
/// exhaustion at this radius, never nonexistence.
template <class F, class Ctx, class DerivedGen>
std::optional<Apartment<F>> find_stable_apartment_impl(const Ctx& ctx, const TreeField<F>& tf,
                                                       const TreeVertex<F>& v, SigmaKind kind,
                                                       int radius, DerivedGen&& derived) {
    auto admissible = [&](const Apartment<F>& a) {
        if (lines_agree(a.l1, a.l2)) return false;
        if (!is_sigma_stable(a, kind)) return false;
        try {
            return apartment_contains(tf, a, v);
        } catch (const PrecisionError&) {
            return false;
        }
    };
    for (const Apartment<F>& a : derived())
        if (admissible(a)) return a;
    // conjugate-pair frames {L, sigma L} by depth, then fixed-line pairs
    for (int depth = 0; depth <= radius; ++depth) {
        for (const Line<F>& l : detail::lines_at_depth(ctx, tf, depth)) {
            Line<F> img = line_image(l, kind);
            if (lines_agree(img, l)) continue;
            const Apartment<F> a{l, img};
            if (admissible(a)) return a;
        }
    }
    // pairs of sigma-fixed lines (pointwise-stable frames)
    std::vector<Line<F>> fixed;
    for (int depth = 0; depth <= radius; ++depth)
        for (const Line<F>& l : detail::lines_at_depth(ctx, tf, depth)) {
            bool is_fixed = false;
            try {
                is_fixed = lines_agree(line_image(l, kind), l);
            } catch (const PrecisionError&) {
            }
            if (is_fixed) fixed.push_back(l);
        }
    for (std::size_t i = 0; i < fixed.size(); ++i)
        for (std::size_t j = i + 1; j < fixed.size(); ++j) {
            const Apartment<F> a{fixed[i], fixed[j]};
            if (admissible(a)) return a;
        }
    return std::nullopt;
}

/// Galois case: candidate frames derived from the rational sublattice
/// Lambda n k^2 and from conjugate pairs of residue directions.
inline std::vector<Apartment<ExtElement>> derived_galois_frames(const QuadExt& ext,
                                                                const TreeField<ExtElement>& tf,
                                                                const TreeVertex<ExtElement>& v) {
    std::vector<Apartment<ExtElement>> out;
    // rational sublattice: o-span of (b1, sd*b1, b2, sd*b2) meets k^2 in the
    // columns of an HNF whose first two (imaginary) rows vanish
    const PrimeConfig& cfg = ext.base;
    Mat<PAdicNumber> span(4, 4, PAdicNumber::zero(cfg));
    const ExtElement sd = ExtElement::sqrt_delta(ext);
    for (int j = 0; j < 2; ++j) {
        const std::array<ExtElement, 2> col{v.basis.at(0, j), v.basis.at(1, j)};
        const std::array<ExtElement, 2> sd_col{sd * col[0], sd * col[1]};
        for (int i = 0; i < 2; ++i) {
            span.at(i, 2 * j) = col[static_cast<std::size_t>(i)].im();
            span.at(2 + i, 2 * j) = col[static_cast<std::size_t>(i)].re();
            span.at(i, 2 * j + 1) = sd_col[static_cast<std::size_t>(i)].im();
            span.at(2 + i, 2 * j + 1) = sd_col[static_cast<std::size_t>(i)].re();
        }
    }
    try {
        const auto h = hnf_basis(span, PAdicNumber::from_int(cfg, cfg.p));
        const auto lift = [&](int col) {
            return make_line(ExtElement::from_base(ext, h.at(2, col)),
                             ExtElement::from_base(ext, h.at(3, col)));
        };
        out.push_back(Apartment<ExtElement>{lift(2), lift(3)});
    } catch (const DomainError&) {
    } catch (const PrecisionError&) {
    }
    // conjugate frames of residue directions through the lattice basis
    std::vector<ExtElement> probes = tf.residues;
    probes.push_back(tf.pi);
    for (const ExtElement& t : probes) {
        for (int orient = 0; orient < 2; ++orient) {
            std::array<ExtElement, 2> u;
            if (orient == 0) {
                u[0] = tf.one;
                u[1] = t;
            } else {
                u[0] = t;
                u[1] = tf.one;
            }
            const ExtElement w0 = v.basis.at(0, 0) * u[0] + v.basis.at(0, 1) * u[1];
            const ExtElement w1 = v.basis.at(1, 0) * u[0] + v.basis.at(1, 1) * u[1];
            try {
                const Line<ExtElement> l = make_line(w0, w1);
                out.push_back(Apartment<ExtElement>{l, line_image_galois(l)});
            } catch (const DomainError&) {
            } catch (const PrecisionError&) {
            }
        }
    }
    return out;
}

inline std::optional<Apartment<ExtElement>> find_sigma_stable_apartment(
    const QuadExt& ext, const TreeField<ExtElement>& tf, const TreeVertex<ExtElement>& v,
    int radius) {
    return find_stable_apartment_impl(ext, tf, v, SigmaKind::Galois, radius,
                                      [&] { return derived_galois_frames(ext, tf, v); });
}

/// Transpose case: the orthogonal frame of the lattice (the constructive
/// content of the lattice orthogonalization) is tried first.
inline std::optional<Apartment<PAdicNumber>> find_sigma_stable_apartment(
    const PrimeConfig& cfg, const TreeField<PAdicNumber>& tf, const TreeVertex<PAdicNumber>& v,
    int radius) {
    auto derived = [&] {
        std::vector<Apartment<PAdicNumber>> out;
        try {
            const auto form = Mat<PAdicNumber>::identity(2, PAdicNumber::zero(cfg));
            const auto ortho = orthogonalize_lattice(form, v.basis);
            out.push_back(Apartment<PAdicNumber>{make_line(ortho.at(0, 0), ortho.at(1, 0)),
                                                 make_line(ortho.at(0, 1), ortho.at(1, 1))});
        } catch (const PrecisionError&) {
        }
        return out;
    };
    return find_stable_apartment_impl(cfg, tf, v, SigmaKind::TransposeInverse, radius, derived);
}

// ---------------------------------------------------------------------------
// Census and the ramified counterexample checks
// ---------------------------------------------------------------------------

struct CensusRow {
    std::string vertex_key;
    int depth = 0;
    bool sigma_fixed = false;
    int neighbor_count = 0;
    int fixed_neighbor_count = 0;
    char type = '-';  // 'A' (all neighbors fixed) or 'B' (exactly two)
};

struct CensusReport {
    long long q = 0;
    int radius = 0;
    std::size_t vertex_count = 0;
    std::vector<CensusRow> rows;  // sigma-fixed vertices only
    int type_a = 0;
    int type_b = 0;
    bool neighbor_counts_ok = true;   // every vertex has exactly q+1 neighbors
    bool parity_matches_type = true;  // even depth <-> A, odd depth <-> B
    bool dichotomy_ok = true;         // every fixed vertex is A or B
};

/// Breadth-first sweep of the ball of the given radius around the base
/// vertex of the ramified k'-tree, recording the fixed-point structure.
inline CensusReport fixed_point_census(const QuadExt& ext, int radius) {
    if (!ext.ramified()) throw DomainError("fixed_point_census: ramified extension required");
    const auto tf = tree_field(ext);
    CensusReport report;
    report.q = tf.q;
    report.radius = radius;
    std::unordered_map<std::string, int> depth_of;
    std::deque<TreeVertex<ExtElement>> queue;
    const auto base = base_vertex(tf);
    depth_of[base.key] = 0;
    queue.push_back(base);
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        const int depth = depth_of[v.key];
        const auto nbrs = neighbors(tf, v);
        if (static_cast<long long>(nbrs.size()) != tf.q + 1) report.neighbor_counts_ok = false;
        const bool fixed = sigma_galois(tf, v) == v;
        if (fixed) {
            CensusRow row;
            row.vertex_key = v.key;
            row.depth = depth;
            row.sigma_fixed = true;
            row.neighbor_count = static_cast<int>(nbrs.size());
            for (const auto& w : nbrs)
                if (sigma_galois(tf, w) == w) ++row.fixed_neighbor_count;
            if (row.fixed_neighbor_count == row.neighbor_count)
                row.type = 'A';
            else if (row.fixed_neighbor_count == 2)
                row.type = 'B';
            else
                report.dichotomy_ok = false;
            if (row.type == 'A') ++report.type_a;
            if (row.type == 'B') ++report.type_b;
            if ((depth % 2 == 0) != (row.type == 'A')) report.parity_matches_type = false;
            report.rows.push_back(std::move(row));
        }
        if (depth < radius)
            for (const auto& w : nbrs)
                if (!depth_of.count(w.key)) {
                    depth_of[w.key] = depth + 1;
                    queue.push_back(w);
                }
    }
    report.vertex_count = depth_of.size();
    return report;
}

struct ApartmentVerdict {
    std::string description;
    bool pointwise_fixed = false;
};

struct CounterexampleReport {
    int radius = 0;
    std::vector<ApartmentVerdict> apartments;
    bool all_pointwise_fixed = true;
};

/// Enumerates every sigma-stable apartment through `v` discoverable at
/// direction-depth `radius` and tests whether each is pointwise fixed on its
/// vertices within that distance.
inline CounterexampleReport counterexample_check(const QuadExt& ext, int radius,
                                                 const TreeVertex<ExtElement>& v) {
    const auto tf = tree_field(ext);
    CounterexampleReport report;
    report.radius = radius;
    std::vector<Apartment<ExtElement>> found;
    auto consider = [&](const Apartment<ExtElement>& a) {
        if (lines_agree(a.l1, a.l2)) return;
        if (!is_sigma_stable(a, SigmaKind::Galois)) return;
        bool contains = false;
        try {
            contains = apartment_contains(tf, a, v);
        } catch (const PrecisionError&) {
        }
        if (!contains) return;
        for (const auto& seen : found)
            if (apartments_agree(a, seen)) return;
        found.push_back(a);
    };
    // conjugate pairs and fixed-line pairs, exhaustively to the radius
    std::vector<Line<ExtElement>> fixed_lines;
    for (int depth = 0; depth <= radius; ++depth) {
        for (const Line<ExtElement>& l : detail::lines_at_depth(ext, tf, depth)) {
            const Line<ExtElement> img = line_image_galois(l);
            if (lines_agree(img, l))
                fixed_lines.push_back(l);
            else
                consider(Apartment<ExtElement>{l, img});
        }
    }
    for (std::size_t i = 0; i < fixed_lines.size(); ++i)
        for (std::size_t j = i + 1; j < fixed_lines.size(); ++j)
            consider(Apartment<ExtElement>{fixed_lines[i], fixed_lines[j]});
    for (const auto& a : found) {
        ApartmentVerdict verdict;
        verdict.pointwise_fixed = true;
        const auto verts = apartment_vertices(tf, a, v, radius);
        for (const auto& w : verts)
            if (sigma_galois(tf, w) != w) verdict.pointwise_fixed = false;
        verdict.description = "frame{" + (a.l1.swapped ? std::string("swap:") : std::string("")) +
                              a.l1.coef.to_string() + " ; " +
                              (a.l2.swapped ? std::string("swap:") : std::string("")) +
                              a.l2.coef.to_string() + "}";
        if (!verdict.pointwise_fixed) report.all_pointwise_fixed = false;
        report.apartments.push_back(std::move(verdict));
    }
    return report;
}

/// Split-case contrast: over the base field with the transpose involution,
/// every vertex admits a stable apartment with swapped lines (the orthogonal
/// frame of any lattice basis).
struct SplitContrastReport {
    std::size_t vertices_checked = 0;
    bool all_found_swapped = true;
};

inline SplitContrastReport split_contrast_check(const PrimeConfig& cfg, int radius) {
    const auto tf = tree_field(cfg);
    SplitContrastReport report;
    std::unordered_set<std::string> seen;
    std::deque<std::pair<TreeVertex<PAdicNumber>, int>> queue;
    const auto base = base_vertex(tf);
    seen.insert(base.key);
    queue.emplace_back(base, 0);
    while (!queue.empty()) {
        auto [v, depth] = queue.front();
        queue.pop_front();
        ++report.vertices_checked;
        bool ok = false;
        const auto found = find_sigma_stable_apartment(cfg, tf, v, radius);
        if (found) {
            const Line<PAdicNumber> img = line_image_perp(found->l1);
            const bool swaps = lines_agree(img, found->l2) && !lines_agree(found->l1, found->l2);
            ok = swaps && apartment_contains(tf, *found, v);
        }
        if (!ok) report.all_found_swapped = false;
        if (depth < radius)
            for (const auto& w : neighbors(tf, v))
                if (seen.insert(w.key).second) queue.emplace_back(w, depth + 1);
    }
    return report;
}

} // namespace symspace

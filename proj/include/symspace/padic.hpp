#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symspace/errors.hpp"

namespace symspace {

// ---------------------------------------------------------------------------
// Prime configuration
// ---------------------------------------------------------------------------

/// Guard digits added beyond the digits a caller wants certified: the
/// factor-and-recompose chains divide by Gram pivots of valuation up to
/// roughly 2*n*|v|, and certification through window bookkeeping needs that
/// much headroom in the worst draws.
inline constexpr int kCertificationGuardDigits = 20;

/// Fixed arithmetic context for Q_p with odd p: the prime, the number of
/// tracked base-p digits, and the canonical non-square unit xi (least
/// non-residue in {2..p-1}).  The uniformizer is always p itself.
struct PrimeConfig {
    long long p = 0;
    int precision = 40;
    long long xi = 0;

    static PrimeConfig make(long long p, int precision = 40);
};

inline long long mod_pow(long long base, long long exp, long long m) {
    long long r = 1 % m;
    base %= m;
    if (base < 0) base += m;
    while (exp > 0) {
        if (exp & 1) r = (__int128(r) * base) % m;
        base = (__int128(base) * base) % m;
        exp >>= 1;
    }
    return r;
}

/// Legendre symbol of u modulo the odd prime p; throws if p | u.
inline int legendre(long long u, long long p) {
    long long r = u % p;
    if (r < 0) r += p;
    if (r == 0) throw DomainError("legendre: argument divisible by p");
    long long e = mod_pow(r, (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

inline PrimeConfig PrimeConfig::make(long long p, int precision) {
    if (p < 3 || p % 2 == 0) throw DomainError("PrimeConfig: p must be an odd prime >= 3");
    for (long long d = 3; d * d <= p; d += 2)
        if (p % d == 0) throw DomainError("PrimeConfig: p is not prime");
    if (precision < 4) throw DomainError("PrimeConfig: precision must be >= 4");
    PrimeConfig cfg;
    cfg.p = p;
    cfg.precision = precision;
    cfg.xi = 0;
    for (long long u = 2; u < p; ++u) {
        if (legendre(u, p) == -1) { cfg.xi = u; break; }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Square classes of k^x / (k^x)^2, represented by {1, xi, p, xi*p}
// ---------------------------------------------------------------------------

enum class SquareClass : unsigned { One = 0, Xi = 1, Pi = 2, XiPi = 3 };

/// Klein four-group multiplication (Pi*Pi = One, Xi*Pi = XiPi, ...).
inline SquareClass operator*(SquareClass a, SquareClass b) {
    return static_cast<SquareClass>(static_cast<unsigned>(a) ^ static_cast<unsigned>(b));
}

inline bool class_has_xi(SquareClass c) { return static_cast<unsigned>(c) & 1u; }
inline bool class_has_pi(SquareClass c) { return static_cast<unsigned>(c) & 2u; }

inline const char* class_name(SquareClass c) {
    switch (c) {
        case SquareClass::One: return "1";
        case SquareClass::Xi: return "xi";
        case SquareClass::Pi: return "pi";
        case SquareClass::XiPi: return "xi*pi";
    }
    return "?";
}

namespace detail {

inline long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline long long floor_mod(long long a, long long b) { return a - floor_div(a, b) * b; }

/// In-place carry normalization of base-p digits; digits beyond the vector
/// length fall outside the tracked window and are dropped.
inline void carry_fix(std::vector<std::int64_t>& d, long long p) {
    long long carry = 0;
    for (auto& x : d) {
        long long t = x + carry;
        long long r = floor_mod(t, p);
        carry = (t - r) / p;
        x = r;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// PAdicNumber
// ---------------------------------------------------------------------------

/// Finite-precision element of Q_p.  Three states:
///   - exact zero (valuation +infinity),
///   - regular: value = p^v * (d_0 + d_1 p + ...) with d_0 != 0, known modulo
///     p^(v + digits), where digits = number of tracked unit digits,
///   - zero_mod: known only to vanish modulo p^bound ("zero to known
///     precision", as produced by total cancellation in addition).
/// Arithmetic never reports more digits of validity than its inputs justify;
/// operations that need digits of a zero_mod value throw PrecisionError.
class PAdicNumber {
public:
    enum class Kind { Zero, Regular, ZeroMod };

    static constexpr long long kInfValuation = std::numeric_limits<long long>::max() / 4;

    PAdicNumber() = default;

    static PAdicNumber zero(const PrimeConfig& cfg) {
        PAdicNumber x;
        x.p_ = cfg.p;
        x.n_ = cfg.precision;
        x.kind_ = Kind::Zero;
        return x;
    }

    static PAdicNumber zero_mod(long long p, int full_prec, long long bound) {
        PAdicNumber x;
        x.p_ = p;
        x.n_ = full_prec;
        x.kind_ = Kind::ZeroMod;
        x.v_ = bound;
        return x;
    }

    static PAdicNumber from_int(const PrimeConfig& cfg, long long value) {
        if (value == 0) return zero(cfg);
        PAdicNumber x;
        x.p_ = cfg.p;
        x.n_ = cfg.precision;
        x.kind_ = Kind::Regular;
        x.v_ = 0;
        while (value % cfg.p == 0) { value /= cfg.p; ++x.v_; }
        x.d_.resize(cfg.precision);
        long long cur = value;
        for (int i = 0; i < cfg.precision; ++i) {
            long long dig = detail::floor_mod(cur, cfg.p);
            x.d_[i] = dig;
            cur = (cur - dig) / cfg.p;
        }
        return x;
    }

    static PAdicNumber from_rational(const PrimeConfig& cfg, long long num, long long den) {
        if (den == 0) throw DomainError("from_rational: zero denominator");
        if (num == 0) return zero(cfg);
        return from_int(cfg, num) / from_int(cfg, den);
    }

    static PAdicNumber from_unit_digits(long long p, int full_prec, long long v,
                                        std::vector<std::int64_t> digits) {
        PAdicNumber x;
        x.p_ = p;
        x.n_ = full_prec;
        // strip leading zero digits into the valuation
        std::size_t t = 0;
        while (t < digits.size() && digits[t] == 0) ++t;
        if (t == digits.size()) return zero_mod(p, full_prec, v + static_cast<long long>(t));
        x.kind_ = Kind::Regular;
        x.v_ = v + static_cast<long long>(t);
        x.d_.assign(digits.begin() + static_cast<std::ptrdiff_t>(t), digits.end());
        return x;
    }

    long long prime() const { return p_; }
    int config_precision() const { return n_; }

    bool is_zero() const { return kind_ == Kind::Zero; }
    bool is_regular() const { return kind_ == Kind::Regular; }
    bool is_zero_mod() const { return kind_ == Kind::ZeroMod; }
    /// The value vanishes through its whole tracked window.
    bool vanishes() const { return kind_ != Kind::Regular; }

    long long valuation() const {
        if (kind_ == Kind::Regular) return v_;
        if (kind_ == Kind::Zero) throw DomainError("valuation of exact zero");
        throw PrecisionError("valuation of a value known only to vanish mod p^" + std::to_string(v_));
    }

    /// Valuation when the value is certainly nonzero, nullopt otherwise.
    std::optional<long long> regular_valuation() const {
        if (kind_ == Kind::Regular) return v_;
        return std::nullopt;
    }

    /// Exponent w such that the value is known modulo p^w.
    long long window() const {
        if (kind_ == Kind::Zero) return kInfValuation;
        if (kind_ == Kind::ZeroMod) return v_;
        return v_ + static_cast<long long>(d_.size());
    }

    int precision_digits() const {
        if (kind_ != Kind::Regular) throw DomainError("precision_digits on non-regular value");
        return static_cast<int>(d_.size());
    }

    const std::vector<std::int64_t>& digits() const {
        if (kind_ != Kind::Regular) throw DomainError("digits of non-regular value");
        return d_;
    }

    long long unit_residue() const { return digits()[0]; }

    /// Decidable test against exact zero.  Asking it of a value known only to
    /// finite precision is an error rather than a guess.
    bool equals_zero() const {
        if (kind_ == Kind::Zero) return true;
        if (kind_ == Kind::Regular) return false;
        throw PrecisionError("cannot compare a zero-to-precision value with exact zero");
    }

    /// True if the valuation is certainly >= t; PrecisionError if the tracked
    /// window cannot decide.
    bool valuation_at_least(long long t) const {
        if (kind_ == Kind::Zero) return true;
        if (kind_ == Kind::Regular) return v_ >= t;
        if (v_ >= t) return true;
        throw PrecisionError("insufficient precision to decide a valuation sign");
    }

    PAdicNumber operator-() const {
        if (kind_ != Kind::Regular) return *this;
        PAdicNumber r = *this;
        r.d_[0] = p_ - d_[0];
        for (std::size_t i = 1; i < r.d_.size(); ++i) r.d_[i] = p_ - 1 - d_[i];
        return r;
    }

    PAdicNumber operator+(const PAdicNumber& o) const {
        check_same(o);
        if (kind_ == Kind::Zero) return o;
        if (o.kind_ == Kind::Zero) return *this;
        const long long w = std::min(window(), o.window());
        if (kind_ == Kind::ZeroMod && o.kind_ == Kind::ZeroMod)
            return zero_mod(p_, nmax(o), w);
        if (kind_ == Kind::ZeroMod) return o.truncated(w);
        if (o.kind_ == Kind::ZeroMod) return truncated(w);
        const long long v0 = std::min(v_, o.v_);
        const long long len = w - v0;
        if (len <= 0) return zero_mod(p_, nmax(o), w);
        std::vector<std::int64_t> sum(static_cast<std::size_t>(len), 0);
        accumulate(sum, *this, v0);
        accumulate(sum, o, v0);
        detail::carry_fix(sum, p_);
        PAdicNumber r = from_unit_digits(p_, nmax(o), v0, std::move(sum));
        return r;
    }

    PAdicNumber operator-(const PAdicNumber& o) const { return *this + (-o); }

    PAdicNumber operator*(const PAdicNumber& o) const {
        check_same(o);
        if (kind_ == Kind::Zero || o.kind_ == Kind::Zero) {
            PAdicNumber z;
            z.p_ = p_;
            z.n_ = nmax(o);
            z.kind_ = Kind::Zero;
            return z;
        }
        if (kind_ == Kind::ZeroMod || o.kind_ == Kind::ZeroMod) {
            // v_ holds the valuation (Regular) or the vanishing bound (ZeroMod);
            // either way the product vanishes mod p^(v_ + o.v_).
            return zero_mod(p_, nmax(o), v_ + o.v_);
        }
        const std::size_t prec = std::min(d_.size(), o.d_.size());
        std::vector<std::int64_t> prod(prec, 0);
        for (std::size_t i = 0; i < prec; ++i) {
            if (d_[i] == 0) continue;
            const std::size_t lim = prec - i;
            const std::size_t lb = std::min(lim, o.d_.size());
            for (std::size_t j = 0; j < lb; ++j) prod[i + j] += d_[i] * o.d_[j];
        }
        detail::carry_fix(prod, p_);
        return from_unit_digits(p_, nmax(o), v_ + o.v_, std::move(prod));
    }

    /// Multiplicative inverse; relative precision is preserved.
    PAdicNumber inverse() const {
        if (kind_ == Kind::Zero) throw DomainError("inversion of exact zero");
        if (kind_ == Kind::ZeroMod) throw PrecisionError("inversion of a zero-to-precision value");
        const std::size_t prec = d_.size();
        std::vector<std::int64_t> q(prec, 0);
        std::vector<std::int64_t> rem(prec, 0);
        rem[0] = 1;
        const long long inv0 = mod_pow(d_[0], p_ - 2, p_);
        for (std::size_t k = 0; k < prec; ++k) {
            long long rk = detail::floor_mod(rem[k], p_);
            long long qk = (__int128(rk) * inv0) % p_;
            q[k] = qk;
            if (qk != 0) {
                for (std::size_t j = 0; k + j < prec; ++j) rem[k + j] -= qk * d_[j];
            }
            // rem[k] is now an exact multiple of p; push the carry up
            if (k + 1 < prec) rem[k + 1] += rem[k] / p_;
        }
        PAdicNumber r;
        r.p_ = p_;
        r.n_ = n_;
        r.kind_ = Kind::Regular;
        r.v_ = -v_;
        r.d_ = std::move(q);
        return r;
    }

    PAdicNumber operator/(const PAdicNumber& o) const {
        check_same(o);
        if (o.kind_ == Kind::Zero) throw DomainError("division by exact zero");
        if (o.kind_ == Kind::ZeroMod) throw PrecisionError("division by a zero-to-precision value");
        if (kind_ == Kind::Zero) return *this;
        if (kind_ == Kind::ZeroMod) return zero_mod(p_, nmax(o), v_ - o.v_);
        return *this * o.inverse();
    }

    PAdicNumber pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        PAdicNumber base = *this;
        PAdicNumber r = base.one_like();
        while (e > 0) {
            if (e & 1) r = r * base;
            if ((e >>= 1)) base = base * base;
        }
        return r;
    }

    /// Split as value = high * p^m + low, with low the canonical
    /// representative made of the digits below exponent m (an exactly known
    /// finite expansion) and high the remaining digits.  Requires the tracked
    /// window to reach m.
    std::pair<PAdicNumber, PAdicNumber> split_at(long long m) const {
        if (kind_ == Kind::Zero) return {*this, *this};
        if (window() < m) throw PrecisionError("split_at: tracked window does not reach p^" + std::to_string(m));
        if (kind_ == Kind::ZeroMod) {
            PAdicNumber lo = zero_like();
            return {zero_mod(p_, n_, v_ - m), lo};
        }
        if (v_ >= m) {
            PAdicNumber hi = *this;
            hi.v_ -= m;
            return {hi, zero_like()};
        }
        const std::size_t cut = static_cast<std::size_t>(m - v_);
        PAdicNumber lo;
        lo.p_ = p_;
        lo.n_ = n_;
        lo.kind_ = Kind::Regular;
        lo.v_ = v_;
        lo.d_.assign(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(std::min(cut, d_.size())));
        lo.d_.resize(static_cast<std::size_t>(n_), 0);  // exactly known finite expansion
        std::vector<std::int64_t> hi_digits(d_.begin() + static_cast<std::ptrdiff_t>(std::min(cut, d_.size())), d_.end());
        PAdicNumber hi = from_unit_digits(p_, n_, 0, std::move(hi_digits));
        PAdicNumber lo2 = from_unit_digits(p_, n_, lo.v_, std::move(lo.d_));
        return {hi, lo2};
    }

    /// Shrink the tracked window to p^w (no-op if already narrower).
    PAdicNumber truncated(long long w) const {
        if (kind_ == Kind::Zero) return *this;
        if (kind_ == Kind::ZeroMod) return zero_mod(p_, n_, std::min(v_, w));
        if (w >= window()) return *this;
        if (w <= v_) return zero_mod(p_, n_, w);
        PAdicNumber r = *this;
        r.d_.resize(static_cast<std::size_t>(w - v_));
        return r;
    }

    /// Congruence on the shared tracked window: a and b agree in all digits
    /// both sides can see.
    bool agrees_with(const PAdicNumber& o) const { return !(*this - o).is_regular(); }

    PAdicNumber zero_like() const {
        PAdicNumber z;
        z.p_ = p_;
        z.n_ = n_;
        z.kind_ = Kind::Zero;
        return z;
    }

    PAdicNumber one_like() const {
        PAdicNumber r;
        r.p_ = p_;
        r.n_ = n_;
        r.kind_ = Kind::Regular;
        r.v_ = 0;
        r.d_.assign(static_cast<std::size_t>(n_), 0);
        r.d_[0] = 1;
        return r;
    }

    PAdicNumber from_int_like(long long value) const {
        PrimeConfig cfg;
        cfg.p = p_;
        cfg.precision = n_;
        cfg.xi = 0;
        return from_int(cfg, value);
    }

    /// Serialized as "p^v * u mod p^prec" with u in decimal.
    std::string to_string() const {
        if (kind_ == Kind::Zero) return "0";
        if (kind_ == Kind::ZeroMod)
            return "O(" + std::to_string(p_) + "^" + std::to_string(v_) + ")";
        return std::to_string(p_) + "^" + std::to_string(v_) + " * " + unit_decimal() +
               " mod " + std::to_string(p_) + "^" + std::to_string(d_.size());
    }

    /// Decimal string of the unit part (a base-p to base-10 conversion).
    std::string unit_decimal() const {
        std::vector<std::uint32_t> dec{0};  // little-endian base 10^9
        const std::uint64_t B = 1000000000ULL;
        for (std::size_t i = d_.size(); i-- > 0;) {
            std::uint64_t carry = static_cast<std::uint64_t>(d_[i]);
            for (auto& limb : dec) {
                std::uint64_t t = static_cast<std::uint64_t>(limb) * static_cast<std::uint64_t>(p_) + carry;
                limb = static_cast<std::uint32_t>(t % B);
                carry = t / B;
            }
            while (carry) {
                dec.push_back(static_cast<std::uint32_t>(carry % B));
                carry /= B;
            }
        }
        std::string s = std::to_string(dec.back());
        for (std::size_t i = dec.size() - 1; i-- > 0;) {
            std::string limb = std::to_string(dec[i]);
            s += std::string(9 - limb.size(), '0') + limb;
        }
        return s;
    }

private:
    void check_same(const PAdicNumber& o) const {
        if (p_ != o.p_) throw DomainError("mixed primes in p-adic arithmetic");
    }
    int nmax(const PAdicNumber& o) const { return std::max(n_, o.n_); }

    void accumulate(std::vector<std::int64_t>& sum, const PAdicNumber& x, long long v0) const {
        const long long shift = x.v_ - v0;
        for (std::size_t i = 0; i < x.d_.size(); ++i) {
            const std::size_t k = static_cast<std::size_t>(shift) + i;
            if (k >= sum.size()) break;
            sum[k] += x.d_[i];
        }
    }

    long long p_ = 0;
    int n_ = 0;
    Kind kind_ = Kind::Zero;
    long long v_ = 0;
    std::vector<std::int64_t> d_;
};

inline int legendre_unit(const PAdicNumber& a) {
    return legendre(a.unit_residue(), a.prime());
}

// ---------------------------------------------------------------------------
// Square roots, square classes, Hilbert symbol
// ---------------------------------------------------------------------------

/// Hensel square root.  None iff the valuation is odd or the unit part is a
/// non-residue.  Of the two roots, returns the one whose unit residue mod p
/// lies in {1..(p-1)/2}.
inline std::optional<PAdicNumber> hensel_sqrt(const PAdicNumber& a) {
    if (a.is_zero()) throw DomainError("hensel_sqrt of exact zero");
    if (a.is_zero_mod()) throw PrecisionError("hensel_sqrt of a zero-to-precision value");
    const long long p = a.prime();
    if (a.valuation() % 2 != 0) return std::nullopt;
    const long long u0 = a.unit_residue();
    if (legendre(u0, p) == -1) return std::nullopt;
    long long r0 = 0;
    for (long long t = 1; t <= (p - 1) / 2; ++t) {
        if ((t * t) % p == u0) { r0 = t; break; }
    }
    // Newton iteration r <- (r + u/r)/2 doubles the number of correct digits.
    PAdicNumber u = PAdicNumber::from_unit_digits(p, a.config_precision(), 0, a.digits());
    PAdicNumber r = u.from_int_like(r0).truncated(a.precision_digits());
    PAdicNumber half = u.from_int_like(2).inverse();
    const int target = a.precision_digits();
    for (int correct = 1; correct < target; correct *= 2) {
        r = (r + u / r) * half;
    }
    if (r.unit_residue() > (p - 1) / 2) r = -r;
    PAdicNumber out = PAdicNumber::from_unit_digits(p, a.config_precision(),
                                                    a.valuation() / 2, r.digits());
    return out;
}

/// The canonical representative 1, xi, p or xi*p of a square class.
inline PAdicNumber class_representative(const PrimeConfig& cfg, SquareClass c) {
    long long v = class_has_xi(c) ? cfg.xi : 1;
    if (class_has_pi(c)) v *= cfg.p;
    return PAdicNumber::from_int(cfg, v);
}

/// Decomposes a = rep(class) * c^2; c is the deterministic Hensel root.
inline std::pair<SquareClass, PAdicNumber> square_class(const PrimeConfig& cfg,
                                                        const PAdicNumber& a) {
    if (a.is_zero()) throw DomainError("square_class of exact zero");
    if (a.is_zero_mod()) throw PrecisionError("square_class of a zero-to-precision value");
    unsigned bits = 0;
    if (detail::floor_mod(a.valuation(), 2) != 0) bits |= 2u;
    if (legendre_unit(a) == -1) bits |= 1u;
    const SquareClass cls = static_cast<SquareClass>(bits);
    auto c = hensel_sqrt(a / class_representative(cfg, cls));
    if (!c) throw DomainError("square_class: internal root failure");
    return {cls, *c};
}

inline SquareClass square_class_of(const PrimeConfig& cfg, const PAdicNumber& a) {
    return square_class(cfg, a).first;
}

/// Hilbert symbol (a,b)_p for odd p: with a = p^alpha u, b = p^beta w,
///   (a,b) = legendre(-1)^(alpha*beta) * legendre(u)^beta * legendre(w)^alpha.
/// Equals +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution.
inline int hilbert(const PrimeConfig& cfg, const PAdicNumber& a, const PAdicNumber& b) {
    if (a.is_zero() || b.is_zero()) throw DomainError("hilbert symbol of zero");
    const long long alpha = a.valuation(), beta = b.valuation();
    int r = 1;
    if ((alpha * beta) % 2 != 0 && legendre(-1, cfg.p) == -1) r = -r;
    if (beta % 2 != 0 && legendre_unit(a) == -1) r = -r;
    if (alpha % 2 != 0 && legendre_unit(b) == -1) r = -r;
    return r;
}

} // namespace symspace

#include <catch2/catch.hpp>

#include <vector>

#include "symspace/lattice.hpp"
#include "symspace/qform.hpp"
#include "symspace/rng.hpp"

using namespace symspace;

namespace {

Mat<PAdicNumber> mat_of(const PrimeConfig& cfg, std::vector<std::vector<long long>> rows) {
    const int n = static_cast<int>(rows.size());
    Mat<PAdicNumber> m(n, static_cast<int>(rows[0].size()), PAdicNumber::zero(cfg));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m.cols(); ++j)
            m.at(i, j) = PAdicNumber::from_int(cfg, rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return m;
}

Mat<PAdicNumber> random_invertible(const PrimeConfig& cfg, Rng& rng, int n, long long vmin,
                                   long long vmax) {
    while (true) {
        Mat<PAdicNumber> g(n, n, PAdicNumber::zero(cfg));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long long u = 1 + static_cast<long long>(
                                      rng.below(static_cast<std::uint64_t>(cfg.p * cfg.p - 1)));
                while (u % cfg.p == 0) ++u;
                const long long v = rng.range(vmin, vmax);
                g.at(i, j) = PAdicNumber::from_int(cfg, u) *
                             PAdicNumber::from_int(cfg, cfg.p).pow(v);
            }
        try {
            const auto det = g.determinant();
            if (det.is_regular()) return g;
        } catch (const PrecisionError&) {
        }
    }
}

Mat<PAdicNumber> random_in_K(const PrimeConfig& cfg, Rng& rng, int n) {
    while (true) {
        Mat<PAdicNumber> g(n, n, PAdicNumber::zero(cfg));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g.at(i, j) = PAdicNumber::from_int(
                    cfg, static_cast<long long>(rng.below(static_cast<std::uint64_t>(cfg.p * cfg.p * cfg.p))));
        try {
            if (in_K(g)) return g;
        } catch (const PrecisionError&) {
        }
    }
}

Mat<PAdicNumber> random_symmetric(const PrimeConfig& cfg, Rng& rng, int n, bool allow_degenerate) {
    Mat<PAdicNumber> m(n, n, PAdicNumber::zero(cfg));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            PAdicNumber x = PAdicNumber::from_int(
                cfg, static_cast<long long>(rng.below(60)) - 30);
            if (allow_degenerate && rng.below(4) == 0) x = PAdicNumber::zero(cfg);
            m.at(i, j) = x;
            m.at(j, i) = x;
        }
    return m;
}

bool gram_is_diagonal(const Mat<PAdicNumber>& form, const Mat<PAdicNumber>& basis) {
    const auto gram = basis.transpose() * form * basis;
    for (int i = 0; i < gram.rows(); ++i)
        for (int j = 0; j < gram.cols(); ++j)
            if (i != j && gram.at(i, j).is_regular()) return false;
    return true;
}

} // namespace

TEST_CASE("hermite normal form canonicality", "[lattice]") {
    auto cfg = PrimeConfig::make(5);
    const auto id = Mat<PAdicNumber>::identity(2, PAdicNumber::zero(cfg));
    const auto pi = PAdicNumber::from_int(cfg, 5);
    CHECK(hnf_basis(id, pi).agrees_with(id));

    // columns (1,1) and (5,0): pivots (1,5), reduced off-diagonal entry 1
    auto b = mat_of(cfg, {{1, 5}, {1, 0}});
    auto h = hnf_basis(b, pi);
    CHECK(h.at(0, 0).agrees_with(PAdicNumber::from_int(cfg, 1)));
    CHECK(h.at(1, 1).agrees_with(PAdicNumber::from_int(cfg, 5)));
    CHECK(h.at(0, 1).is_zero());
    CHECK(h.at(1, 0).agrees_with(PAdicNumber::from_int(cfg, 1)));

    CHECK_THROWS_AS(hnf_basis(mat_of(cfg, {{1, 0}, {1, 0}}), pi), DomainError);
    // equal columns cancel to an uncertifiable zero rather than an exact one
    CHECK_THROWS_AS(hnf_basis(mat_of(cfg, {{1, 1}, {1, 1}}), pi), PrecisionError);
}

TEST_CASE("hnf is right K-invariant and idempotent", "[lattice]") {
    Rng rng(401);
    for (long long p : {3LL, 5LL, 13LL}) {
        auto cfg = PrimeConfig::make(p);
        const auto pi = PAdicNumber::from_int(cfg, p);
        for (int trial = 0; trial < 60; ++trial) {
            Rng tr = rng.split(static_cast<std::uint64_t>(100 * p + trial));
            const int n = 2 + static_cast<int>(tr.below(3));
            auto b = random_invertible(cfg, tr, n, -2, 2);
            auto kappa = random_in_K(cfg, tr, n);
            auto h1 = hnf_basis(b, pi);
            auto h2 = hnf_basis(b * kappa, pi);
            CHECK(h1.agrees_with(h2));
            CHECK(hnf_basis(h1, pi).agrees_with(h1));
        }
    }
}

TEST_CASE("K membership", "[lattice]") {
    auto cfg = PrimeConfig::make(5);
    CHECK(in_K(Mat<PAdicNumber>::identity(3, PAdicNumber::zero(cfg))));
    CHECK_FALSE(in_K(mat_of(cfg, {{5, 0}, {0, 1}})));
    CHECK(in_K(mat_of(cfg, {{1, 1}, {0, 1}})));
    CHECK_FALSE(in_K(mat_of(cfg, {{1, 0}, {0, 5}})));
    auto frac = mat_of(cfg, {{1, 0}, {0, 1}});
    frac.at(0, 1) = PAdicNumber::from_rational(cfg, 1, 5);
    CHECK_FALSE(in_K(frac));
}

TEST_CASE("lattice orthogonalization worked examples", "[lattice]") {
    auto cfg = PrimeConfig::make(5);
    const auto form = Mat<PAdicNumber>::identity(2, PAdicNumber::zero(cfg));
    const auto pi = PAdicNumber::from_int(cfg, 5);

    // standard lattice stays put
    const auto id = Mat<PAdicNumber>::identity(2, PAdicNumber::zero(cfg));
    CHECK(orthogonalize_lattice(form, id).agrees_with(id));

    // lattice spanned by (1,1),(0,5): Gram becomes diag(2, 25/2)
    auto basis = mat_of(cfg, {{1, 0}, {1, 5}});
    auto ortho = orthogonalize_lattice(form, basis);
    const auto gram = ortho.transpose() * form * ortho;
    CHECK(gram.at(0, 0).agrees_with(PAdicNumber::from_int(cfg, 2)));
    CHECK(gram.at(1, 1).agrees_with(PAdicNumber::from_rational(cfg, 25, 2)));
    CHECK_FALSE(gram.at(0, 1).is_regular());
    CHECK(hnf_basis(ortho, pi).agrees_with(hnf_basis(basis, pi)));

    // null form returns the input unchanged
    const auto zero_form = Mat<PAdicNumber>(2, 2, PAdicNumber::zero(cfg));
    CHECK(orthogonalize_lattice(zero_form, basis).agrees_with(basis));
}

TEST_CASE("orthogonalization keeps the lattice and diagonalizes the Gram", "[lattice]") {
    Rng rng(777);
    int done = 0;
    for (int trial = 0; done < 400; ++trial) {
        const long long ps[] = {3, 5, 7, 13};
        auto cfg = PrimeConfig::make(ps[trial % 4]);
        const auto pi = PAdicNumber::from_int(cfg, cfg.p);
        Rng tr = rng.split(static_cast<std::uint64_t>(trial));
        const int n = 2 + static_cast<int>(tr.below(3));
        auto form = random_symmetric(cfg, tr, n, true);
        auto basis = random_invertible(cfg, tr, n, -2, 2);
        Mat<PAdicNumber> ortho(n, n, PAdicNumber::zero(cfg));
        try {
            ortho = orthogonalize_lattice(form, basis);
        } catch (const PrecisionError&) {
            continue;  // degenerate-to-precision draw
        }
        INFO("p=" << cfg.p << " n=" << n);
        CHECK(gram_is_diagonal(form, ortho));
        CHECK(hnf_basis(ortho, pi).agrees_with(hnf_basis(basis, pi)));
        ++done;
    }
}

TEST_CASE("ek factorization", "[lattice]") {
    auto cfg = PrimeConfig::make(5);
    // diagonal g factors through itself up to column normalization
    auto d = mat_of(cfg, {{5, 0}, {0, 1}});
    auto fac = ek_factor(d);
    CHECK(in_K(fac.kappa));
    CHECK((fac.e * fac.kappa).agrees_with(d));

    auto g = mat_of(cfg, {{1, 1}, {0, 1}});
    auto f2 = ek_factor(g);
    const auto form = Mat<PAdicNumber>::identity(2, PAdicNumber::zero(cfg));
    CHECK(gram_is_diagonal(form, f2.e));
    CHECK(in_K(f2.kappa));
    CHECK((f2.e * f2.kappa).agrees_with(g));
}

TEST_CASE("ek factorization on random elements", "[lattice]") {
    Rng rng(90210);
    for (long long p : {3LL, 5LL, 7LL, 13LL}) {
        auto cfg = PrimeConfig::make(p);
        const auto form_proto = PAdicNumber::zero(cfg);
        for (int trial = 0; trial < 60; ++trial) {
            Rng tr = rng.split(static_cast<std::uint64_t>(1000 * p + trial));
            const int n = 2 + static_cast<int>(tr.below(3));
            auto g = random_invertible(cfg, tr, n, -3, 3);
            auto fac = ek_factor(g);
            const auto form = Mat<PAdicNumber>::identity(n, form_proto);
            INFO("p=" << p << " n=" << n);
            CHECK(gram_is_diagonal(form, fac.e));
            CHECK(in_K(fac.kappa));
            CHECK((fac.e * fac.kappa).agrees_with(g));
        }
    }
}

TEST_CASE("congruence diagonalization", "[lattice]") {
    auto cfg = PrimeConfig::make(5);
    // already diagonal input is untouched
    auto m0 = mat_of(cfg, {{5, 0}, {0, 3}});
    auto c0 = diagonalize(m0);
    CHECK(c0.d.agrees_with(m0));
    CHECK(c0.c.agrees_with(Mat<PAdicNumber>::identity(2, PAdicNumber::zero(cfg))));

    // hyperbolic plane: pivot e1+e2 gives diag(2, -1/2)
    auto h = mat_of(cfg, {{0, 1}, {1, 0}});
    auto ch = diagonalize(h);
    CHECK(ch.d.at(0, 0).agrees_with(PAdicNumber::from_int(cfg, 2)));
    CHECK(ch.d.at(1, 1).agrees_with(PAdicNumber::from_rational(cfg, -1, 2)));
    CHECK((ch.c.transpose() * h * ch.c).agrees_with(ch.d));

    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        Rng tr = rng.split(static_cast<std::uint64_t>(trial));
        const int n = 2 + static_cast<int>(tr.below(3));
        auto m = random_symmetric(cfg, tr, n, false);
        try {
            auto c = diagonalize(m);
            CHECK((c.c.transpose() * m * c.c).agrees_with(c.d));
            c.c.inverse();  // invertibility
        } catch (const PrecisionError&) {
            // rank-deficient draws may be undecidable at finite precision
        }
    }
}

TEST_CASE("smith form over the valuation ring", "[lattice]") {
    auto cfg = PrimeConfig::make(3);
    const auto pi = PAdicNumber::from_int(cfg, 3);
    Rng rng(66);
    for (int trial = 0; trial < 100; ++trial) {
        Rng tr = rng.split(static_cast<std::uint64_t>(trial));
        auto a = random_invertible(cfg, tr, 2, -2, 2);
        auto s = smith2(a, pi);
        CHECK(s.d[0] <= s.d[1]);
        CHECK(in_K(s.left));
        CHECK(in_K(s.right));
        Mat<PAdicNumber> diag(2, 2, PAdicNumber::zero(cfg));
        diag.at(0, 0) = uniformizer_power(pi, s.d[0]);
        diag.at(1, 1) = uniformizer_power(pi, s.d[1]);
        CHECK((s.left * diag * s.right).agrees_with(a));
    }
}

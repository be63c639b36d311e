#include <catch2/catch.hpp>

#include <set>
#include <vector>

#include "symspace/galois.hpp"
#include "symspace/rng.hpp"

using namespace symspace;

namespace {

ExtElement random_unit(const QuadExt& ext, Rng& rng) {
    while (true) {
        auto x = ExtElement::from_parts(
            ext, PAdicNumber::from_int(ext.base, rng.range(-40, 40)),
            PAdicNumber::from_int(ext.base, rng.range(-40, 40)));
        if (x.is_regular()) return x;
    }
}

Mat<ExtElement> random_monomial(const QuadExt& ext, int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    Mat<ExtElement> m(n, n, ExtElement::zero(ext));
    for (int j = 0; j < n; ++j) m.at(perm[static_cast<std::size_t>(j)], j) = random_unit(ext, rng);
    return m;
}

Mat<ExtElement> random_invertible_ext(const QuadExt& ext, Rng& rng, int n) {
    while (true) {
        Mat<ExtElement> g(n, n, ExtElement::zero(ext));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g.at(i, j) = random_unit(ext, rng);
        try {
            if (g.determinant().is_regular()) return g;
        } catch (const PrecisionError&) {
        }
    }
}

/// Independent count of involution classes in S_n by exhaustive enumeration.
int involution_class_count(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::set<int> two_cycle_counts;
    do {
        bool involution = true;
        for (int i = 0; i < n && involution; ++i)
            involution = perm[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] == i;
        if (!involution) continue;
        int c = 0;
        for (int i = 0; i < n; ++i)
            if (perm[static_cast<std::size_t>(i)] > i) ++c;
        two_cycle_counts.insert(c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<int>(two_cycle_counts.size());
}

} // namespace

TEST_CASE("sigma is an involutive automorphism", "[galois]") {
    auto cfg = PrimeConfig::make(5);
    for (auto delta : {SquareClass::Xi, SquareClass::Pi, SquareClass::XiPi}) {
        auto ext = QuadExt::make(cfg, delta);
        // rational matrices are fixed
        auto r = ext_identity(ext, 2);
        r.at(0, 1) = ExtElement::from_int(ext, 7);
        CHECK(sigma_matrix(r).agrees_with(r));
        // sqrt(delta) * id is negated
        auto sd = ext_identity(ext, 2).scaled(ExtElement::sqrt_delta(ext));
        CHECK(sigma_matrix(sd).agrees_with(-sd));
        Rng rng(19 + static_cast<std::uint64_t>(delta));
        for (int trial = 0; trial < 20; ++trial) {
            auto m = random_invertible_ext(ext, rng, 2);
            auto n = random_invertible_ext(ext, rng, 2);
            CHECK(sigma_matrix(sigma_matrix(m)).agrees_with(m));
            CHECK(sigma_matrix(m * n).agrees_with(sigma_matrix(m) * sigma_matrix(n)));
        }
    }
}

TEST_CASE("cocycle recognition", "[galois]") {
    auto cfg = PrimeConfig::make(5);
    auto ext = QuadExt::make(cfg, SquareClass::Xi);
    CHECK(is_cocycle(ext_identity(ext, 3)));
    CHECK(is_cocycle(tau_involution(ext, 2, 1)));
    // diag(c, 1) with c = (1+sd)/(1-sd): c sigma(c) = 1
    auto one = ExtElement::from_int(ext, 1);
    auto sd = ExtElement::sqrt_delta(ext);
    auto c = (one + sd) / (one - sd);
    auto m = ext_identity(ext, 2);
    m.at(0, 0) = c;
    CHECK(is_cocycle(m));
    // a non-norm-one diagonal is not a cocycle
    auto bad = ext_identity(ext, 2);
    bad.at(0, 0) = ExtElement::from_int(ext, 7);
    CHECK_FALSE(is_cocycle(bad));
    auto dense = ext_identity(ext, 2);
    dense.at(0, 1) = ExtElement::from_int(ext, 1);
    CHECK_THROWS_AS(is_cocycle(dense), DomainError);  // not monomial
}

TEST_CASE("cocycle classes count involutions", "[galois]") {
    auto cfg = PrimeConfig::make(5);
    auto ext = QuadExt::make(cfg, SquareClass::Pi);
    CHECK(cocycle_class_of(ext_identity(ext, 4)) == 0);
    CHECK(cocycle_class_of(tau_involution(ext, 4, 1)) == 1);
    CHECK(cocycle_class_of(tau_involution(ext, 4, 2)) == 2);
    // class is invariant under twisting by a monomial matrix
    Rng rng(123);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 2 + 1)));
        auto nu = random_monomial(ext, n, rng);
        auto w = nu.inverse() * tau_involution(ext, n, i) * sigma_matrix(nu);
        REQUIRE(is_cocycle(w));
        CHECK(cocycle_class_of(w) == i);
    }
    // the count of classes for n = 1..8 is floor(n/2)+1, by enumeration
    for (int n = 1; n <= 8; ++n) CHECK(involution_class_count(n) == n / 2 + 1);

    // a monomial matrix whose permutation has order 3 is rejected
    auto cycle = Mat<ExtElement>(3, 3, ExtElement::zero(ext));
    cycle.at(1, 0) = ExtElement::from_int(ext, 1);
    cycle.at(2, 1) = ExtElement::from_int(ext, 1);
    cycle.at(0, 2) = ExtElement::from_int(ext, 1);
    CHECK_THROWS_WITH(cocycle_class_of(cycle), Catch::Contains("order > 2"));
}

TEST_CASE("u witnesses satisfy the defining relation", "[galois]") {
    for (long long p : {3LL, 5LL}) {
        auto cfg = PrimeConfig::make(p);
        for (auto delta : {SquareClass::Xi, SquareClass::Pi, SquareClass::XiPi}) {
            auto ext = QuadExt::make(cfg, delta);
            for (int n = 1; n <= 8; ++n)
                for (int i = 0; i <= n / 2; ++i) {
                    auto u = u_witness(ext, n, i);
                    auto rel = u.inverse() * sigma_matrix(u);
                    INFO("p=" << p << " delta=" << class_name(delta) << " n=" << n << " i=" << i);
                    CHECK(rel.agrees_with(tau_involution(ext, n, i)));
                }
        }
    }
    // the worked 2x2 case at delta = 2, p = 5
    auto cfg = PrimeConfig::make(5);
    auto ext = QuadExt::make(cfg, SquareClass::Xi);
    auto u = u_witness(ext, 2, 1);
    CHECK(u.at(0, 0).agrees_with(ExtElement::sqrt_delta(ext)));
    CHECK(u.at(0, 1).agrees_with(-ExtElement::sqrt_delta(ext)));
    CHECK(u.at(1, 0).agrees_with(ExtElement::from_int(ext, 1)));
    CHECK(u.at(1, 1).agrees_with(ExtElement::from_int(ext, 1)));
    // det u = 2 sqrt(delta)
    CHECK(u.determinant().agrees_with(ExtElement::sqrt_delta(ext) * ExtElement::from_int(ext, 2)));
    CHECK(u_witness(ext, 3, 0).agrees_with(ext_identity(ext, 3)));
}

TEST_CASE("coboundary solver", "[galois]") {
    auto cfg = PrimeConfig::make(5);
    auto ext = QuadExt::make(cfg, SquareClass::Pi);
    // identity cocycle: every diagonal entry of nu is 1 + sigma(1) = 2
    auto nu0 = solve_coboundary(ext, ext_identity(ext, 3), 0);
    CHECK(nu0.agrees_with(ext_identity(ext, 3).scaled(ExtElement::from_int(ext, 2))));

    // c = diag(-1) in rank one needs the sqrt(delta) branch
    auto minus = ext_identity(ext, 1).scaled(ExtElement::from_int(ext, -1));
    auto nu1 = solve_coboundary(ext, minus, 0);
    CHECK(nu1.at(0, 0).agrees_with(ExtElement::sqrt_delta(ext)));
    auto back = nu1.inverse() * sigma_matrix(nu1);
    CHECK(back.agrees_with(minus));

    CHECK_THROWS_WITH(solve_coboundary(ext, tau_involution(ext, 2, 1), 0),
                      Catch::Contains("class mismatch"));

    // round trips over random cocycles, all classes, both extension kinds
    for (auto delta : {SquareClass::Xi, SquareClass::Pi, SquareClass::XiPi}) {
        auto e2 = QuadExt::make(cfg, delta);
        Rng rng(7777 + static_cast<std::uint64_t>(delta));
        for (int trial = 0; trial < 40; ++trial) {
            const int n = 1 + static_cast<int>(rng.below(6));
            const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 2 + 1)));
            auto nu_r = random_monomial(e2, n, rng);
            auto c = nu_r.inverse() * tau_involution(e2, n, i) * sigma_matrix(nu_r);
            REQUIRE(is_cocycle(c));
            auto nu = solve_coboundary(e2, c, i);
            auto lhs = nu.inverse() * tau_involution(e2, n, i) * sigma_matrix(nu);
            INFO("delta=" << class_name(delta) << " n=" << n << " i=" << i << " trial=" << trial);
            CHECK(lhs.agrees_with(c));
        }
    }
}

TEST_CASE("O membership", "[galois]") {
    auto cfg = PrimeConfig::make(5);
    auto ext = QuadExt::make(cfg, SquareClass::Pi);
    Rng rng(3111);
    // rational elements lie in O
    for (int trial = 0; trial < 10; ++trial) {
        Mat<ExtElement> g(2, 2, ExtElement::zero(ext));
        while (true) {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    g.at(i, j) = ExtElement::from_int(ext, rng.range(-20, 20));
            try {
                if (g.determinant().is_regular()) break;
            } catch (const PrecisionError&) {
            }
        }
        CHECK(in_O(g));
    }
    CHECK(in_O(u_witness(ext, 2, 1)));
    // h * u_i * z stays in O for rational h and diagonal z
    for (int trial = 0; trial < 10; ++trial) {
        Mat<ExtElement> h(2, 2, ExtElement::zero(ext));
        while (true) {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    h.at(i, j) = ExtElement::from_int(ext, rng.range(-20, 20));
            try {
                if (h.determinant().is_regular()) break;
            } catch (const PrecisionError&) {
            }
        }
        auto z = ext_identity(ext, 2);
        z.at(0, 0) = random_unit(ext, rng);
        z.at(1, 1) = random_unit(ext, rng);
        CHECK(in_O(h * u_witness(ext, 2, 1) * z));
    }
    // a generic dense element is not
    auto g = random_invertible_ext(ext, rng, 2);
    g.at(0, 0) = g.at(0, 0) + ExtElement::sqrt_delta(ext);
    // (may accidentally land in O; just exercise the call)
    (void)in_O(g);
}

TEST_CASE("search exhaustion is reported with the radius", "[galois]") {
    auto cfg = PrimeConfig::make(3);
    auto ext = QuadExt::make(cfg, SquareClass::Pi);
    auto g = ext_identity(ext, 2);
    g.at(0, 0) = ExtElement::from_int(ext, 3);
    try {
        factor_n2(ext, g, 0);
        FAIL("expected SearchError");
    } catch (const SearchError& e) {
        CHECK(e.radius_used == 0);
    }
}

TEST_CASE("rank-one factorization round trips", "[galois]") {
    for (long long p : {3LL, 5LL}) {
        auto cfg = PrimeConfig::make(p, 40 + kCertificationGuardDigits);
        for (auto delta : {SquareClass::Xi, SquareClass::Pi, SquareClass::XiPi}) {
            auto ext = QuadExt::make(cfg, delta);
            // rational g comes back with class 0
            auto g0 = ext_identity(ext, 2);
            g0.at(0, 1) = ExtElement::from_int(ext, 3);
            auto f0 = factor_n2(ext, g0);
            CHECK(f0.cls == 0);
            CHECK(verify_galois_factorization(ext, g0, f0, 35));

            // u-witness times diag(p, 1) moves the base vertex off the fixed
            // locus, so the factorization must recover class 1
            Mat<ExtElement> d = ext_identity(ext, 2);
            d.at(0, 0) = ExtElement::from_int(ext, cfg.p);
            auto g1 = u_witness(ext, 2, 1) * d;
            auto f1 = factor_n2(ext, g1);
            CHECK(f1.cls == 1);
            CHECK(verify_galois_factorization(ext, g1, f1, 35));

            Rng rng(0xFACE + static_cast<std::uint64_t>(100 * p) +
                    static_cast<std::uint64_t>(delta));
            for (int trial = 0; trial < 15; ++trial) {
                Rng tr = rng.split(static_cast<std::uint64_t>(trial));
                Mat<ExtElement> g(2, 2, ExtElement::zero(ext));
                while (true) {
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            auto re = PAdicNumber::from_int(cfg, tr.range(-60, 60)) *
                                      PAdicNumber::from_int(cfg, cfg.p).pow(tr.range(-1, 1));
                            auto im = PAdicNumber::from_int(cfg, tr.range(-60, 60)) *
                                      PAdicNumber::from_int(cfg, cfg.p).pow(tr.range(-1, 1));
                            g.at(i, j) = ExtElement::from_parts(ext, re, im);
                        }
                    try {
                        if (g.determinant().is_regular()) break;
                    } catch (const PrecisionError&) {
                    }
                }
                auto fac = factor_n2(ext, g);
                INFO("p=" << p << " delta=" << class_name(delta) << " trial=" << trial);
                CHECK(verify_galois_factorization(ext, g, fac, 35));
            }
        }
    }
}

#include <catch2/catch.hpp>

#include <vector>

#include "symspace/lattice.hpp"
#include "symspace/qform.hpp"
#include "symspace/rng.hpp"

#include "oracles.hpp"

using namespace symspace;

namespace {

DiagonalForm form_of(const PrimeConfig& cfg, std::vector<long long> cs) {
    std::vector<PAdicNumber> a;
    for (long long c : cs) a.push_back(PAdicNumber::from_int(cfg, c));
    return DiagonalForm(std::move(a));
}

long long class_value(const PrimeConfig& cfg, SquareClass c) {
    long long v = class_has_xi(c) ? cfg.xi : 1;
    if (class_has_pi(c)) v *= cfg.p;
    return v;
}

} // namespace

TEST_CASE("invariants of small forms", "[qform]") {
    auto cfg = PrimeConfig::make(5);
    auto inv11 = invariants(cfg, form_of(cfg, {1, 1}));
    CHECK(inv11.rank == 2);
    CHECK(inv11.disc == SquareClass::One);
    CHECK(inv11.hasse == 1);

    auto inv22 = invariants(cfg, form_of(cfg, {2, 2}));
    CHECK(inv22.disc == SquareClass::One);
    CHECK(inv22.hasse == 1);

    auto inv55 = invariants(cfg, form_of(cfg, {5, 5}));
    CHECK(inv55.disc == SquareClass::One);
    CHECK(inv55.hasse == 1);  // hilbert(5,5) = legendre(-1) = +1 since 5 = 1 mod 4

    // rank-1 forms have Hasse +1 by the empty-product convention
    CHECK(invariants(cfg, form_of(cfg, {10})).hasse == 1);
}

TEST_CASE("equivalence of forms", "[qform]") {
    auto cfg5 = PrimeConfig::make(5);
    CHECK(equivalent(cfg5, form_of(cfg5, {2, 2}), form_of(cfg5, {1, 1})));
    auto cfg7 = PrimeConfig::make(7);
    // <pi,pi> vs <1,1>: hilbert(7,7) = legendre(-1,7) = -1
    CHECK_FALSE(equivalent(cfg7, form_of(cfg7, {7, 7}), form_of(cfg7, {1, 1})));
    // reflexivity on random diagonal forms
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<long long> cs;
        for (int i = 0; i < 3; ++i) cs.push_back(1 + static_cast<long long>(rng.below(100)));
        auto f = form_of(cfg5, cs);
        CHECK(equivalent(cfg5, f, f));
    }
}

TEST_CASE("isotropy by rank", "[qform]") {
    auto cfg5 = PrimeConfig::make(5);
    auto cfg7 = PrimeConfig::make(7);
    CHECK(is_isotropic(cfg5, form_of(cfg5, {1, -1})));
    CHECK(is_isotropic(cfg5, form_of(cfg5, {1, 1, -5})));
    CHECK_FALSE(is_isotropic(cfg7, form_of(cfg7, {1, 1})));
    CHECK_FALSE(is_isotropic(cfg5, form_of(cfg5, {7})));
    // rank >= 5 is always isotropic
    CHECK(is_isotropic(cfg7, form_of(cfg7, {1, 1, 1, 1, 1})));
}

TEST_CASE("isotropy and representability match the counting oracle", "[qform]") {
    for (long long p : {3LL, 5LL, 7LL}) {
        auto cfg = PrimeConfig::make(p);
        std::vector<long long> reps;
        for (unsigned i = 0; i < 4; ++i)
            reps.push_back(class_value(cfg, static_cast<SquareClass>(i)));
        // all rank <= 3 forms with square-class coefficients
        for (int rank = 1; rank <= 3; ++rank) {
            std::vector<int> idx(static_cast<std::size_t>(rank), 0);
            while (true) {
                std::vector<long long> cs;
                for (int i : idx) cs.push_back(reps[static_cast<std::size_t>(i)]);
                auto f = form_of(cfg, cs);
                CHECK(is_isotropic(cfg, f) == oracles::isotropic(cs, p));
                for (long long c : reps) {
                    INFO("p=" << p << " rank=" << rank << " c=" << c);
                    CHECK(represents(cfg, f, PAdicNumber::from_int(cfg, c)) ==
                          oracles::represents(cs, c, p));
                }
                int k = rank - 1;
                while (k >= 0 && idx[static_cast<std::size_t>(k)] == 3) --k;
                if (k < 0) break;
                ++idx[static_cast<std::size_t>(k)];
                for (int j = k + 1; j < rank; ++j) idx[static_cast<std::size_t>(j)] = 0;
            }
        }
    }
}

TEST_CASE("representation statements from the p mod 4 dichotomy", "[qform]") {
    auto cfg5 = PrimeConfig::make(5);
    CHECK(represents(cfg5, form_of(cfg5, {1, 1}), PAdicNumber::from_int(cfg5, 5)));
    auto cfg7 = PrimeConfig::make(7);
    CHECK_FALSE(represents(cfg7, form_of(cfg7, {1, 1}), PAdicNumber::from_int(cfg7, 7)));
    // any form represents its first coefficient
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<long long> cs;
        for (int i = 0; i < 2 + static_cast<int>(rng.below(2)); ++i)
            cs.push_back(1 + static_cast<long long>(rng.below(200)));
        auto f = form_of(cfg5, cs);
        CHECK(represents(cfg5, f, f.coeffs[0]));
    }
}

TEST_CASE("representation witnesses", "[qform]") {
    auto cfg5 = PrimeConfig::make(5);
    auto w = represent_witness(cfg5, form_of(cfg5, {1, 1}), PAdicNumber::from_int(cfg5, 5));
    REQUIRE(w.size() == 2);
    CHECK(w[0].agrees_with(PAdicNumber::from_int(cfg5, 1)));
    CHECK(w[1].agrees_with(PAdicNumber::from_int(cfg5, 2)));

    auto w9 = represent_witness(cfg5, form_of(cfg5, {1}), PAdicNumber::from_int(cfg5, 9));
    CHECK((w9[0] * w9[0]).agrees_with(PAdicNumber::from_int(cfg5, 9)));

    auto cfg3 = PrimeConfig::make(3);
    auto f3 = form_of(cfg3, {1, 1, 1});
    auto c2 = PAdicNumber::from_int(cfg3, 2);
    auto w3 = represent_witness(cfg3, f3, c2);
    CHECK(evaluate(f3, w3).agrees_with(c2));

    CHECK_THROWS_AS(
        represent_witness(cfg3, form_of(cfg3, {1, 1}), PAdicNumber::from_int(cfg3, 3)),
        DomainError);
}

TEST_CASE("witnesses evaluate back over the class grid", "[qform]") {
    for (long long p : {3LL, 5LL, 7LL}) {
        auto cfg = PrimeConfig::make(p);
        std::vector<long long> reps;
        for (unsigned i = 0; i < 4; ++i)
            reps.push_back(class_value(cfg, static_cast<SquareClass>(i)));
        for (long long a : reps)
            for (long long b : reps)
                for (long long c : reps) {
                    auto f = form_of(cfg, {a, b});
                    auto cv = PAdicNumber::from_int(cfg, c);
                    if (!represents(cfg, f, cv)) continue;
                    auto w = represent_witness(cfg, f, cv);
                    INFO("p=" << p << " f=<" << a << "," << b << "> c=" << c);
                    CHECK(evaluate(f, w).agrees_with(cv));
                }
    }
}

TEST_CASE("image criterion", "[qform]") {
    auto cfg5 = PrimeConfig::make(5);
    auto cfg7 = PrimeConfig::make(7);
    CHECK(in_image_iota(cfg5, form_of(cfg5, {1, 1})));
    CHECK(in_image_iota(cfg5, form_of(cfg5, {5, 5})));
    CHECK_FALSE(in_image_iota(cfg7, form_of(cfg7, {7, 7})));
    CHECK_FALSE(in_image_iota(cfg5, form_of(cfg5, {1, 2})));
    CHECK_FALSE(in_image_iota(cfg7, form_of(cfg7, {1, 3})));
}

TEST_CASE("realizable class tuples reproduce the p mod 4 cases", "[qform]") {
    using S = SquareClass;
    for (long long p : {5LL, 13LL}) {
        auto cfg = PrimeConfig::make(p);
        auto j = j_representatives(2, cfg);
        REQUIRE(j.size() == 4);
        CHECK(j[0] == std::vector<S>{S::One, S::One});
        CHECK(j[1] == std::vector<S>{S::Xi, S::Xi});
        CHECK(j[2] == std::vector<S>{S::Pi, S::Pi});
        CHECK(j[3] == std::vector<S>{S::XiPi, S::XiPi});
    }
    for (long long p : {3LL, 7LL}) {
        auto cfg = PrimeConfig::make(p);
        auto j = j_representatives(2, cfg);
        REQUIRE(j.size() == 2);
        CHECK(j[0] == std::vector<S>{S::One, S::One});
        CHECK(j[1] == std::vector<S>{S::Xi, S::Xi});
    }
    auto cfg = PrimeConfig::make(5);
    auto j1 = j_representatives(1, cfg);
    REQUIRE(j1.size() == 1);
    CHECK(j1[0] == std::vector<S>{S::One});
}

TEST_CASE("invariants are complete under congruence transforms", "[qform]") {
    // random invertible C applied to a diagonal form, re-diagonalized, keeps
    // the invariants
    Rng rng(31337);
    int done = 0;
    for (int trial = 0; done < 500; ++trial) {
        const long long ps[] = {3, 5, 7, 13};
        auto cfg = PrimeConfig::make(ps[trial % 4]);
        Rng tr = rng.split(static_cast<std::uint64_t>(trial));
        const int n = 2 + static_cast<int>(tr.below(2));
        std::vector<long long> cs;
        for (int i = 0; i < n; ++i) {
            long long u = 1 + static_cast<long long>(
                                  tr.below(static_cast<std::uint64_t>(cfg.p * cfg.p - 1)));
            if (u % cfg.p == 0) u += 1;
            cs.push_back(u * (tr.below(2) ? cfg.p : 1));
        }
        auto f = form_of(cfg, cs);
        Mat<PAdicNumber> m(n, n, PAdicNumber::zero(cfg));
        for (int i = 0; i < n; ++i) m.at(i, i) = f.coeffs[static_cast<std::size_t>(i)];
        // random congruence transform with entries of valuation >= -1
        Mat<PAdicNumber> c(n, n, PAdicNumber::zero(cfg));
        while (true) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    c.at(i, j) = PAdicNumber::from_rational(
                        cfg, static_cast<long long>(tr.below(50)) - 25,
                        tr.below(4) == 0 ? cfg.p : 1);
            try {
                c.inverse();
                break;
            } catch (const DomainError&) {
            } catch (const PrecisionError&) {
            }
        }
        const auto transformed = c.transpose() * m * c;
        std::vector<PAdicNumber> diag;
        try {
            auto cong = diagonalize(transformed);
            for (int i = 0; i < n; ++i) diag.push_back(cong.d.at(i, i));
        } catch (const PrecisionError&) {
            continue;  // degenerate draw
        }
        auto g = DiagonalForm(std::move(diag));
        CHECK(invariants(cfg, f) == invariants(cfg, g));
        ++done;
    }
}

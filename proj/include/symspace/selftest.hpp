#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "symspace/galois.hpp"
#include "symspace/orthsym.hpp"
#include "symspace/qform.hpp"
#include "symspace/rng.hpp"
#include "symspace/tree.hpp"

namespace symspace::selftest {

// ---------------------------------------------------------------------------
// Acceptance suite: one runner per criterion, seeded and reproducible.
// Heavy harnesses run trials concurrently; each trial derives its own rng
// stream from the trial index, so results do not depend on scheduling.
// ---------------------------------------------------------------------------

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;  // 0: no stated budget
};

struct SuiteConfig {
    std::uint64_t seed = 20260808;
    int cartan_trials = 1000;      // per (n, p) pair
    int biinv_trials = 1000;       // total
    int lattice_trials = 1000;     // total
    int galois_trials = 500;       // per (p, extension) pair
    int coboundary_trials = 500;   // per (n, class) pair
    int threads = 0;               // 0: hardware concurrency

    static SuiteConfig smoke(std::uint64_t seed, int trials) {
        SuiteConfig c;
        c.seed = seed;
        c.cartan_trials = std::min(c.cartan_trials, trials);
        c.biinv_trials = std::min(c.biinv_trials, trials);
        c.lattice_trials = std::min(c.lattice_trials, trials);
        c.galois_trials = std::min(c.galois_trials, trials);
        c.coboundary_trials = std::min(c.coboundary_trials, trials);
        return c;
    }
};

namespace detail {

/// Deterministic parallel harness: trial i derives stream split(i); failures
/// are counted and the first failure message is kept.
template <class Fn>
std::pair<int, std::string> run_trials(int total, int threads, Fn&& trial) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, 8));
    std::atomic<int> next{0};
    std::atomic<int> failures{0};
    std::mutex msg_mutex;
    std::string first_message;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= total) break;
            std::string message;
            bool ok = false;
            try {
                ok = trial(i, message);
            } catch (const std::exception& e) {
                message = e.what();
            }
            if (!ok) {
                failures.fetch_add(1);
                std::lock_guard<std::mutex> lock(msg_mutex);
                if (first_message.empty())
                    first_message = "trial " + std::to_string(i) +
                                    (message.empty() ? "" : ": " + message);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return {failures.load(), first_message};
}

template <class Body>
CriterionResult timed(int id, const std::string& name, double budget, Body&& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    r.budget_seconds = budget;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
        r.pass = false;
        r.detail += " (over the " + std::to_string(static_cast<int>(r.budget_seconds)) +
                    " s budget)";
    }
    return r;
}

inline Mat<PAdicNumber> random_invertible(const PrimeConfig& cfg, Rng& rng, int n,
                                          long long vmin, long long vmax) {
    while (true) {
        Mat<PAdicNumber> g(n, n, PAdicNumber::zero(cfg));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long long u = 1 + static_cast<long long>(
                                      rng.below(static_cast<std::uint64_t>(cfg.p * cfg.p - 1)));
                while (u % cfg.p == 0) ++u;
                g.at(i, j) = PAdicNumber::from_int(cfg, u) *
                             PAdicNumber::from_int(cfg, cfg.p).pow(rng.range(vmin, vmax));
            }
        try {
            if (g.determinant().is_regular()) return g;
        } catch (const PrecisionError&) {
        }
    }
}

inline Mat<PAdicNumber> random_in_K(const PrimeConfig& cfg, Rng& rng, int n) {
    while (true) {
        Mat<PAdicNumber> g(n, n, PAdicNumber::zero(cfg));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g.at(i, j) = PAdicNumber::from_int(
                    cfg, static_cast<long long>(
                             rng.below(static_cast<std::uint64_t>(cfg.p * cfg.p * cfg.p))));
        try {
            if (in_K(g)) return g;
        } catch (const PrecisionError&) {
        }
    }
}

inline Mat<ExtElement> random_invertible_ext(const QuadExt& ext, Rng& rng) {
    while (true) {
        Mat<ExtElement> g(2, 2, ExtElement::zero(ext));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                auto re = PAdicNumber::from_int(ext.base, rng.range(-60, 60)) *
                          PAdicNumber::from_int(ext.base, ext.base.p).pow(rng.range(-1, 1));
                auto im = PAdicNumber::from_int(ext.base, rng.range(-60, 60)) *
                          PAdicNumber::from_int(ext.base, ext.base.p).pow(rng.range(-1, 1));
                g.at(i, j) = ExtElement::from_parts(ext, re, im);
            }
        try {
            if (g.determinant().is_regular()) return g;
        } catch (const PrecisionError&) {
        }
    }
}

inline ExtElement random_ext_unit(const QuadExt& ext, Rng& rng) {
    while (true) {
        auto x = ExtElement::from_parts(ext, PAdicNumber::from_int(ext.base, rng.range(-40, 40)),
                                        PAdicNumber::from_int(ext.base, rng.range(-40, 40)));
        if (x.is_regular()) return x;
    }
}

inline Mat<ExtElement> random_monomial(const QuadExt& ext, int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    Mat<ExtElement> m(n, n, ExtElement::zero(ext));
    for (int j = 0; j < n; ++j)
        m.at(perm[static_cast<std::size_t>(j)], j) = random_ext_unit(ext, rng);
    return m;
}

// --- acceptance-side solubility oracle (independent of the hilbert formula)

inline bool hilbert_soluble_oracle(long long a, long long b, long long p) {
    const long long m = p * p * p;
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
            const bool primitive_xy = (x % p != 0) || (y % p != 0);
            if (primitive_xy ? sq_any[static_cast<std::size_t>(lhs)]
                             : sq_unit[static_cast<std::size_t>(lhs)])
                return true;
        }
    return false;
}

inline long long class_value(const PrimeConfig& cfg, SquareClass c) {
    long long v = class_has_xi(c) ? cfg.xi : 1;
    if (class_has_pi(c)) v *= cfg.p;
    return v;
}

} // namespace detail

// --- criterion 1: the J sets of realizable rank-2 classes -----------------

inline CriterionResult criterion_j_sets(const SuiteConfig&) {
    return detail::timed(1, "J-set reproduction (n=2 realizable classes)", 1.0, [&](CriterionResult& r) {
        using S = SquareClass;
        const std::vector<std::vector<S>> four = {
            {S::One, S::One}, {S::Xi, S::Xi}, {S::Pi, S::Pi}, {S::XiPi, S::XiPi}};
        const std::vector<std::vector<S>> two = {{S::One, S::One}, {S::Xi, S::Xi}};
        bool ok = true;
        for (long long p : {5LL, 13LL})
            ok = ok && (j_representatives(2, PrimeConfig::make(p)) == four);
        for (long long p : {3LL, 7LL})
            ok = ok && (j_representatives(2, PrimeConfig::make(p)) == two);
        r.pass = ok;
        r.detail = ok ? "4 classes at p=5,13; 2 classes at p=3,7" : "class list mismatch";
    });
}

// --- criterion 2: cocycle class count and the u_i relations ---------------

inline CriterionResult criterion_galois_classes(const SuiteConfig&) {
    return detail::timed(2, "Galois class count and witness relations", 1.0, [&](CriterionResult& r) {
        bool ok = true;
        // involution classes in S_n, by exhaustive enumeration
        for (int n = 1; n <= 8 && ok; ++n) {
            std::vector<int> perm(static_cast<std::size_t>(n));
            std::iota(perm.begin(), perm.end(), 0);
            std::vector<bool> seen_count(static_cast<std::size_t>(n / 2 + 2), false);
            int classes = 0;
            do {
                bool involution = true;
                for (int i = 0; i < n && involution; ++i)
                    involution =
                        perm[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] == i;
                if (!involution) continue;
                int c = 0;
                for (int i = 0; i < n; ++i)
                    if (perm[static_cast<std::size_t>(i)] > i) ++c;
                if (!seen_count[static_cast<std::size_t>(c)]) {
                    seen_count[static_cast<std::size_t>(c)] = true;
                    ++classes;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            ok = ok && classes == n / 2 + 1;
        }
        // u_i^-1 sigma(u_i) = tau_i in all tracked digits
        for (long long p : {3LL, 5LL})
            for (auto delta : {SquareClass::Xi, SquareClass::Pi, SquareClass::XiPi})
                for (int n = 1; n <= 8 && ok; ++n)
                    for (int i = 0; i <= n / 2 && ok; ++i) {
                        const auto ext = QuadExt::make(PrimeConfig::make(p), delta);
                        const auto u = u_witness(ext, n, i);
                        ok = (u.inverse() * sigma_matrix(u)).agrees_with(tau_involution(ext, n, i));
                    }
        r.pass = ok;
        r.detail = ok ? "classes = floor(n/2)+1 for n=1..8; all witness relations exact"
                      : "count or witness relation failed";
    });
}

// --- criterion 3: Cartan round trip ----------------------------------------

inline CriterionResult criterion_cartan_round_trip(const SuiteConfig& cfg) {
    return detail::timed(3, "Cartan factorization round trip", 60.0, [&](CriterionResult& r) {
        const std::vector<int> ns = {2, 3, 4};
        const std::vector<long long> ps = {3, 5, 7, 13};
        const int per_pair = cfg.cartan_trials;
        const int total = per_pair * static_cast<int>(ns.size() * ps.size());
        Rng root(cfg.seed ^ 0xC347A2ULL);
        auto [failures, message] = detail::run_trials(total, cfg.threads, [&](int t, std::string& msg) {
            const int pair = t / per_pair;
            const int n = ns[static_cast<std::size_t>(pair) % ns.size()];
            const long long p = ps[static_cast<std::size_t>(pair) / ns.size()];
            // 40 significant digits requested, guard digits for honest
            // certification of the 35 = 40 - 5 digit tolerance
            const auto pc = PrimeConfig::make(p, 40 + kCertificationGuardDigits);
            Rng rng = root.split(static_cast<std::uint64_t>(t));
            const auto g = detail::random_invertible(pc, rng, n, -3, 3);
            const auto fac = cartan_factor(pc, g);
            if (!verify_factorization(pc, g, fac, 35)) {
                msg = "verification failed at p=" + std::to_string(p) + " n=" + std::to_string(n);
                return false;
            }
            return true;
        });
        r.pass = failures == 0;
        r.detail = std::to_string(total - failures) + "/" + std::to_string(total) +
                   " recompositions verified at 35 digits" +
                   (failures ? "; first failure: " + message : "");
    });
}

// --- criterion 4: classifier bi-invariance ---------------------------------

inline CriterionResult criterion_bi_invariance(const SuiteConfig& cfg) {
    return detail::timed(4, "Classifier bi-invariance", 0.0, [&](CriterionResult& r) {
        const std::vector<int> ns = {2, 3, 4};
        const std::vector<long long> ps = {3, 5, 7, 13};
        Rng root(cfg.seed ^ 0xB1171ULL);
        const int total = cfg.biinv_trials;
        auto [failures, message] = detail::run_trials(total, cfg.threads, [&](int t, std::string& msg) {
            const int n = ns[static_cast<std::size_t>(t) % ns.size()];
            const long long p = ps[(static_cast<std::size_t>(t) / ns.size()) % ps.size()];
            const auto pc = PrimeConfig::make(p, 40 + kCertificationGuardDigits);
            Rng rng = root.split(static_cast<std::uint64_t>(t));
            const auto g = detail::random_invertible(pc, rng, n, -2, 2);
            const auto h = random_orthogonal(pc, n, rng);
            const auto kappa = detail::random_in_K(pc, rng, n);
            if (classify(pc, h * g * kappa) != classify(pc, g)) {
                msg = "label moved at p=" + std::to_string(p) + " n=" + std::to_string(n);
                return false;
            }
            return true;
        });
        r.pass = failures == 0;
        r.detail = std::to_string(total - failures) + "/" + std::to_string(total) +
                   " twisted classifications stable" +
                   (failures ? "; first failure: " + message : "");
    });
}

// --- criterion 5: Hilbert symbol vs oracle; orthogonalization law ----------

inline CriterionResult criterion_hilbert_and_lattice(const SuiteConfig& cfg) {
    return detail::timed(5, "Hilbert symbol oracle and lattice orthogonalization", 0.0, [&](CriterionResult& r) {
        bool grid_ok = true;
        for (long long p : {3LL, 5LL, 7LL}) {
            const auto pc = PrimeConfig::make(p);
            for (unsigned i = 0; i < 4 && grid_ok; ++i)
                for (unsigned j = 0; j < 4 && grid_ok; ++j) {
                    const long long a = detail::class_value(pc, static_cast<SquareClass>(i));
                    const long long b = detail::class_value(pc, static_cast<SquareClass>(j));
                    const int formula = hilbert(pc, PAdicNumber::from_int(pc, a),
                                                PAdicNumber::from_int(pc, b));
                    grid_ok = (formula == 1) == detail::hilbert_soluble_oracle(a, b, p);
                }
        }
        const std::vector<long long> ps = {3, 5, 7, 13};
        Rng root(cfg.seed ^ 0x0137CEULL);
        const int total = cfg.lattice_trials;
        auto [failures, message] = detail::run_trials(total, cfg.threads, [&](int t, std::string& msg) {
            const long long p = ps[static_cast<std::size_t>(t) % ps.size()];
            const auto pc = PrimeConfig::make(p, 40 + kCertificationGuardDigits);
            Rng rng = root.split(static_cast<std::uint64_t>(t));
            const int n = 2 + static_cast<int>(rng.below(3));
            // symmetric form, sometimes degenerate, sometimes identically zero
            Mat<PAdicNumber> form(n, n, PAdicNumber::zero(pc));
            const int flavor = static_cast<int>(rng.below(10));
            if (flavor > 0) {
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        PAdicNumber x = PAdicNumber::from_int(pc, rng.range(-30, 30));
                        if (flavor <= 2 && rng.below(2)) x = PAdicNumber::zero(pc);
                        form.at(i, j) = x;
                        form.at(j, i) = x;
                    }
            }
            const auto basis = detail::random_invertible(pc, rng, n, -2, 2);
            Mat<PAdicNumber> ortho(n, n, PAdicNumber::zero(pc));
            try {
                ortho = orthogonalize_lattice(form, basis);
            } catch (const PrecisionError&) {
                return true;  // degenerate-to-precision draws are excluded
            }
            const auto gram = ortho.transpose() * form * ortho;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && gram.at(i, j).is_regular()) {
                        msg = "gram not diagonal";
                        return false;
                    }
            const auto pi = PAdicNumber::from_int(pc, p);
            if (!hnf_basis(ortho, pi).agrees_with(hnf_basis(basis, pi))) {
                msg = "lattice changed";
                return false;
            }
            return true;
        });
        r.pass = grid_ok && failures == 0;
        r.detail = std::string(grid_ok ? "4x4 grid matches the solubility oracle at p=3,5,7"
                                       : "grid mismatch") +
                   "; " + std::to_string(total - failures) + "/" + std::to_string(total) +
                   " orthogonalizations kept the lattice with diagonal Gram" +
                   (failures ? "; first failure: " + message : "");
    });
}

// --- criterion 6: Galois factorization round trip ---------------------------

inline CriterionResult criterion_galois_round_trip(const SuiteConfig& cfg) {
    return detail::timed(6, "Galois factorization round trip", 60.0, [&](CriterionResult& r) {
        const std::vector<long long> ps = {3, 5};
        const std::vector<SquareClass> deltas = {SquareClass::Xi, SquareClass::Pi,
                                                 SquareClass::XiPi};
        const int per_pair = cfg.galois_trials;
        const int total = per_pair * static_cast<int>(ps.size() * deltas.size());
        Rng root(cfg.seed ^ 0x6A101FULL);
        auto [failures, message] = detail::run_trials(total, cfg.threads, [&](int t, std::string& msg) {
            const int pair = t / per_pair;
            const long long p = ps[static_cast<std::size_t>(pair) % ps.size()];
            const SquareClass delta = deltas[static_cast<std::size_t>(pair) / ps.size()];
            const auto ext = QuadExt::make(PrimeConfig::make(p, 40 + kCertificationGuardDigits), delta);
            Rng rng = root.split(static_cast<std::uint64_t>(t));
            const auto g = detail::random_invertible_ext(ext, rng);
            const auto fac = factor_n2(ext, g);
            if (!verify_galois_factorization(ext, g, fac, 35)) {
                msg = "verification failed at p=" + std::to_string(p) + " delta=" +
                      class_name(delta);
                return false;
            }
            return true;
        });
        r.pass = failures == 0;
        r.detail = std::to_string(total - failures) + "/" + std::to_string(total) +
                   " factorizations recomposed, h rational, kappa integral" +
                   (failures ? "; first failure: " + message : "");
    });
}

// --- criterion 7: tree census ------------------------------------------------

inline CriterionResult criterion_tree_census(const SuiteConfig&) {
    return detail::timed(7, "Ramified tree census", 0.0, [&](CriterionResult& r) {
        const auto report =
            fixed_point_census(QuadExt::make(PrimeConfig::make(3), SquareClass::Pi), 4);
        bool ok = report.neighbor_counts_ok && report.dichotomy_ok && report.parity_matches_type;
        ok = ok && report.type_a > 0 && report.type_b > 0;
        for (const auto& row : report.rows) {
            if (row.neighbor_count != 4) ok = false;
            if (row.type == 'A' && row.fixed_neighbor_count != 4) ok = false;
            if (row.type == 'B' && row.fixed_neighbor_count != 2) ok = false;
        }
        r.pass = ok;
        r.detail = "q+1 = 4 everywhere; " + std::to_string(report.type_a) + " type-A and " +
                   std::to_string(report.type_b) + " type-B fixed vertices in radius 4 (" +
                   std::to_string(report.vertex_count) + " vertices swept)";
    });
}

// --- criterion 8: stable apartments at desk scale ----------------------------

inline CriterionResult criterion_stable_apartments(const SuiteConfig&) {
    return detail::timed(8, "Stable apartment search succeeds in the radius-4 ball", 0.0, [&](CriterionResult& r) {
        std::size_t checked = 0;
        bool ok = true;
        for (long long p : {3LL, 5LL}) {
            const auto pc = PrimeConfig::make(p);
            // transpose involution over the base tree
            {
                const auto tf = tree_field(pc);
                std::unordered_set<std::string> seen;
                std::deque<std::pair<TreeVertex<PAdicNumber>, int>> queue;
                const auto base = base_vertex(tf);
                seen.insert(base.key);
                queue.emplace_back(base, 0);
                while (!queue.empty() && ok) {
                    auto [v, depth] = queue.front();
                    queue.pop_front();
                    ++checked;
                    const auto found = find_sigma_stable_apartment(pc, tf, v, 4);
                    ok = found && apartment_contains(tf, *found, v) &&
                         is_sigma_stable(*found, SigmaKind::TransposeInverse);
                    if (depth < 4)
                        for (const auto& w : neighbors(tf, v))
                            if (seen.insert(w.key).second) queue.emplace_back(w, depth + 1);
                }
            }
            // Galois involution over both ramified flavors
            for (auto delta : {SquareClass::Pi, SquareClass::XiPi}) {
                if (!ok) break;
                const auto ext = QuadExt::make(pc, delta);
                const auto tf = tree_field(ext);
                std::unordered_set<std::string> seen;
                std::deque<std::pair<TreeVertex<ExtElement>, int>> queue;
                const auto base = base_vertex(tf);
                seen.insert(base.key);
                queue.emplace_back(base, 0);
                while (!queue.empty() && ok) {
                    auto [v, depth] = queue.front();
                    queue.pop_front();
                    ++checked;
                    const auto found = find_sigma_stable_apartment(ext, tf, v, 4);
                    ok = found && apartment_contains(tf, *found, v) &&
                         is_sigma_stable(*found, SigmaKind::Galois);
                    if (depth < 4)
                        for (const auto& w : neighbors(tf, v))
                            if (seen.insert(w.key).second) queue.emplace_back(w, depth + 1);
                }
            }
        }
        r.pass = ok;
        r.detail = "stable apartment found through all " + std::to_string(checked) +
                   " vertices (radius 4, both involutions, p = 3 and 5)";
    });
}

// --- criterion 9: the ramified counterexample and the split contrast ---------

inline CriterionResult criterion_counterexample(const SuiteConfig&) {
    return detail::timed(9, "Ramified counterexample and split contrast", 0.0, [&](CriterionResult& r) {
        const auto ext = QuadExt::make(PrimeConfig::make(3), SquareClass::Pi);
        const auto tf = tree_field(ext);
        const auto base_report = counterexample_check(ext, 3, base_vertex(tf));
        bool ok = base_report.all_pointwise_fixed && !base_report.apartments.empty();
        // a type-B vertex admits a stable but not pointwise-fixed apartment
        Mat<ExtElement> odd_basis = ext_identity(ext, 2);
        odd_basis.at(0, 0) = ExtElement::sqrt_delta(ext);
        const auto odd_report =
            counterexample_check(ext, 3, make_vertex(tf, odd_basis));
        ok = ok && !odd_report.all_pointwise_fixed;
        // split contrast: swapped-line apartments through every sampled vertex
        const auto split3 = split_contrast_check(PrimeConfig::make(3), 2);
        const auto split5 = split_contrast_check(PrimeConfig::make(5), 2);
        ok = ok && split3.all_found_swapped && split5.all_found_swapped;
        r.pass = ok;
        r.detail = std::to_string(base_report.apartments.size()) +
                   " stable apartments through the base vertex, all pointwise fixed; "
                   "type-B vertex has a swapped one; split case: " +
                   std::to_string(split3.vertices_checked + split5.vertices_checked) +
                   " vertices all admit swapped-line apartments";
    });
}

// --- criterion 10: coboundary solver ------------------------------------------

inline CriterionResult criterion_coboundary(const SuiteConfig& cfg) {
    return detail::timed(10, "Coboundary solver round trip", 0.0, [&](CriterionResult& r) {
        // (n, i) pairs for n <= 6
        std::vector<std::pair<int, int>> pairs;
        for (int n = 1; n <= 6; ++n)
            for (int i = 0; i <= n / 2; ++i) pairs.emplace_back(n, i);
        const int per_pair = cfg.coboundary_trials;
        const int total = per_pair * static_cast<int>(pairs.size());
        Rng root(cfg.seed ^ 0xC0B0D1ULL);
        const std::vector<SquareClass> deltas = {SquareClass::Xi, SquareClass::Pi,
                                                 SquareClass::XiPi};
        auto [failures, message] = detail::run_trials(total, cfg.threads, [&](int t, std::string& msg) {
            const auto [n, i] = pairs[static_cast<std::size_t>(t / per_pair)];
            Rng rng = root.split(static_cast<std::uint64_t>(t));
            const long long p = rng.below(2) ? 5 : 3;
            const SquareClass delta = deltas[rng.below(3)];
            const auto ext = QuadExt::make(PrimeConfig::make(p), delta);
            const auto nu0 = detail::random_monomial(ext, n, rng);
            const auto c = nu0.inverse() * tau_involution(ext, n, i) * sigma_matrix(nu0);
            const auto nu = solve_coboundary(ext, c, i);
            const auto lhs = nu.inverse() * tau_involution(ext, n, i) * sigma_matrix(nu);
            if (!lhs.agrees_with(c)) {
                msg = "defining equation failed at n=" + std::to_string(n) +
                      " i=" + std::to_string(i);
                return false;
            }
            return true;
        });
        r.pass = failures == 0;
        r.detail = std::to_string(total - failures) + "/" + std::to_string(total) +
                   " cocycles trivialized across all classes with n <= 6" +
                   (failures ? "; first failure: " + message : "");
    });
}

inline std::vector<CriterionResult> run_all(const SuiteConfig& cfg) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_j_sets(cfg));
    out.push_back(criterion_galois_classes(cfg));
    out.push_back(criterion_cartan_round_trip(cfg));
    out.push_back(criterion_bi_invariance(cfg));
    out.push_back(criterion_hilbert_and_lattice(cfg));
    out.push_back(criterion_galois_round_trip(cfg));
    out.push_back(criterion_tree_census(cfg));
    out.push_back(criterion_stable_apartments(cfg));
    out.push_back(criterion_counterexample(cfg));
    out.push_back(criterion_coboundary(cfg));
    return out;
}

} // namespace symspace::selftest

#pragma once

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symspace/galois.hpp"
#include "symspace/orthsym.hpp"
#include "symspace/selftest.hpp"
#include "symspace/tree.hpp"

namespace symspace::cli {

using Json = nlohmann::ordered_json;

// Exit codes: 0 ok, 2 input error, 3 precision exhaustion, 4 search
// exhaustion, 5 selftest failure.
enum ExitCode { kOk = 0, kInputError = 2, kPrecisionError = 3, kSearchError = 4, kSelftestFailure = 5 };

// Guard digits added to the requested precision during computation, so that
// results can be certified at (precision - 5) significant digits.
constexpr int kGuardDigits = kCertificationGuardDigits;

struct ParsedRational {
    long long num = 0;
    long long den = 1;
};

inline ParsedRational parse_rational(const std::string& s) {
    if (s.empty()) throw DomainError("empty rational literal");
    std::size_t pos = 0;
    const long long num = std::stoll(s, &pos);
    if (pos == s.size()) return {num, 1};
    if (s[pos] != '/') throw DomainError("bad rational literal '" + s + "'");
    std::size_t pos2 = 0;
    const long long den = std::stoll(s.substr(pos + 1), &pos2);
    if (pos + 1 + pos2 != s.size() || den == 0)
        throw DomainError("bad rational literal '" + s + "'");
    return {num, den};
}

/// Entry literal over k': "a", "a+b sd", "a-b sd", "b sd" with a, b exact
/// rationals and "sd" (or the UTF-8 square-root sign) denoting sqrt(delta).
struct ParsedEntry {
    ParsedRational re;
    ParsedRational im;
};

inline ParsedEntry parse_entry(std::string s) {
    // normalize: strip spaces and '*', translate the unicode spelling
    std::string t;
    for (std::size_t i = 0; i < s.size();) {
        if (s.compare(i, 3, "√") == 0) {  // sqrt sign
            t += "sd";
            i += 3;
            // optional delta sign右after
            if (s.compare(i, 2, "δ") == 0) i += 2;
            continue;
        }
        if (s[i] == ' ' || s[i] == '*') {
            ++i;
            continue;
        }
        t += s[i++];
    }
    ParsedEntry out;
    const std::size_t sd = t.find("sd");
    if (sd == std::string::npos) {
        out.re = parse_rational(t);
        return out;
    }
    if (sd + 2 != t.size()) throw DomainError("bad entry literal '" + s + "'");
    std::string imag = t.substr(0, sd);
    std::string real;
    // split the imaginary coefficient off at the last +/- that is not part
    // of a leading sign or an exponent-free rational
    std::size_t split = std::string::npos;
    for (std::size_t i = imag.size(); i-- > 1;) {
        if ((imag[i] == '+' || imag[i] == '-') && imag[i - 1] != '/' && imag[i - 1] != '+' &&
            imag[i - 1] != '-') {
            split = i;
            break;
        }
    }
    if (split != std::string::npos) {
        real = imag.substr(0, split);
        imag = imag.substr(split);
    }
    if (imag.empty() || imag == "+") imag = "1";
    if (imag == "-") imag = "-1";
    out.im = parse_rational(imag);
    if (!real.empty()) out.re = parse_rational(real);
    return out;
}

inline std::vector<std::vector<ParsedEntry>> parse_matrix_literal(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("matrix literal is not valid JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw DomainError("matrix literal must be a JSON array of rows");
    std::vector<std::vector<ParsedEntry>> rows;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != j.size())
            throw DomainError("matrix literal must be square");
        std::vector<ParsedEntry> out;
        for (const auto& cell : row) {
            if (cell.is_number_integer())
                out.push_back(ParsedEntry{{cell.get<long long>(), 1}, {0, 1}});
            else if (cell.is_string())
                out.push_back(parse_entry(cell.get<std::string>()));
            else
                throw DomainError("matrix entries must be strings or integers");
        }
        rows.push_back(std::move(out));
    }
    return rows;
}

inline Mat<PAdicNumber> matrix_over_base(const PrimeConfig& cfg,
                                         const std::vector<std::vector<ParsedEntry>>& rows) {
    const int n = static_cast<int>(rows.size());
    Mat<PAdicNumber> m(n, n, PAdicNumber::zero(cfg));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const ParsedEntry& e = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (e.im.num != 0)
                throw DomainError("sqrt(delta) entries need --extension");
            m.at(i, j) = PAdicNumber::from_rational(cfg, e.re.num, e.re.den);
        }
    return m;
}

inline Mat<ExtElement> matrix_over_ext(const QuadExt& ext,
                                       const std::vector<std::vector<ParsedEntry>>& rows) {
    const int n = static_cast<int>(rows.size());
    Mat<ExtElement> m(n, n, ExtElement::zero(ext));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const ParsedEntry& e = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            m.at(i, j) = ExtElement::from_parts(
                ext, PAdicNumber::from_rational(ext.base, e.re.num, e.re.den),
                PAdicNumber::from_rational(ext.base, e.im.num, e.im.den));
        }
    return m;
}

inline std::string emit_value(const PAdicNumber& x, int precision) {
    if (x.is_zero()) return "0";
    if (x.is_zero_mod()) return x.to_string();
    return x.truncated(x.valuation() + precision).to_string();
}

inline std::string emit_value(const ExtElement& x, int precision) {
    return emit_value(x.re(), precision) + " + (" + emit_value(x.im(), precision) + ")*sd";
}

template <class F>
Json emit_matrix(const Mat<F>& m, int precision) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(emit_value(m.at(i, j), precision));
        rows.push_back(row);
    }
    return rows;
}

inline Json emit_class(const CosetClass& cls) {
    Json out = Json::array();
    for (SquareClass c : cls) out.push_back(class_name(c));
    return out;
}

inline std::optional<SquareClass> extension_of(const std::string& name) {
    if (name == "none" || name.empty()) return std::nullopt;
    if (name == "unramified") return SquareClass::Xi;
    if (name == "ramified-pi") return SquareClass::Pi;
    if (name == "ramified-xipi") return SquareClass::XiPi;
    throw DomainError("unknown extension '" + name + "'");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct Options {
    long long p = 5;
    int precision = 40;
    std::string extension = "none";
    int n = 2;
    std::uint64_t seed = 20260808;
    int trials = 0;
    int radius = 4;
    std::string matrix;
    bool list_j = false;
    bool normalize = false;
    std::string tree_mode;
};

inline int cmd_factor_orth(const Options& opt, std::ostream& out) {
    const auto work = PrimeConfig::make(opt.p, opt.precision + kGuardDigits);
    const auto g = matrix_over_base(work, parse_matrix_literal(opt.matrix));
    try {
        g.inverse();
    } catch (const DomainError&) {
        throw DomainError("matrix is not invertible");
    } catch (const PrecisionError&) {
        // exact rational input whose determinant vanishes through the whole
        // guarded window: singular for every practical purpose
        throw DomainError("matrix is not invertible (determinant vanishes to tracked precision)");
    }
    CartanFactorization fac = cartan_factor(work, g);
    if (opt.normalize) fac = anti_dominant_normalize(work, fac);
    const bool verified = verify_factorization(work, g, fac, opt.precision - 5);
    if (!verified)
        throw PrecisionError("factorization could not be verified at the requested precision");
    Json j;
    j["command"] = "factor-orth";
    j["p"] = opt.p;
    j["precision"] = opt.precision;
    j["n"] = g.rows();
    j["class"] = emit_class(fac.cls);
    j["class_provenance"] = "sorted Jordan label of the Gram form tr(g)g";
    j["h"] = emit_matrix(fac.h, opt.precision);
    j["y"] = emit_matrix(fac.y, opt.precision);
    j["s"] = emit_matrix(fac.s, opt.precision);
    j["kappa"] = emit_matrix(fac.kappa, opt.precision);
    Json vals = Json::array();
    for (long long v : valuation_vector(fac)) vals.push_back(v);
    j["s_valuations"] = vals;
    j["verified"] = true;
    out << j.dump(2) << "\n";
    return kOk;
}

inline int cmd_classify(const Options& opt, std::ostream& out) {
    const auto cfg = PrimeConfig::make(opt.p, opt.precision + kGuardDigits);
    Json j;
    j["command"] = "classify";
    j["p"] = opt.p;
    if (opt.list_j) {
        j["n"] = opt.n;
        Json tuples = Json::array();
        for (const auto& cls : j_representatives(opt.n, cfg)) tuples.push_back(emit_class(cls));
        j["realizable_classes"] = tuples;
        out << j.dump(2) << "\n";
        return kOk;
    }
    const auto g = matrix_over_base(cfg, parse_matrix_literal(opt.matrix));
    try {
        g.inverse();
    } catch (const DomainError&) {
        throw DomainError("matrix is not invertible");
    } catch (const PrecisionError&) {
        throw DomainError("matrix is not invertible (determinant vanishes to tracked precision)");
    }
    const auto cls = classify(cfg, g);
    j["n"] = g.rows();
    j["class"] = emit_class(cls);
    // discriminant and Hasse invariant of tr(g) g
    const auto gram = g.transpose() * g;
    const auto cong = diagonalize(gram);
    std::vector<PAdicNumber> diag;
    for (int i = 0; i < g.rows(); ++i) diag.push_back(cong.d.at(i, i));
    const auto inv = invariants(cfg, DiagonalForm(std::move(diag)));
    j["gram_disc"] = class_name(inv.disc);
    j["gram_hasse"] = inv.hasse;
    out << j.dump(2) << "\n";
    return kOk;
}

inline int cmd_factor_galois(const Options& opt, std::ostream& out) {
    const auto delta = extension_of(opt.extension);
    if (!delta) throw DomainError("factor-galois requires --extension");
    const auto ext =
        QuadExt::make(PrimeConfig::make(opt.p, opt.precision + kGuardDigits), *delta);
    const auto g = matrix_over_ext(ext, parse_matrix_literal(opt.matrix));
    if (g.rows() != 2) throw DomainError("factor-galois handles n = 2 only");
    const GaloisFactorization fac = factor_n2(ext, g, opt.radius);
    const bool verified = verify_galois_factorization(ext, g, fac, opt.precision - 5);
    if (!verified)
        throw PrecisionError("factorization could not be verified at the requested precision");
    Json j;
    j["command"] = "factor-galois";
    j["p"] = opt.p;
    j["extension"] = opt.extension;
    j["precision"] = opt.precision;
    j["i"] = fac.cls;
    j["h"] = emit_matrix(fac.h, opt.precision);
    j["u_i"] = emit_matrix(u_witness(ext, 2, fac.cls), opt.precision);
    j["z"] = emit_matrix(fac.z, opt.precision);
    j["kappa"] = emit_matrix(fac.kappa, opt.precision);
    j["radius_used"] = fac.radius_used;
    j["verified"] = true;
    out << j.dump(2) << "\n";
    return kOk;
}

inline int cmd_tree(const Options& opt, std::ostream& out) {
    Json j;
    j["command"] = "tree";
    j["mode"] = opt.tree_mode;
    j["p"] = opt.p;
    j["radius"] = opt.radius;
    const auto delta = extension_of(opt.extension);
    if (opt.tree_mode == "census") {
        if (!delta) throw DomainError("census requires a (ramified) --extension");
        const auto ext = QuadExt::make(PrimeConfig::make(opt.p, opt.precision), *delta);
        const auto report = fixed_point_census(ext, opt.radius);
        j["q"] = report.q;
        j["vertices_swept"] = report.vertex_count;
        j["type_a"] = report.type_a;
        j["type_b"] = report.type_b;
        j["neighbor_counts_ok"] = report.neighbor_counts_ok;
        j["parity_matches_type"] = report.parity_matches_type;
        j["dichotomy_ok"] = report.dichotomy_ok;
        Json rows = Json::array();
        for (const auto& row : report.rows) {
            Json r;
            r["vertex"] = row.vertex_key;
            r["depth"] = row.depth;
            r["sigma_fixed"] = row.sigma_fixed;
            r["neighbors"] = row.neighbor_count;
            r["fixed_neighbors"] = row.fixed_neighbor_count;
            r["type"] = std::string(1, row.type);
            rows.push_back(r);
        }
        j["rows"] = rows;
    } else if (opt.tree_mode == "raince") {
        std::size_t checked = 0;
        bool all_found = true;
        if (delta) {
            const auto ext = QuadExt::make(PrimeConfig::make(opt.p, opt.precision), *delta);
            const auto tf = tree_field(ext);
            std::unordered_set<std::string> seen;
            std::deque<std::pair<TreeVertex<ExtElement>, int>> queue;
            queue.emplace_back(base_vertex(tf), 0);
            seen.insert(queue.front().first.key);
            while (!queue.empty()) {
                auto [v, depth] = queue.front();
                queue.pop_front();
                ++checked;
                auto found = find_sigma_stable_apartment(ext, tf, v, opt.radius);
                if (!found || !apartment_contains(tf, *found, v)) all_found = false;
                if (depth < opt.radius)
                    for (const auto& w : neighbors(tf, v))
                        if (seen.insert(w.key).second) queue.emplace_back(w, depth + 1);
            }
        } else {
            const auto cfg = PrimeConfig::make(opt.p, opt.precision);
            const auto tf = tree_field(cfg);
            std::unordered_set<std::string> seen;
            std::deque<std::pair<TreeVertex<PAdicNumber>, int>> queue;
            queue.emplace_back(base_vertex(tf), 0);
            seen.insert(queue.front().first.key);
            while (!queue.empty()) {
                auto [v, depth] = queue.front();
                queue.pop_front();
                ++checked;
                auto found = find_sigma_stable_apartment(cfg, tf, v, opt.radius);
                if (!found || !apartment_contains(tf, *found, v)) all_found = false;
                if (depth < opt.radius)
                    for (const auto& w : neighbors(tf, v))
                        if (seen.insert(w.key).second) queue.emplace_back(w, depth + 1);
            }
        }
        j["involution"] = delta ? "galois" : "transpose-inverse";
        j["vertices_checked"] = checked;
        j["all_found"] = all_found;
        if (!all_found) {
            out << j.dump(2) << "\n";
            throw SearchError("stable apartment search exhausted", opt.radius);
        }
    } else if (opt.tree_mode == "counterexample") {
        if (!delta) throw DomainError("counterexample requires a (ramified) --extension");
        const auto ext = QuadExt::make(PrimeConfig::make(opt.p, opt.precision), *delta);
        if (!ext.ramified()) throw DomainError("counterexample requires a ramified extension");
        const auto tf = tree_field(ext);
        const auto report = counterexample_check(ext, opt.radius, base_vertex(tf));
        j["apartments_examined"] = report.apartments.size();
        j["all_pointwise_fixed"] = report.all_pointwise_fixed;
        Json rows = Json::array();
        for (const auto& a : report.apartments) {
            Json r;
            r["frame"] = a.description;
            r["pointwise_fixed"] = a.pointwise_fixed;
            rows.push_back(r);
        }
        j["apartments"] = rows;
        const auto split = split_contrast_check(PrimeConfig::make(opt.p, opt.precision),
                                                std::min(opt.radius, 3));
        j["split_contrast_vertices"] = split.vertices_checked;
        j["split_contrast_all_swapped"] = split.all_found_swapped;
    } else {
        throw DomainError("unknown tree mode '" + opt.tree_mode + "'");
    }
    out << j.dump(2) << "\n";
    return kOk;
}

inline int cmd_selftest(const Options& opt, std::ostream& out, std::ostream& err) {
    selftest::SuiteConfig cfg;
    cfg.seed = opt.seed;
    if (opt.trials > 0) cfg = selftest::SuiteConfig::smoke(opt.seed, opt.trials);
    const auto results = selftest::run_all(cfg);
    Json j;
    j["command"] = "selftest";
    j["seed"] = cfg.seed;
    Json rows = Json::array();
    int failures = 0;
    for (const auto& r : results) {
        Json row;
        row["criterion"] = r.id;
        row["name"] = r.name;
        row["pass"] = r.pass;
        row["detail"] = r.detail;
        rows.push_back(row);
        if (!r.pass) ++failures;
        err << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.seconds
            << "s): " << r.name << "\n";
    }
    j["results"] = rows;
    j["failures"] = failures;
    out << j.dump(2) << "\n";
    return failures == 0 ? kOk : kSelftestFailure;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"symspace: Cartan-type decompositions of p-adic symmetric spaces for GL_n"};
    app.require_subcommand(1);
    Options opt;
    if (const char* env = std::getenv("SYMSPACE_SEED")) opt.seed = std::strtoull(env, nullptr, 10);

    auto add_common = [&](CLI::App* sub, bool needs_matrix) {
        sub->add_option("--p", opt.p, "odd prime")->capture_default_str();
        sub->add_option("--precision", opt.precision, "tracked p-adic digits")
            ->capture_default_str();
        if (needs_matrix) sub->add_option("--g", opt.matrix, "matrix literal (JSON rows)");
    };

    auto* forth = app.add_subcommand("factor-orth", "factor g = h y s kappa over GL_n / O_n");
    add_common(forth, true);
    forth->add_flag("--normalize", opt.normalize, "sort s into anti-dominant order");

    auto* cls = app.add_subcommand("classify", "double-coset label of g (or list the J classes)");
    add_common(cls, true);
    cls->add_flag("--list-J", opt.list_j, "list realizable class tuples");
    cls->add_option("--n", opt.n, "rank for --list-J")->capture_default_str();

    auto* fgal = app.add_subcommand("factor-galois", "factor g = h u_i z kappa over GL_2(k')/GL_2(k)");
    add_common(fgal, true);
    fgal->add_option("--extension", opt.extension,
                     "none | unramified | ramified-pi | ramified-xipi");
    fgal->add_option("--radius", opt.radius, "apartment search radius")->capture_default_str();

    auto* tree = app.add_subcommand("tree", "census | raince | counterexample over the GL_2 tree");
    add_common(tree, false);
    tree->add_option("mode", opt.tree_mode, "census | raince | counterexample")->required();
    tree->add_option("--extension", opt.extension,
                     "none | unramified | ramified-pi | ramified-xipi");
    tree->add_option("--radius", opt.radius, "sweep radius")->capture_default_str();

    auto* self = app.add_subcommand("selftest", "run the acceptance suite");
    self->add_option("--seed", opt.seed, "rng seed (SYMSPACE_SEED fallback)")
        ->capture_default_str();
    self->add_option("--trials", opt.trials, "cap per-harness trial counts (smoke mode)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (opt.p < 3 || opt.p % 2 == 0) throw DomainError("p must be an odd prime");
        if (opt.precision < 4) throw DomainError("precision must be >= 4");
        if (opt.radius < 1) throw DomainError("radius must be >= 1");
        if (self->count("--trials") && opt.trials < 1)
            throw DomainError("trials must be >= 1");
        if (forth->parsed()) {
            if (opt.matrix.empty()) throw DomainError("factor-orth requires --g");
            return cmd_factor_orth(opt, out);
        }
        if (cls->parsed()) {
            if (!opt.list_j && opt.matrix.empty())
                throw DomainError("classify requires --g or --list-J");
            return cmd_classify(opt, out);
        }
        if (fgal->parsed()) {
            if (opt.matrix.empty()) throw DomainError("factor-galois requires --g");
            return cmd_factor_galois(opt, out);
        }
        if (tree->parsed()) return cmd_tree(opt, out);
        if (self->parsed()) return cmd_selftest(opt, out, err);
    } catch (const SearchError& e) {
        err << "error: " << e.what() << "\n";
        return kSearchError;
    } catch (const PrecisionError& e) {
        err << "error (precision): " << e.what() << "\n";
        return kPrecisionError;
    } catch (const DomainError& e) {
        err << "error (input): " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

} // namespace symspace::cli

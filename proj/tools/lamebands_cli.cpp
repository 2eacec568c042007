// Command-line surface for the lamebands library: sample potentials, compute
// and compare band edges, run the verification suites, and emit dispersion
// data. Exit codes: 0 success, 1 verification failure, 2 usage/parse error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lamebands/io.hpp"
#include "lamebands/lamebands.hpp"

namespace lb = lamebands;
using lb::Complex;
using lb::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct SpecOptions {
    std::string spec_path;
    std::string family;
    double a = 0.0, b = 0.0, m = 0.5, p = 2.0, beta = 0.4, shift = 0.0, translate = 0.0;
    bool has_b = false, has_beta = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--spec", spec_path, "path to a JSON potential spec");
        cmd->add_option("--family", family,
                        "base family when no spec file is given: lame, assoc_lame, "
                        "superposed_lame, superposed_assoc_lame, dsg");
        cmd->add_option("--a", a, "first strength parameter a");
        cmd->add_option("--b", b, "second strength parameter b")->each([this](std::string) { has_b = true; });
        cmd->add_option("--m", m, "elliptic modulus parameter");
        cmd->add_option("--p", p, "superposition order");
        cmd->add_option("--beta", beta, "PT offset")->each([this](std::string) { has_beta = true; });
        cmd->add_option("--shift", shift, "constant added to the potential");
        cmd->add_option("--translate", translate, "translation of the potential");
    }

    lb::PotentialSpec load() const {
        if (!spec_path.empty()) {
            std::ifstream in(spec_path);
            if (!in) throw std::invalid_argument("cannot open spec file: " + spec_path);
            std::stringstream ss;
            ss << in.rdbuf();
            return lb::spec_from_json_text(ss.str());
        }
        if (family.empty())
            throw std::invalid_argument("either --spec or --family is required");
        Json j;
        j["family"] = family;
        j["a"] = a;
        if (family == "assoc_lame" || family == "superposed_assoc_lame" || family == "dsg")
            j["b"] = b;
        if (family != "dsg") j["m"] = m;
        if (family == "superposed_lame" || family == "superposed_assoc_lame")
            j["p"] = int(p);
        j["shift"] = shift;
        j["translate"] = translate;
        lb::PotentialSpec s = lb::spec_from_json(j);
        if (has_beta) s = lb::spec::pt(std::move(s), beta);
        return s;
    }
};

struct OutputOptions {
    std::string format = "csv";
    std::string path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--format", format, "output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("-o,--out", path, "output file (default: stdout)");
    }

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(path);
            if (!out) throw std::invalid_argument("cannot open output file: " + path);
            out << text;
        }
    }
};

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out += header[i] + (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out += row[i] + (i + 1 < row.size() ? "," : "\n");
    return out;
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

int run_sample(const SpecOptions& so, const OutputOptions& oo, double x_min, double x_max, int n) {
    const auto s = so.load();
    const auto V = lb::make_evaluator(s);
    std::vector<std::vector<std::string>> rows;
    Json jrows = Json::array();
    for (int i = 0; i < n; ++i) {
        const double x = x_min + (x_max - x_min) * i / (n - 1);
        const Complex v = V(x);
        if (oo.format == "csv") {
            rows.push_back({lb::format_double(x), lb::format_double(v.real()),
                            lb::format_double(v.imag())});
        } else {
            jrows.push_back({{"x", x}, {"re_v", v.real()}, {"im_v", v.imag()}});
        }
    }
    if (oo.format == "csv")
        oo.write(to_csv({"x", "re_v", "im_v"}, rows));
    else
        oo.write(Json{{"spec", lb::spec_to_json(s)}, {"samples", jrows}}.dump(2) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// band edges
// ---------------------------------------------------------------------------

struct RangeGuess {
    double lo, hi;
};

RangeGuess edge_range(const lb::PotentialSpec& s, std::optional<double> e_min,
                      std::optional<double> e_max) {
    if (e_min && e_max) return {*e_min, *e_max};
    try {
        const auto edges = lb::analytic_band_edges(s);
        const double span = std::max(1.0, edges.back().energy - edges.front().energy);
        return {e_min.value_or(edges.front().energy - 0.05 * span),
                e_max.value_or(edges.back().energy + 0.05 * span)};
    } catch (const lb::CatalogMissError&) {
        throw std::invalid_argument(
            "numeric mode needs --e-min and --e-max for a family without a catalog");
    }
}

int run_band_edges(const SpecOptions& so, const OutputOptions& oo, const std::string& mode,
                   std::optional<double> e_min, std::optional<double> e_max,
                   lb::EdgeSearchOptions eopt, double compare_tol, const std::string& scan_csv) {
    const auto s = so.load();

    if (!scan_csv.empty()) {
        const auto range = edge_range(s, e_min, e_max);
        const auto scan =
            lb::discriminant_scan(s, range.lo, range.hi, eopt.scan_points, eopt.ode_tol);
        std::ofstream out(scan_csv);
        if (!out) throw std::invalid_argument("cannot open scan output file: " + scan_csv);
        out << lb::scan_to_csv(scan);
    }

    std::vector<lb::BandEdge> analytic;
    if (mode == "analytic" || mode == "both") {
        try {
            analytic = lb::analytic_band_edges(s);
        } catch (const lb::CatalogMissError& e) {
            std::cerr << "no closed-form catalog for this spec (" << e.what()
                      << "); rerun with --mode numeric\n";
            return kExitUsage;
        }
    }

    std::vector<lb::NumericBandEdge> numeric;
    if (mode == "numeric" || mode == "both") {
        const auto range = edge_range(s, e_min, e_max);
        eopt.with_nodes = true;
        numeric = lb::find_band_edges(s, range.lo, range.hi, eopt);
    }

    if (mode == "analytic") {
        if (oo.format == "json") {
            Json arr = Json::array();
            for (const auto& e : analytic) arr.push_back(lb::band_edge_to_json(e));
            oo.write(Json{{"spec", lb::spec_to_json(s)}, {"edges", arr}}.dump(2) + "\n");
        } else {
            std::vector<std::vector<std::string>> rows;
            for (const auto& e : analytic)
                rows.push_back({lb::format_double(e.energy), lb::format_double(e.raw_energy),
                                e.periodicity == lb::Periodicity::same_as_l ? "L" : "2L",
                                e.nodes ? std::to_string(*e.nodes) : "",
                                e.unusual ? "unusual" : ""});
            oo.write(to_csv({"energy", "raw_energy", "periodicity", "nodes", "flags"}, rows));
        }
        return kExitOk;
    }

    if (mode == "numeric") {
        if (oo.format == "json") {
            Json arr = Json::array();
            for (const auto& e : numeric) arr.push_back(lb::numeric_edge_to_json(e));
            oo.write(Json{{"spec", lb::spec_to_json(s)}, {"edges", arr}}.dump(2) + "\n");
        } else {
            std::vector<std::vector<std::string>> rows;
            for (const auto& e : numeric)
                rows.push_back({lb::format_double(e.energy),
                                e.edge_type == lb::EdgeType::periodic ? "periodic" : "antiperiodic",
                                e.degenerate ? "1" : "0", e.nodes ? std::to_string(*e.nodes) : "",
                                e.warning ? *e.warning : ""});
            oo.write(to_csv({"energy", "edge_type", "degenerate", "nodes", "warning"}, rows));
        }
        return kExitOk;
    }

    // both: side-by-side comparison, pass/fail per edge.
    std::vector<const lb::NumericBandEdge*> regular;
    for (const auto& e : numeric)
        if (!e.degenerate) regular.push_back(&e);
    const std::size_t n = std::min(analytic.size(), regular.size());
    bool all_ok = analytic.size() == regular.size();
    std::vector<std::vector<std::string>> rows;
    Json arr = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = std::abs(analytic[i].energy - regular[i]->energy);
        const bool ok = diff < compare_tol;
        all_ok = all_ok && ok;
        if (oo.format == "json") {
            arr.push_back({{"analytic", analytic[i].energy},
                           {"numeric", regular[i]->energy},
                           {"abs_diff", diff},
                           {"passed", ok}});
        } else {
            rows.push_back({std::to_string(i), lb::format_double(analytic[i].energy),
                            lb::format_double(regular[i]->energy), lb::format_double(diff),
                            ok ? "pass" : "fail"});
        }
    }
    if (oo.format == "json")
        oo.write(Json{{"spec", lb::spec_to_json(s)}, {"comparison", arr}, {"passed", all_ok}}.dump(2) +
                 "\n");
    else
        oo.write(to_csv({"index", "analytic", "numeric", "abs_diff", "verdict"}, rows));
    return all_ok ? kExitOk : kExitVerifyFailure;
}

// ---------------------------------------------------------------------------
// dispersion
// ---------------------------------------------------------------------------

int run_dispersion(const SpecOptions& so, const OutputOptions& oo, double e_min, double e_max, int n,
                   double ode_tol) {
    const auto s = so.load();
    const double L = lb::period(s);
    const auto V = lb::make_evaluator(s);

    // The PT-transformed a = 1 Lame potential also gets the closed-form
    // eta/theta/zeta momentum for comparison.
    bool analytic_branch = false;
    double m_inner = 0.0;
    if (const auto* f = std::get_if<lb::PtTransform>(&s.family)) {
        if (const auto* lam = std::get_if<lb::Lame>(&f->inner->family)) {
            if (std::abs(lam->a - 1.0) < 1e-12) {
                analytic_branch = true;
                m_inner = f->inner->m.m();
            }
        }
    }

    std::vector<std::string> header = {"e", "re_k", "im_k", "in_gap"};
    if (analytic_branch) {
        header.push_back("re_k_analytic");
        header.push_back("im_k_analytic");
    }
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < n; ++i) {
        const double E = e_min + (e_max - e_min) * i / (n - 1);
        const auto d = lb::dispersion(V, L, E, ode_tol);
        std::vector<std::string> row = {lb::format_double(E), lb::format_double(d.k.real()),
                                        lb::format_double(d.k.imag()), d.in_gap ? "1" : "0"};
        if (analytic_branch) {
            const Complex ka = lb::pt_lame1_analytic_k(lb::Modulus(m_inner), E);
            row.push_back(lb::format_double(ka.real()));
            row.push_back(lb::format_double(ka.imag()));
        }
        rows.push_back(std::move(row));
    }
    if (oo.format == "json") {
        Json arr = Json::array();
        for (const auto& r : rows) {
            Json jr;
            for (std::size_t c = 0; c < header.size(); ++c) jr[header[c]] = r[c];
            arr.push_back(jr);
        }
        oo.write(Json{{"spec", lb::spec_to_json(s)}, {"dispersion", arr}}.dump(2) + "\n");
    } else {
        oo.write(to_csv(header, rows));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyContext {
    std::vector<double> m_list;
    std::vector<int> a_list;
    double dsg_b = 1.0;
    double ode_tol = 1e-10;
    double tol = lb::kDefaultRelationTol;
    Json rows = Json::array();
    bool all_passed = true;

    void add(Json row) {
        all_passed = all_passed && row.value("passed", false);
        rows.push_back(std::move(row));
    }

    void add_report(const lb::RelationReport& r) { add(lb::relation_report_to_json(r)); }
};

std::vector<double> lame_raw_edges(int a, double m, double ode_tol) {
    if (a <= 2) {
        std::vector<double> out;
        for (const auto& e : lb::analytic_band_edges(lb::spec::lame(double(a), m)))
            out.push_back(e.raw_energy);
        return out;
    }
    lb::EdgeSearchOptions opt;
    opt.ode_tol = ode_tol;
    std::vector<double> out;
    for (const auto& e :
         lb::find_band_edges(lb::spec::lame(double(a), m), -0.5, a * (a + 1.0) + 8.0, opt))
        if (!e.degenerate) out.push_back(e.energy);
    return out;
}

std::vector<double> numeric_edges(const lb::PotentialSpec& s, double lo, double hi, double ode_tol,
                                  int scan_points = 400) {
    lb::EdgeSearchOptions opt;
    opt.ode_tol = ode_tol;
    opt.scan_points = scan_points;
    std::vector<double> out;
    for (const auto& e : lb::find_band_edges(s, lo, hi, opt))
        if (!e.degenerate) out.push_back(e.energy);
    return out;
}

void verify_duality(VerifyContext& ctx) {
    for (int a : ctx.a_list) {
        for (double m : ctx.m_list) {
            auto r = lb::check_duality(a, lb::Modulus(m), lame_raw_edges(a, m, ctx.ode_tol),
                                       lame_raw_edges(a, 1.0 - m, ctx.ode_tol), ctx.tol);
            ctx.add_report(r);
        }
    }
}

/// Floquet edges of a cataloged spec, each located near its predicted value
/// with the predicted periodicity class.
std::vector<double> refined_edges_from_catalog(const lb::PotentialSpec& s, double ode_tol) {
    const auto catalog = lb::analytic_band_edges(s);
    const auto V = lb::make_evaluator(s);
    const double L = lb::period(s);
    // Edges of narrow descended-modulus gaps are ill-conditioned roots
    // (|dDelta/dE| scales with the gap width), so the refinement runs the
    // integrator tighter than the scan default.
    const double tol = std::min(ode_tol, 1e-11);
    std::vector<double> out;
    out.reserve(catalog.size());
    for (const auto& e : catalog) {
        const auto type = e.periodicity == lb::Periodicity::same_as_l ? lb::EdgeType::periodic
                                                                      : lb::EdgeType::antiperiodic;
        out.push_back(lb::refine_edge_near(V, L, e.energy, type, tol));
    }
    return out;
}

void verify_landen(VerifyContext& ctx) {
    for (double m : ctx.m_list) {
        for (int p : {2, 3}) {
            const double a = 1.0;
            const auto ld = lb::landen_descent(lb::Modulus(m), p);
            const auto mapped = lb::map_superposed_spectrum(
                a, p, lb::Modulus(m), lame_raw_edges(1, ld.m_tilde, ctx.ode_tol));
            const auto direct =
                refined_edges_from_catalog(lb::spec::superposed_lame(a, p, m), ctx.ode_tol);
            lb::RelationReport r;
            r.id = lb::RelationId::superposed_5_9;
            r.tol = ctx.tol;
            r.inputs = {{"a", a}, {"p", double(p)}, {"m", m}};
            r.lhs = direct;
            r.rhs = mapped;
            r.max_abs_error = std::numeric_limits<double>::infinity();
            if (direct.size() == mapped.size()) {
                r.max_abs_error = 0.0;
                for (std::size_t i = 0; i < mapped.size(); ++i)
                    r.max_abs_error = std::max(r.max_abs_error, std::abs(direct[i] - mapped[i]));
            }
            r.passed = r.max_abs_error < r.tol;
            ctx.add_report(r);
        }
        for (int a : ctx.a_list) {
            if (a > 2) continue;
            const auto [m1, m2] = lb::al_duality_moduli(m);
            const auto e1 =
                refined_edges_from_catalog(lb::spec::assoc_lame(double(a), double(a), m1), ctx.ode_tol);
            const auto e2 =
                refined_edges_from_catalog(lb::spec::assoc_lame(double(a), double(a), m2), ctx.ode_tol);
            ctx.add_report(lb::check_al_duality(a, lb::Modulus(m), e1, e2, ctx.tol));
        }
    }
}

void verify_pt(VerifyContext& ctx) {
    for (int a : ctx.a_list) {
        if (a > 2) continue;
        for (double m : ctx.m_list) {
            std::vector<double> lame, lame_1m, pt;
            for (const auto& e : lb::analytic_band_edges(lb::spec::lame(double(a), m)))
                lame.push_back(e.raw_energy);
            for (const auto& e : lb::analytic_band_edges(lb::spec::lame(double(a), 1.0 - m)))
                lame_1m.push_back(e.raw_energy);
            for (const auto& e :
                 lb::analytic_band_edges(lb::spec::pt(lb::spec::lame(double(a), m), 0.4)))
                pt.push_back(e.raw_energy);
            ctx.add_report(lb::check_pt_relations(a, lb::Modulus(m), lame, pt, &lame_1m, ctx.tol));

            std::vector<double> samples;
            const double lo = pt.front() - 2.0, hi = pt.back() + 2.0;
            for (int i = 0; i < 20; ++i) {
                double e = lo + (hi - lo) * (i + 0.5) / 20.0;
                for (double edge : pt)
                    if (std::abs(e - edge) < 1e-3) e += 2.5e-3;
                samples.push_back(e);
            }
            ctx.add_report(
                lb::check_discriminant_relation(a, lb::Modulus(m), samples, 0.4, ctx.ode_tol, ctx.tol));
        }
    }
}

void verify_susy(VerifyContext& ctx) {
    for (double m : ctx.m_list) {
        const double delta = std::sqrt(1.0 - m + m * m);
        const auto v_minus = lb::spec::lame(2.0, m, -2.0 - 2.0 * m + 2.0 * delta);
        const auto v_plus = lb::spec::susy_partner(v_minus);
        const auto em = numeric_edges(v_minus, -0.3, 4.0 * delta + 0.5, ctx.ode_tol);
        const auto ep = numeric_edges(v_plus, -0.3, 4.0 * delta + 0.5, ctx.ode_tol);
        Json row;
        row["relation"] = "susy_isospectrality";
        row["inputs"] = {{"a", 2.0}, {"m", m}};
        double worst = std::numeric_limits<double>::infinity();
        if (em.size() == ep.size()) {
            worst = 0.0;
            for (std::size_t i = 0; i < em.size(); ++i)
                worst = std::max(worst, std::abs(em[i] - ep[i]));
        }
        row["max_abs_error"] = worst;
        row["tol"] = ctx.tol;
        row["passed"] = worst < ctx.tol;
        ctx.add(row);

        // Self-isospectrality verdicts with the expected outcomes.
        struct Case {
            const char* name;
            lb::PotentialSpec s;
            bool expect;
        };
        const Case cases[] = {
            {"lame_a1", lb::spec::lame(1.0, m, -m), true},
            {"lame_a2", v_minus, false},
            {"assoc_lame_62", lb::spec::assoc_lame(2.0, 1.0, m, -4.0 * m), true},
        };
        for (const auto& c : cases) {
            const auto pair = lb::build_susy_pair(c.s);
            const auto res =
                lb::self_isospectral_test(lb::make_complex_evaluator(c.s), pair.v_plus,
                                          pair.period_length);
            Json jrow;
            jrow["relation"] = std::string("self_isospectral_") + c.name;
            jrow["inputs"] = {{"m", m}};
            jrow["max_abs_error"] = res.max_deviation;
            jrow["best_shift"] = res.best_shift;
            jrow["is_self_isospectral"] = res.is_self_isospectral;
            jrow["passed"] = res.is_self_isospectral == c.expect;
            ctx.add(jrow);
        }
    }
}

void verify_dsg(VerifyContext& ctx) {
    for (int a : ctx.a_list) {
        const auto s = lb::spec::dsg(double(a), ctx.dsg_b);
        const auto bound = lb::gap_bound(s);
        lb::EdgeSearchOptions opt;
        opt.ode_tol = ctx.ode_tol;
        opt.scan_points = 1500;
        const auto edges = lb::find_band_edges(s, -10.0, 40.0, opt);
        std::vector<const lb::NumericBandEdge*> regular;
        for (const auto& e : edges)
            if (!e.degenerate) regular.push_back(&e);
        int periodic_gaps = 0, antiperiodic_gaps = 0;
        for (std::size_t i = 1; i + 1 < regular.size(); i += 2) {
            if (regular[i]->edge_type != regular[i + 1]->edge_type) continue;
            (regular[i]->edge_type == lb::EdgeType::periodic ? periodic_gaps : antiperiodic_gaps) += 1;
        }
        Json row;
        row["relation"] = "dsg_gap_bound";
        row["inputs"] = {{"a", double(a)}, {"b", ctx.dsg_b}};
        row["gaps_periodic_both_edges"] = periodic_gaps;
        row["gaps_antiperiodic_both_edges"] = antiperiodic_gaps;
        bool ok = true;
        if (bound.max_gaps_period_l) {
            // The analyzer's count includes the semi-infinite interval below
            // the ground edge; finite two-edge gaps stay below it.
            row["bound_periodic"] = *bound.max_gaps_period_l;
            ok = ok && periodic_gaps <= *bound.max_gaps_period_l;
        }
        if (bound.max_gaps_period_2l) {
            row["bound_antiperiodic"] = *bound.max_gaps_period_2l;
            ok = ok && antiperiodic_gaps <= *bound.max_gaps_period_2l;
        }
        row["passed"] = ok;
        ctx.add(row);

        // PT-invariant variant: the discriminant stays real, but level pairs
        // that leave the real axis show up as dips toward -+2 that recede
        // without touching. Those avoided contacts are detected and
        // reported; resolving the complex pairs themselves is out of scope.
        const auto pt = lb::spec::pt(lb::spec::dsg(double(a), ctx.dsg_b), 0.4);
        const auto V = lb::make_evaluator(pt);
        const double L = lb::period(pt);
        const auto scan = lb::discriminant_scan(V, L, -10.0, 40.0, 400, ctx.ode_tol);
        double max_im = 0.0;
        for (const auto& [e, d] : scan) max_im = std::max(max_im, std::abs(d.imag()));

        int real_contacts = 0, avoided = 0;
        double worst_avoidance = 0.0;
        for (double target : {2.0, -2.0}) {
            auto g = [&](double E) {
                return lb::monodromy(V, L, E, ctx.ode_tol).discriminant.real() - target;
            };
            for (std::size_t i = 1; i + 1 < scan.size(); ++i) {
                const double gl = scan[i - 1].second.real() - target;
                const double gm = scan[i].second.real() - target;
                const double gr = scan[i + 1].second.real() - target;
                if (gl * gm < 0.0 || gm * gr < 0.0) {
                    ++real_contacts;
                    continue;
                }
                if (!(std::abs(gm) <= std::abs(gl) && std::abs(gm) < std::abs(gr))) continue;
                if (std::abs(gm) > 1.0) continue;
                double lo = scan[i - 1].first, hi = scan[i + 1].first;
                double x = scan[i].first, v = std::abs(gm);
                for (double w = 0.5 * (hi - lo); w > 1e-8; w *= 0.5) {
                    for (int k = -2; k <= 2; ++k) {
                        const double xx = x + 0.5 * k * w;
                        const double vv = std::abs(g(xx));
                        if (vv < v) {
                            v = vv;
                            x = xx;
                        }
                    }
                }
                if (v < 1e-6) {
                    ++real_contacts;  // touching: a real doubly degenerate pair
                } else {
                    ++avoided;
                    worst_avoidance = std::max(worst_avoidance, v);
                }
            }
        }
        Json ptrow;
        ptrow["relation"] = "dsg_pt_symmetry";
        ptrow["inputs"] = {{"a", double(a)}, {"b", ctx.dsg_b}};
        ptrow["max_im_discriminant"] = max_im;
        ptrow["real_band_edge_contacts"] = real_contacts;
        ptrow["avoided_contacts"] = avoided;
        ptrow["max_avoidance"] = worst_avoidance;
        ptrow["note"] = avoided > 0
                            ? "avoided -+2 contacts detected: those level pairs sit off the real "
                              "axis (spontaneous PT breaking in the non-solvable sector)"
                            : "all sampled -+2 contacts are real";
        ptrow["passed"] = true;
        ctx.add(ptrow);
    }
}

int run_verify(const std::string& suite, VerifyContext& ctx, const OutputOptions& oo) {
    if (suite == "duality" || suite == "all") verify_duality(ctx);
    if (suite == "landen" || suite == "all") verify_landen(ctx);
    if (suite == "pt" || suite == "all") verify_pt(ctx);
    if (suite == "susy" || suite == "all") verify_susy(ctx);
    if (suite == "dsg" || suite == "all") verify_dsg(ctx);
    Json out;
    out["suite"] = suite;
    out["checks"] = ctx.rows;
    out["all_passed"] = ctx.all_passed;
    oo.write(out.dump(2) + "\n");
    return ctx.all_passed ? kExitOk : kExitVerifyFailure;
}

// ---------------------------------------------------------------------------
// hidden elliptic evaluation
// ---------------------------------------------------------------------------

int run_elliptic_eval(double m, double u_re, double u_im, const std::string& fn) {
    const lb::Modulus mod(m);
    const Complex u(u_re, u_im);
    Complex value;
    if (fn == "K") {
        value = mod.K();
    } else if (fn == "zeta") {
        value = lb::jacobi_zeta(u, mod);
    } else if (fn == "eta" || fn == "theta") {
        const auto [h, th] = lb::theta_eta(u, mod);
        value = (fn == "eta") ? h : th;
    } else {
        const auto t = (u_im == 0.0) ? lb::jacobi(u_re, mod) : lb::jacobi_complex(u, mod);
        if (fn == "sn")
            value = t.sn;
        else if (fn == "cn")
            value = t.cn;
        else if (fn == "dn")
            value = t.dn;
        else
            throw std::invalid_argument("unknown function: " + fn);
    }
    std::cout << lb::format_double(value.real()) << " " << lb::format_double(value.imag()) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"band structure of analytically solvable periodic potentials"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "tabulate the potential over an x grid");
    SpecOptions sample_spec;
    OutputOptions sample_out;
    sample_spec.attach(sample);
    sample_out.attach(sample);
    double x_min = 0.0, x_max = 10.0;
    int sample_n = 200;
    sample->add_option("--x-min", x_min, "grid start");
    sample->add_option("--x-max", x_max, "grid end");
    sample->add_option("-n,--n", sample_n, "number of samples")->check(CLI::PositiveNumber);

    // band-edges
    auto* bedges = app.add_subcommand("band-edges", "analytic and numeric band edges");
    SpecOptions be_spec;
    OutputOptions be_out;
    be_spec.attach(bedges);
    be_out.attach(bedges);
    std::string mode = "both";
    std::optional<double> e_min, e_max;
    lb::EdgeSearchOptions eopt;
    double compare_tol = 1e-6;
    std::string scan_csv;
    bedges->add_option("--mode", mode, "analytic, numeric or both")
        ->check(CLI::IsMember({"analytic", "numeric", "both"}));
    bedges->add_option("--e-min", e_min, "scan window start");
    bedges->add_option("--e-max", e_max, "scan window end");
    bedges->add_option("--scan-points", eopt.scan_points, "scan resolution")->check(CLI::PositiveNumber);
    bedges->add_option("--edge-tol", eopt.edge_tol, "edge bisection tolerance");
    bedges->add_option("--ode-tol", eopt.ode_tol, "integrator tolerance");
    bedges->add_option("--compare-tol", compare_tol, "pass/fail threshold in both mode");
    bedges->add_option("--scan-csv", scan_csv, "also write the discriminant scan to this CSV file");

    // dispersion
    auto* disp = app.add_subcommand("dispersion", "Bloch momentum over an energy grid");
    SpecOptions disp_spec;
    OutputOptions disp_out;
    disp_spec.attach(disp);
    disp_out.attach(disp);
    double de_min = 0.0, de_max = 5.0, disp_ode_tol = 1e-10;
    int disp_n = 100;
    disp->add_option("--e-min", de_min, "energy grid start");
    disp->add_option("--e-max", de_max, "energy grid end");
    disp->add_option("-n,--n", disp_n, "number of samples")->check(CLI::PositiveNumber);
    disp->add_option("--ode-tol", disp_ode_tol, "integrator tolerance");

    // verify
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    OutputOptions verify_out;
    verify_out.attach(verify);
    std::string suite = "all";
    VerifyContext ctx;
    std::vector<double> m_list = {0.3, 0.5};
    std::vector<int> a_list = {1, 2};
    verify->add_option("suite", suite, "duality, landen, pt, susy, dsg or all")
        ->check(CLI::IsMember({"duality", "landen", "pt", "susy", "dsg", "all"}));
    verify->add_option("--m", m_list, "modulus values");
    verify->add_option("--a", a_list, "strength indices");
    verify->add_option("--b", ctx.dsg_b, "double sine-Gordon b strength");
    verify->add_option("--ode-tol", ctx.ode_tol, "integrator tolerance");
    verify->add_option("--tol", ctx.tol, "relation tolerance");

    // hidden elliptic eval
    auto* elliptic = app.add_subcommand("elliptic", "elliptic function evaluation");
    elliptic->group("");  // hidden from help
    auto* eeval = elliptic->add_subcommand("eval", "evaluate one function at one point");
    double em = 0.5, u_re = 0.0, u_im = 0.0;
    std::string fn = "sn";
    eeval->add_option("--m", em, "modulus parameter")->required();
    eeval->add_option("--u-re", u_re, "argument, real part")->required();
    eeval->add_option("--u-im", u_im, "argument, imaginary part");
    eeval->add_option("--fn", fn, "sn, cn, dn, zeta, eta, theta or K")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sample->parsed()) return run_sample(sample_spec, sample_out, x_min, x_max, sample_n);
        if (bedges->parsed())
            return run_band_edges(be_spec, be_out, mode, e_min, e_max, eopt, compare_tol, scan_csv);
        if (disp->parsed())
            return run_dispersion(disp_spec, disp_out, de_min, de_max, disp_n, disp_ode_tol);
        if (verify->parsed()) {
            ctx.m_list = m_list;
            ctx.a_list = a_list;
            return run_verify(suite, ctx, verify_out);
        }
        if (elliptic->parsed() && eeval->parsed()) return run_elliptic_eval(em, u_re, u_im, fn);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const lb::SingularityError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const lb::ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const lb::IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const lb::CatalogMissError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

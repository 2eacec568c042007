#ifndef LAMEBANDS_FLOQUET_HPP
#define LAMEBANDS_FLOQUET_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lamebands/catalog.hpp"
#include "lamebands/evaluate.hpp"
#include "lamebands/potential.hpp"

namespace lamebands {

/// Adaptive integration failed (step-size underflow, typically close to a
/// singular point of a complex potential).
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double location)
        : std::runtime_error(what + " at x = " + std::to_string(location)), location_(location) {}
    double location() const { return location_; }

private:
    double location_;
};

/// Transfer matrix over one period at a fixed energy. Columns propagate the
/// initial data (1, 0) and (0, 1); the discriminant is the trace.
struct MonodromyResult {
    std::array<std::array<Complex, 2>, 2> matrix;
    Complex discriminant;
    Complex det;
    double energy;
    double period_length;
};

namespace detail {

using OdeState = std::array<Complex, 4>;

/// One adaptive Dormand-Prince 5(4) pass over [x0, x0 + length] for the two
/// Schrodinger solutions, local error per step below tol (mixed
/// absolute/relative criterion), dense states optionally recorded.
template <typename Potential>
OdeState dopri5(const Potential& V, double E, double x0, double length, double tol,
                std::vector<std::pair<double, OdeState>>* trace = nullptr) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    auto rhs = [&](double x, const OdeState& y) -> OdeState {
        const Complex w = V(x) - E;
        return {y[1], w * y[0], y[3], w * y[2]};
    };

    OdeState y{Complex(1.0), Complex(0.0), Complex(0.0), Complex(1.0)};
    double x = x0;
    const double x_end = x0 + length;
    double h = length / 100.0;
    const double hmin = 1e-14 * length;
    OdeState k1 = rhs(x, y);
    if (trace) trace->emplace_back(x, y);

    auto stage = [](const OdeState& y0, double h, std::initializer_list<std::pair<double, const OdeState*>> terms) {
        OdeState r = y0;
        for (auto& [c, k] : terms)
            for (int i = 0; i < 4; ++i) r[i] += h * c * (*k)[i];
        return r;
    };

    while (x < x_end) {
        h = std::min(h, x_end - x);
        const OdeState k2 = rhs(x + c2 * h, stage(y, h, {{a21, &k1}}));
        const OdeState k3 = rhs(x + c3 * h, stage(y, h, {{a31, &k1}, {a32, &k2}}));
        const OdeState k4 = rhs(x + c4 * h, stage(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const OdeState k5 = rhs(x + c5 * h, stage(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const OdeState k6 =
            rhs(x + h, stage(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        OdeState ynew;
        for (int i = 0; i < 4; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const OdeState k7 = rhs(x + h, ynew);

        double err = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Complex ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                    e7 * k7[i]);
            const double scale = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(ei) / scale);
        }

        if (err <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7;  // first-same-as-last
            if (trace) trace->emplace_back(x, y);
        }
        const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < hmin && x < x_end)
            throw IntegrationError("dopri5: step size underflow", x);
    }
    return y;
}

inline MonodromyResult pack_monodromy(const OdeState& y, double E, double length) {
    MonodromyResult r;
    r.matrix = {{{y[0], y[2]}, {y[1], y[3]}}};
    r.discriminant = y[0] + y[3];
    r.det = y[0] * y[3] - y[2] * y[1];
    r.energy = E;
    r.period_length = length;
    return r;
}

}  // namespace detail

/// Monodromy matrix of -psi'' + V psi = E psi over one period of a callable
/// potential, starting at x0.
inline MonodromyResult monodromy(const PotentialFn& V, double period_length, double E,
                                 double ode_tol = 1e-10, double x0 = 0.0) {
    const auto y = detail::dopri5(V, E, x0, period_length, ode_tol);
    return detail::pack_monodromy(y, E, period_length);
}

/// Monodromy matrix for a potential spec. PT specs that trip the pole guard
/// at the default basepoint are retried once from x0 + L/7.
inline MonodromyResult monodromy(const PotentialSpec& s, double E, double ode_tol = 1e-10) {
    const double L = period(s);
    const auto V = make_evaluator(s);
    try {
        return monodromy(V, L, E, ode_tol);
    } catch (const SingularityError&) {
        if (!std::holds_alternative<PtTransform>(s.family)) throw;
        return monodromy(V, L, E, ode_tol, L / 7.0);
    }
}

namespace detail {

inline unsigned scan_threads(std::size_t npoints) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("LAME_BANDS_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::min<unsigned>(n, static_cast<unsigned>(npoints));
}

}  // namespace detail

/// Discriminant over a uniform energy grid; points are computed concurrently
/// (capped by LAME_BANDS_THREADS) and merged in energy order.
inline std::vector<std::pair<double, Complex>> discriminant_scan(const PotentialFn& V,
                                                                 double period_length, double e_min,
                                                                 double e_max, int n_points,
                                                                 double ode_tol = 1e-10) {
    if (n_points < 2) throw std::invalid_argument("discriminant_scan: n_points >= 2 required");
    if (!(e_min < e_max)) throw std::invalid_argument("discriminant_scan: need e_min < e_max");
    std::vector<std::pair<double, Complex>> out(n_points);
    const unsigned nthreads = detail::scan_threads(n_points);
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n_points; i = next.fetch_add(1)) {
            const double E = e_min + (e_max - e_min) * i / (n_points - 1);
            try {
                out[i] = {E, monodromy(V, period_length, E, ode_tol).discriminant};
            } catch (...) {
                // Annotate the failing grid point and stop this worker.
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    try {
                        throw;
                    } catch (const std::exception& e) {
                        first_error = std::make_exception_ptr(std::runtime_error(
                            "discriminant_scan: failure at E = " + std::to_string(E) + ": " +
                            e.what()));
                    } catch (...) {
                        first_error = std::current_exception();
                    }
                }
                return;
            }
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

inline std::vector<std::pair<double, Complex>> discriminant_scan(const PotentialSpec& s, double e_min,
                                                                 double e_max, int n_points,
                                                                 double ode_tol = 1e-10) {
    return discriminant_scan(make_evaluator(s), period(s), e_min, e_max, n_points, ode_tol);
}

enum class EdgeType { periodic, antiperiodic };

/// One numerically located band edge: energy where the discriminant reaches
/// +2 (periodic) or -2 (antiperiodic); `degenerate` marks a tangency (a
/// zero-width gap). Entries carrying a warning are unresolved tangency
/// candidates.
struct NumericBandEdge {
    double energy = 0.0;
    EdgeType edge_type = EdgeType::periodic;
    bool degenerate = false;
    std::optional<int> nodes;
    std::optional<std::string> warning;
};

struct EdgeSearchOptions {
    double edge_tol = 1e-10;   // energy resolution of the bisection
    int scan_points = 400;     // base grid resolution
    double ode_tol = 1e-10;
    bool with_nodes = false;   // attach node counts (real potentials only)
};

namespace detail {

template <typename DeltaFn>
double bisect_edge(const DeltaFn& g, double lo, double hi, double glo, double edge_tol) {
    for (int it = 0; it < 200 && hi - lo > edge_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimum of |g| on [lo, hi].
template <typename DeltaFn>
std::pair<double, double> minimize_abs(const DeltaFn& g, double lo, double hi, double xtol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = std::abs(g(x1)), f2 = std::abs(g(x2));
    while (hi - lo > xtol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = std::abs(g(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = std::abs(g(x2));
        }
    }
    const double x = 0.5 * (lo + hi);
    return {x, std::abs(g(x))};
}

}  // namespace detail

int count_nodes(const PotentialFn& V, double period_length, double E, EdgeType edge_type,
                double ode_tol);

/// Locate every band edge in [e_min, e_max]: roots of Delta -+ 2 refined by
/// bisection, tangencies flagged as degenerate (zero-width gaps). Cells whose
/// endpoints bracket both a periodic and an antiperiodic crossing are
/// rescanned at doubled resolution.
inline std::vector<NumericBandEdge> find_band_edges(const PotentialFn& V, double period_length,
                                                    double e_min, double e_max,
                                                    const EdgeSearchOptions& opt = {}) {
    const auto scan = discriminant_scan(V, period_length, e_min, e_max, opt.scan_points, opt.ode_tol);
    auto delta_re = [&](double E) {
        return monodromy(V, period_length, E, opt.ode_tol).discriminant.real();
    };

    // A discriminant with a significant imaginary part signals spontaneously
    // broken PT symmetry; the real-part classification below is then
    // unreliable and every returned entry is marked accordingly.
    double max_im = 0.0;
    for (const auto& [e, d] : scan) max_im = std::max(max_im, std::abs(d.imag()));
    const bool complex_discriminant = max_im > 1e-3;

    std::vector<NumericBandEdge> edges;

    struct Family {
        double target;
        EdgeType type;
    };
    const Family families[2] = {{+2.0, EdgeType::periodic}, {-2.0, EdgeType::antiperiodic}};

    // Sign-change brackets from the cached scan, with local resolution
    // multiplied when one cell brackets both families.
    struct Cell {
        double lo, hi, dlo, dhi;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
        const Cell c{scan[i].first, scan[i + 1].first, scan[i].second.real(),
                     scan[i + 1].second.real()};
        const bool b_p = (c.dlo - 2.0) * (c.dhi - 2.0) < 0.0;
        const bool b_a = (c.dlo + 2.0) * (c.dhi + 2.0) < 0.0;
        if (b_p && b_a) {
            const int sub = 32;
            double prev_x = c.lo, prev_d = c.dlo;
            for (int k = 1; k <= sub; ++k) {
                const double xk = c.lo + (c.hi - c.lo) * k / sub;
                const double dk = (k == sub) ? c.dhi : delta_re(xk);
                cells.push_back({prev_x, xk, prev_d, dk});
                prev_x = xk;
                prev_d = dk;
            }
        } else {
            cells.push_back(c);
        }
    }

    for (const auto& c : cells) {
        for (const auto& fam : families) {
            const double glo = c.dlo - fam.target, ghi = c.dhi - fam.target;
            if (glo * ghi < 0.0) {
                NumericBandEdge e;
                e.energy = detail::bisect_edge([&](double E) { return delta_re(E) - fam.target; },
                                               c.lo, c.hi, glo, opt.edge_tol);
                e.edge_type = fam.type;
                edges.push_back(e);
            }
        }
    }

    // Dip analysis: a gap narrower than the grid, or a zero-width gap, hides
    // between samples as a local approach of Delta toward -+2 with no sign
    // change. A parabolic fit flags the suspect dips; each is rescanned
    // recursively until it either yields a bracketed edge pair, a degenerate
    // tangency, or an unresolved-candidate warning.
    for (const auto& fam : families) {
        auto gfun = [&](double E) { return delta_re(E) - fam.target; };

        std::function<void(double, double, int)> resolve_dip = [&](double lo, double hi, int depth) {
            constexpr int kSub = 32;
            std::array<double, kSub + 1> gv;
            for (int k = 0; k <= kSub; ++k) gv[k] = gfun(lo + (hi - lo) * k / kSub);
            bool bracketed = false;
            for (int k = 0; k < kSub; ++k) {
                if (gv[k] * gv[k + 1] < 0.0) {
                    bracketed = true;
                    NumericBandEdge e;
                    const double a = lo + (hi - lo) * k / kSub;
                    const double b = lo + (hi - lo) * (k + 1) / kSub;
                    e.energy = detail::bisect_edge(gfun, a, b, gv[k], opt.edge_tol);
                    e.edge_type = fam.type;
                    edges.push_back(e);
                }
            }
            if (bracketed) return;
            int kmin = 1;
            for (int k = 1; k < kSub; ++k)
                if (std::abs(gv[k]) < std::abs(gv[kmin])) kmin = k;
            if (depth < 3) {
                resolve_dip(lo + (hi - lo) * (kmin - 1) / kSub, lo + (hi - lo) * (kmin + 1) / kSub,
                            depth + 1);
                return;
            }
            const auto [x, fx] = detail::minimize_abs(
                gfun, lo + (hi - lo) * (kmin - 1) / kSub, lo + (hi - lo) * (kmin + 1) / kSub,
                opt.edge_tol);
            if (fx < 1e-4) {
                NumericBandEdge e;
                e.energy = x;
                e.edge_type = fam.type;
                e.degenerate = true;
                if (fx >= 1e-6)
                    e.warning =
                        "unresolved tangency candidate: min |Delta -+ 2| = " + std::to_string(fx);
                edges.push_back(e);
            }
        };

        for (std::size_t i = 1; i + 1 < scan.size(); ++i) {
            const double gl = scan[i - 1].second.real() - fam.target;
            const double gm = scan[i].second.real() - fam.target;
            const double gr = scan[i + 1].second.real() - fam.target;
            if (gl * gm < 0.0 || gm * gr < 0.0) continue;           // already bracketed
            if (!(std::abs(gm) <= std::abs(gl) && std::abs(gm) < std::abs(gr))) continue;
            const double denom = gl - 2.0 * gm + gr;
            double vstar = gm;
            if (denom != 0.0) {
                const double tstar = 0.5 * (gl - gr) / denom;
                if (std::abs(tstar) <= 1.0)
                    vstar = gm - (gl - gr) * (gl - gr) / (8.0 * denom);
            }
            if ((vstar < 0.0) != (gm < 0.0) || std::abs(vstar) < 1e-3 || std::abs(gm) < 1e-4)
                resolve_dip(scan[i - 1].first, scan[i + 1].first, 0);
        }
    }

    std::sort(edges.begin(), edges.end(),
              [](const NumericBandEdge& a, const NumericBandEdge& b) { return a.energy < b.energy; });

    // Merge duplicates that the overlapping dip windows may have re-found.
    std::vector<NumericBandEdge> unique;
    for (auto& e : edges) {
        if (!unique.empty() && e.edge_type == unique.back().edge_type &&
            e.degenerate == unique.back().degenerate &&
            std::abs(e.energy - unique.back().energy) < std::max(1e-11, 10.0 * opt.edge_tol))
            continue;
        unique.push_back(std::move(e));
    }
    edges = std::move(unique);

    if (complex_discriminant)
        for (auto& e : edges)
            e.warning = "discriminant is complex (max |Im Delta| = " + std::to_string(max_im) +
                        "); PT symmetry looks spontaneously broken and the edge classification "
                        "is not meaningful";

    if (opt.with_nodes && !complex_discriminant)
        for (auto& e : edges)
            if (!e.degenerate) e.nodes = count_nodes(V, period_length, e.energy, e.edge_type, opt.ode_tol);
    return edges;
}

inline std::vector<NumericBandEdge> find_band_edges(const PotentialSpec& s, double e_min, double e_max,
                                                    EdgeSearchOptions opt = {}) {
    const bool complex_potential = std::holds_alternative<PtTransform>(s.family);
    if (complex_potential) opt.with_nodes = false;
    return find_band_edges(make_evaluator(s), period(s), e_min, e_max, opt);
}

/// Node count of the (anti)periodic eigensolution over one period: the
/// monodromy eigenvector for eigenvalue +-1 is propagated densely and its
/// sign changes on [0, L) are counted; the antiperiodic endpoint mismatch is
/// not a node.
inline int count_nodes(const PotentialFn& V, double period_length, double E, EdgeType edge_type,
                       double ode_tol = 1e-10) {
    const auto mr = monodromy(V, period_length, E, ode_tol);
    const double target = edge_type == EdgeType::periodic ? 2.0 : -2.0;
    if (std::abs(mr.discriminant.real() - target) > 1e-5)
        throw std::invalid_argument("count_nodes: energy is not a band edge of the requested type");

    const double s = 0.5 * target;  // eigenvalue +-1
    const Complex m11 = mr.matrix[0][0], m12 = mr.matrix[0][1], m21 = mr.matrix[1][0],
                  m22 = mr.matrix[1][1];
    Complex v0, v1;
    if (std::abs(m12) + std::abs(s - m11) >= std::abs(s - m22) + std::abs(m21)) {
        v0 = m12;
        v1 = s - m11;
    } else {
        v0 = s - m22;
        v1 = m21;
    }
    if (std::abs(v0) + std::abs(v1) < 1e-13) {
        v0 = 1.0;  // fully degenerate matrix: any vector is an eigenvector
        v1 = 0.0;
    }

    std::vector<std::pair<double, detail::OdeState>> trace;
    detail::dopri5(V, E, 0.0, period_length, std::min(ode_tol, 1e-9), &trace);

    // Dense samples of psi = v0 * column1 + v1 * column2. The adaptive trace
    // is augmented by a fixed subdivision of each step to keep the sampling
    // fine enough for node counting.
    std::vector<double> vals;
    vals.reserve(8192);
    const int per_step = std::max<int>(2, static_cast<int>(4096 / std::max<std::size_t>(trace.size(), 1)));
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const auto& [xa, ya] = trace[i];
        const auto& [xb, yb] = trace[i + 1];
        for (int k = 0; k < per_step; ++k) {
            // Hermite interpolation of psi between accepted steps.
            const double t = double(k) / per_step;
            const Complex pa = v0 * ya[0] + v1 * ya[2], da = v0 * ya[1] + v1 * ya[3];
            const Complex pb = v0 * yb[0] + v1 * yb[2], db = v0 * yb[1] + v1 * yb[3];
            const double h = xb - xa;
            const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
            const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
            const Complex p = h00 * pa + h10 * h * da + h01 * pb + h11 * h * db;
            vals.push_back(p.real());
        }
    }

    double amax = 0.0;
    for (double v : vals) amax = std::max(amax, std::abs(v));
    const double zt = 1e-9 * amax;
    int count = 0, last = 0;
    const bool leading_zero = std::abs(vals.front()) <= zt;
    for (double v : vals) {
        const int sgn = (v > zt) ? 1 : (v < -zt ? -1 : 0);
        if (sgn == 0) continue;
        if (last != 0 && sgn != last) ++count;
        last = sgn;
    }
    return count + (leading_zero ? 1 : 0);
}

inline int count_nodes(const PotentialSpec& s, double E, EdgeType edge_type, double ode_tol = 1e-10) {
    return count_nodes(make_evaluator(s), period(s), E, edge_type, ode_tol);
}

/// Locate the root of Delta -+ 2 nearest to an analytic prediction by a
/// growing bracket and bisection. Resolves edges of gaps far narrower than
/// any feasible range-scan resolution.
inline double refine_edge_near(const PotentialFn& V, double period_length, double e_guess,
                               EdgeType type, double ode_tol = 1e-10, double edge_tol = 1e-12) {
    const double target = type == EdgeType::periodic ? 2.0 : -2.0;
    auto g = [&](double E) {
        return monodromy(V, period_length, E, ode_tol).discriminant.real() - target;
    };
    const double scale = std::max(1.0, std::abs(e_guess));
    for (double h = 1e-8 * scale; h <= 2e-2 * scale; h *= 10.0) {
        const double glo = g(e_guess - h), ghi = g(e_guess + h);
        if (glo == 0.0) return e_guess - h;
        if (ghi == 0.0) return e_guess + h;
        if ((glo < 0.0) != (ghi < 0.0))
            return detail::bisect_edge(g, e_guess - h, e_guess + h, glo, edge_tol);
    }
    throw std::runtime_error("refine_edge_near: no discriminant crossing near the predicted edge");
}

inline double refine_edge_near(const PotentialSpec& s, double e_guess, EdgeType type,
                               double ode_tol = 1e-10, double edge_tol = 1e-12) {
    return refine_edge_near(make_evaluator(s), period(s), e_guess, type, ode_tol, edge_tol);
}

/// Bloch momentum at energy E: cos(kL) = Delta/2, principal branch. Energies
/// inside a gap give k a nonzero imaginary part and set the flag.
struct DispersionPoint {
    Complex k;
    bool in_gap;
};

inline DispersionPoint dispersion(const PotentialFn& V, double period_length, double E,
                                  double ode_tol = 1e-10) {
    const auto mr = monodromy(V, period_length, E, ode_tol);
    const Complex kl = std::acos(mr.discriminant / 2.0);
    return {kl / period_length, std::abs(kl.imag()) > 1e-7};
}

inline DispersionPoint dispersion(const PotentialSpec& s, double E, double ode_tol = 1e-10) {
    return dispersion(make_evaluator(s), period(s), E, ode_tol);
}

}  // namespace lamebands

#endif

#include "spectral.hpp"

#include "parallel.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace acclab {

namespace {

// Three-point Gauss-Legendre on [l, r].
template <class F>
double gauss3(F f, double l, double r) {
    const double m = 0.5 * (l + r), h = 0.5 * (r - l);
    const double d = h * std::sqrt(0.6);
    return h * (5.0 / 9.0 * f(m - d) + 8.0 / 9.0 * f(m) + 5.0 / 9.0 * f(m + d));
}

bool left_dirichlet(const RadialOperator& op) {
    return op.inner_bc == InnerBC::none && op.family.outer_bc == OuterBC::dirichlet;
}

bool right_dirichlet(const RadialOperator& op) { return op.family.outer_bc == OuterBC::dirichlet; }

} // namespace

std::vector<double> SLGrid::nodes() const {
    if (N < 16) throw SpectralError("grid needs N >= 16");
    if (!(b > a)) throw SpectralError("grid interval must satisfy a < b");
    std::vector<double> x(N + 1);
    if (spacing == Spacing::uniform) {
        for (int i = 0; i <= N; ++i) x[i] = a + (b - a) * double(i) / N;
    } else if (a >= 0) {
        for (int i = 0; i <= N; ++i) x[i] = a + (b - a) * std::pow(double(i) / N, grading);
    } else {
        if (!(b > 0) || N % 2) throw SpectralError("symmetric graded grid needs a < 0 < b and even N");
        const int h = N / 2;
        for (int i = 0; i <= N; ++i) {
            const int j = i - h;
            const double s = std::pow(std::abs(double(j)) / h, grading);
            x[i] = j < 0 ? a * s : b * s;
        }
    }
    x.front() = a;
    x.back() = b;
    return x;
}

SLGrid SLGrid::refined() const {
    SLGrid g = *this;
    g.N *= 2;
    return g;
}

SLGrid default_grid(const RadialOperator& op, int N) {
    SLGrid g;
    g.N = N;
    g.a = op.a;
    g.b = op.b;
    // The substitution u = x^gamma v leaves v smooth at the tip, and graded nodes
    // inflate the matrix norm by N^4, which costs more in roundoff than they gain.
    g.spacing = SLGrid::Spacing::uniform;
    return g;
}

DiscreteOperator discretize(const RadialOperator& op, const SLGrid& grid) {
    if (grid.a != op.a || grid.b != op.b) throw SpectralError("grid interval does not match the operator domain");
    DiscreteOperator d;
    d.x = grid.nodes();
    d.gamma = op.gamma;
    const int N = grid.N;
    std::vector<double> kd(N + 1, 0.0), ko(N, 0.0), m(N + 1, 0.0);
    auto P = [&](double x) { return op.P(x); };
    auto W = [&](double x) { return op.W(x); };
    auto V = [&](double x) { return op.V(x); };
    for (int e = 0; e < N; ++e) {
        const double l = d.x[e], r = d.x[e + 1], h = r - l, mid = 0.5 * (l + r);
        if (!(h > 0)) throw SpectralError("grid nodes are not strictly increasing");
        const double k = gauss3(P, l, r) / (h * h);
        kd[e] += k;
        kd[e + 1] += k;
        ko[e] = -k;
        m[e] += gauss3(W, l, mid);
        m[e + 1] += gauss3(W, mid, r);
        kd[e] += gauss3(V, l, mid);
        kd[e + 1] += gauss3(V, mid, r);
    }
    // The substitution u = x^gamma v moves a boundary term into the form; it only
    // survives at a natural (Neumann) outer end.
    if (!right_dirichlet(op) && op.gamma != 0) kd[N] += op.gamma * op.P(op.b) / op.b;
    d.first = left_dirichlet(op) ? 1 : 0;
    d.last = right_dirichlet(op) ? N - 1 : N;
    for (int i = d.first; i <= d.last; ++i) {
        if (!(m[i] > 0)) throw SpectralError("nonpositive weight at x = " + std::to_string(d.x[i]));
        d.k_diag.push_back(kd[i]);
        d.mass.push_back(m[i]);
        if (i < d.last) d.k_off.push_back(ko[i]);
    }
    return d;
}

double ModeSolution::u(std::size_t k, double xq) const {
    if (k >= v.size()) throw SpectralError("eigenpair index out of range");
    if (xq < x.front() || xq > x.back()) throw SpectralError("evaluation point outside the grid");
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = it == x.end() ? x.size() - 2 : std::size_t(it - x.begin()) - 1;
    const double t = (xq - x[i]) / (x[i + 1] - x[i]);
    const double vv = (1 - t) * v[k][i] + t * v[k][i + 1];
    return (gamma == 0 ? 1.0 : std::pow(std::abs(xq), gamma)) * vv;
}

ModeSolution solve_mode(const RadialOperator& op, const SLGrid& grid, int count) {
    if (count < 1 || count > grid.N / 4) throw SpectralError("eigenpair count must lie in [1, N/4]");
    const DiscreteOperator d = discretize(op, grid);
    const int n = d.size();
    std::vector<double> diag(n), off(n, 0.0), sq(n);
    for (int i = 0; i < n; ++i) sq[i] = std::sqrt(d.mass[i]);
    for (int i = 0; i < n; ++i) diag[i] = d.k_diag[i] / d.mass[i];
    for (int i = 0; i + 1 < n; ++i) off[i] = d.k_off[i] / (sq[i] * sq[i + 1]);
    std::vector<double> w(n), z(std::size_t(n) * count);
    std::vector<lapack_int> isuppz(2 * std::size_t(count));
    lapack_int found = 0, tryrac = 1;
    // MRRR directly: dstevr routes index subsets through bisection and inverse iteration.
    const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1, count,
                                           &found, w.data(), z.data(), n, count, isuppz.data(), &tryrac);
    if (info != 0 || found != count)
        throw SpectralError("tridiagonal eigensolver failed (info " + std::to_string(info) + ")");
    ModeSolution s;
    s.x = d.x;
    s.gamma = d.gamma;
    s.mass.assign(d.x.size(), 0.0);
    for (int i = 0; i < n; ++i) s.mass[d.first + i] = d.mass[i];
    for (int k = 0; k < count; ++k) {
        s.lambda.push_back(w[k]);
        const double* col = z.data() + std::size_t(k) * n;
        // Deterministic sign: the largest component is positive.
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(col[i]) > std::abs(col[imax]) + 1e-12) imax = i;
        const double sgn = col[imax] < 0 ? -1.0 : 1.0;
        std::vector<double> v(d.x.size(), 0.0);
        for (int i = 0; i < n; ++i) v[d.first + i] = sgn * col[i] / sq[i];
        s.v.push_back(std::move(v));
    }
    return s;
}

RichardsonPair solve_mode_richardson(const RadialOperator& op, const SLGrid& grid, int count, double rel_tol) {
    const ModeSolution coarse = solve_mode(op, grid, count);
    const ModeSolution fine = solve_mode(op, grid.refined(), count);
    RichardsonPair r;
    for (int k = 0; k < count; ++k) {
        const double e = std::abs(fine.lambda[k] - coarse.lambda[k]) / 3.0;
        if (e > rel_tol * std::abs(fine.lambda[k])) {
            std::ostringstream os;
            os << "grid too coarse: Richardson estimate " << e << " for eigenvalue " << fine.lambda[k]
               << " exceeds the tolerance";
            throw SpectralError(os.str());
        }
        r.lambda.push_back(fine.lambda[k]);
        r.err.push_back(e);
    }
    return r;
}

double bessel_zero(double nu, int k) {
    if (nu < 0 || k < 1) throw SpectralError("bessel_zero needs nu >= 0 and k >= 1");
    gsl_set_error_handler_off();
    gsl_sf_result r;
    if (gsl_sf_bessel_zero_Jnu_e(nu, k, &r) != GSL_SUCCESS) throw SpectralError("Bessel zero evaluation failed");
    return r.val;
}

namespace {

int mode_multiplicity(const WarpFamily& fam, const CrossSectionMode& m, double eps) {
    // At eps = 0 the neck is two cones joined at the tip; each mode appears on both.
    return (fam.profile == Profile::neck && eps == 0) ? 2 * m.multiplicity : m.multiplicity;
}

double next_mode_mu(const CrossSection& cs) {
    if (cs.kind != CrossSection::Kind::round_sphere) return std::numeric_limits<double>::infinity();
    const int l = cs.modes.back().ell + 1;
    return double(l) * (l + cs.dim - 1);
}

double f_max(const WarpFamily& fam, double eps) {
    double m = 0;
    const int S = 4000;
    for (int i = 0; i <= S; ++i) {
        const double x = fam.x_min() + (fam.x_max() - fam.x_min()) * double(i) / S;
        m = std::max(m, warp(fam, x, eps).f);
    }
    return m;
}

struct ModeRun {
    RichardsonPair pair;
};

EigenResult merge(const WarpFamily& fam, double eps, const std::vector<ModeRun>& runs, const SpectrumOptions& opt) {
    EigenResult res;
    res.eps = eps;
    const auto& modes = fam.cross_section.modes;
    double complete_below = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const auto& pr = runs[m].pair;
        for (std::size_t k = 0; k < pr.lambda.size(); ++k)
            res.entries.push_back({pr.lambda[k], pr.err[k], modes[m].mu, modes[m].ell,
                                   mode_multiplicity(fam, modes[m], eps), int(k) + 1});
        complete_below = std::min(complete_below, pr.lambda.back());
    }
    std::stable_sort(res.entries.begin(), res.entries.end(),
                     [](const EigenEntry& a, const EigenEntry& b) { return a.lambda < b.lambda; });
    const double fm = f_max(fam, eps);
    res.tail_bound = next_mode_mu(fam.cross_section) / (fm * fm);
    complete_below = std::min(complete_below, res.tail_bound);
    res.complete_count = 0;
    for (const auto& e : res.entries) {
        if (e.lambda > complete_below) break;
        ++res.complete_count;
    }
    if (fam.profile == Profile::neck && eps > 0)
        res.notes.push_back("neck model: two-ended model space, both ends share the cross-section");
    if (res.complete_count < int(res.entries.size())) {
        std::ostringstream os;
        os << "truncated spectrum: only the first " << res.complete_count
           << " entries are certified complete (tail bound " << res.tail_bound << ")";
        res.notes.push_back(os.str());
    }
    if (opt.require_complete > 0 && res.complete_count < opt.require_complete) {
        std::ostringstream os;
        os << "truncation insufficient for requested count " << opt.require_complete << ": tail bound "
           << res.tail_bound << " certifies only " << res.complete_count << " eigenvalues";
        throw SpectralError(os.str());
    }
    return res;
}

ModeRun run_mode(const WarpFamily& fam, double mu, double eps, const SpectrumOptions& opt) {
    const RadialOperator op = radial_operator(fam, mu, eps);
    return {solve_mode_richardson(op, default_grid(op, opt.N), opt.per_mode, opt.rel_tol)};
}

} // namespace

EigenResult conic_reference_spectrum(const WarpFamily& fam, int per_mode) {
    if (fam.outer_bc != OuterBC::dirichlet)
        throw SpectralError("Bessel reference spectrum is implemented for a Dirichlet outer boundary");
    fam.validate();
    EigenResult res;
    res.eps = 0;
    for (const auto& m : fam.cross_section.modes) {
        const double nu = indicial_roots(fam.n, m.mu, fam.c).nu;
        for (int k = 1; k <= per_mode; ++k) {
            const double j = bessel_zero(nu, k);
            res.entries.push_back({j * j, 0.0, m.mu, m.ell, mode_multiplicity(fam, m, 0.0), k});
        }
    }
    std::stable_sort(res.entries.begin(), res.entries.end(),
                     [](const EigenEntry& a, const EigenEntry& b) { return a.lambda < b.lambda; });
    res.tail_bound = next_mode_mu(fam.cross_section) / (fam.c * fam.c);
    res.complete_count = 0;
    double last_min = std::numeric_limits<double>::infinity();
    for (const auto& m : fam.cross_section.modes) {
        const double j = bessel_zero(indicial_roots(fam.n, m.mu, fam.c).nu, per_mode);
        last_min = std::min(last_min, j * j);
    }
    for (const auto& e : res.entries) {
        if (e.lambda > std::min(last_min, res.tail_bound)) break;
        ++res.complete_count;
    }
    return res;
}

EigenResult assemble_spectrum(const WarpFamily& fam, double eps, const SpectrumOptions& opt) {
    fam.validate();
    const auto& modes = fam.cross_section.modes;
    std::vector<ModeRun> runs(modes.size());
    parallel_for(modes.size(), opt.jobs, [&](std::size_t m) { runs[m] = run_mode(fam, modes[m].mu, eps, opt); });
    return merge(fam, eps, runs, opt);
}

std::vector<double> default_schedule() { return {0.2, 0.1, 0.05, 0.025, 0.0125}; }

namespace {

struct CurveLimit {
    double limit, uncertainty;
};

// Polynomial extrapolation in eps to eps = 0 through the last m points (Neville).
double neville_at_zero(const std::vector<double>& eps, const std::vector<double>& lam, std::size_t m) {
    std::vector<double> p(lam.end() - m, lam.end());
    std::vector<double> e(eps.end() - m, eps.end());
    for (std::size_t level = 1; level < m; ++level)
        for (std::size_t i = 0; i + level < m; ++i)
            p[i] = (e[i + level] * p[i] - e[i] * p[i + 1]) / (e[i + level] - e[i]);
    return p[0];
}

// Accumulation estimate assuming an expansion in integer powers of eps. The
// uncertainty is the change from the next lower extrapolation order.
CurveLimit extrapolate(const std::vector<double>& eps, const std::vector<double>& lam, std::size_t m) {
    const double hi = neville_at_zero(eps, lam, m);
    const double lo = neville_at_zero(eps, lam, m - 1);
    return {hi, std::abs(hi - lo)};
}

} // namespace

SpectralFlow spectral_flow(const WarpFamily& fam, const std::vector<double>& schedule, const FlowOptions& opt) {
    if (schedule.size() < 4) throw SpectralError("eps schedule needs at least 4 points");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0)) throw SpectralError("eps schedule entries must be positive");
        if (i && !(schedule[i] < schedule[i - 1])) throw SpectralError("eps schedule must be strictly decreasing");
    }
    if (opt.extrapolation_points < 2 || std::size_t(opt.extrapolation_points) > schedule.size())
        throw SpectralError("extrapolation needs between 2 and schedule-size points");
    fam.validate();
    const auto& modes = fam.cross_section.modes;
    const std::size_t M = modes.size(), E = schedule.size();
    std::vector<ModeRun> runs(M * E);
    parallel_for(M * E, opt.spectrum.jobs,
                 [&](std::size_t i) { runs[i] = run_mode(fam, modes[i % M].mu, schedule[i / M], opt.spectrum); });

    SpectralFlow flow;
    flow.schedule = schedule;
    for (std::size_t e = 0; e < E; ++e)
        flow.spectra.push_back(
            merge(fam, schedule[e], std::vector<ModeRun>(runs.begin() + e * M, runs.begin() + (e + 1) * M), opt.spectrum));

    for (std::size_t m = 0; m < M; ++m) {
        for (int k = 0; k < opt.spectrum.per_mode; ++k) {
            CurveSummary c;
            c.ell = modes[m].ell;
            c.k = k + 1;
            c.mu = modes[m].mu;
            c.mult = modes[m].multiplicity;
            for (std::size_t e = 0; e < E; ++e) {
                c.lambda.push_back(runs[e * M + m].pair.lambda[k]);
                c.err.push_back(runs[e * M + m].pair.err[k]);
            }
            for (std::size_t e = 0; e + 2 < E; ++e) {
                const double d1 = c.lambda[e] - c.lambda[e + 1], d2 = c.lambda[e + 1] - c.lambda[e + 2];
                const double noise = 3 * std::max({c.err[e], c.err[e + 1], c.err[e + 2]});
                const double r = std::log(schedule[e] / schedule[e + 1]);
                c.rates.push_back(std::abs(d2) > noise && d1 * d2 > 0 ? std::log(d1 / d2) / r
                                                                       : std::numeric_limits<double>::quiet_NaN());
            }
            const double disc = std::max(c.err[E - 1], c.err[E - 2]);
            const CurveLimit lim = extrapolate(schedule, c.lambda, std::size_t(opt.extrapolation_points));
            c.limit = lim.limit;
            c.limit_shift = std::abs(lim.limit - c.lambda.back());
            c.extrapolation_err = lim.uncertainty;
            c.discretization_err = disc;
            c.window = std::max(3 * disc, lim.uncertainty);
            flow.curves.push_back(std::move(c));
        }
    }

    // Curves join a cluster when their uncertainty intervals overlap.
    std::vector<std::size_t> order(flow.curves.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return flow.curves[a].limit < flow.curves[b].limit; });
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
        const CurveSummary& c = flow.curves[order[idx]];
        bool join = false;
        if (!flow.clusters.empty()) {
            const CurveSummary& prev = flow.curves[order[idx - 1]];
            join = c.limit - prev.limit <= c.window + prev.window;
        }
        if (!join) flow.clusters.push_back({});
        Cluster& cl = flow.clusters.back();
        cl.center = (cl.center * cl.multiplicity + c.limit * c.mult) / (cl.multiplicity + c.mult);
        cl.multiplicity += c.mult;
        cl.window = std::max(cl.window, c.window);
        cl.discretization_err = std::max(cl.discretization_err, c.discretization_err);
        cl.curves.emplace_back(c.ell, c.k);
    }

    const EigenResult ref = conic_reference_spectrum(fam, opt.spectrum.per_mode);
    for (const auto& e : ref.entries) {
        if (!flow.references.empty() &&
            std::abs(e.lambda - flow.references.back().center) <= 1e-12 * e.lambda) {
            flow.references.back().multiplicity += e.mult;
            flow.references.back().curves.emplace_back(e.ell, e.k);
            continue;
        }
        Cluster r;
        r.center = e.lambda;
        r.multiplicity = e.mult;
        r.curves.emplace_back(e.ell, e.k);
        flow.references.push_back(r);
    }

    const std::size_t K = std::size_t(opt.cluster_count);
    auto tol = [](double lambda, double disc) { return std::max(1e-3 * lambda, disc); };
    flow.computed_in_reference = flow.clusters.size() >= K;
    flow.multiplicities_match = true;
    for (std::size_t i = 0; i < std::min(K, flow.clusters.size()); ++i) {
        Cluster& cl = flow.clusters[i];
        const Cluster* best = nullptr;
        for (const auto& r : flow.references)
            if (!best || std::abs(r.center - cl.center) < std::abs(best->center - cl.center)) best = &r;
        cl.reference = best->center;
        cl.reference_multiplicity = best->multiplicity;
        cl.gap = std::abs(best->center - cl.center);
        cl.tolerance = tol(best->center, 3 * cl.discretization_err);
        cl.matched = cl.gap <= cl.tolerance;
        if (!cl.matched) {
            flow.computed_in_reference = false;
            std::ostringstream os;
            os.precision(10);
            os << "computed cluster " << cl.center << " has no reference within " << cl.tolerance;
            flow.unmatched.push_back(os.str());
        } else if (cl.multiplicity != best->multiplicity) {
            flow.multiplicities_match = false;
            std::ostringstream os;
            os.precision(10);
            os << "cluster " << cl.center << " multiplicity " << cl.multiplicity << " vs reference "
               << best->multiplicity;
            flow.unmatched.push_back(os.str());
        }
    }
    flow.reference_in_computed = flow.references.size() >= K;
    for (std::size_t i = 0; i < std::min(K, flow.references.size()); ++i) {
        Cluster& r = flow.references[i];
        const Cluster* best = nullptr;
        for (const auto& cl : flow.clusters)
            if (!best || std::abs(cl.center - r.center) < std::abs(best->center - r.center)) best = &cl;
        r.reference = best ? best->center : 0;
        r.reference_multiplicity = best ? best->multiplicity : 0;
        r.gap = best ? std::abs(best->center - r.center) : std::numeric_limits<double>::infinity();
        r.tolerance = tol(r.center, best ? 3 * best->discretization_err : 0);
        r.matched = best && r.gap <= r.tolerance;
        if (!r.matched) {
            flow.reference_in_computed = false;
            std::ostringstream os;
            os.precision(10);
            os << "reference eigenvalue " << r.center << " is not an accumulation point of the computed spectrum";
            flow.unmatched.push_back(os.str());
        } else if (best->multiplicity != r.multiplicity) {
            flow.multiplicities_match = false;
        }
    }
    if (flow.computed_in_reference && flow.reference_in_computed && flow.multiplicities_match)
        flow.verdict = "both inclusions hold, multiplicities match";
    else {
        std::ostringstream os;
        os << "computed-in-reference " << (flow.computed_in_reference ? "holds" : "fails") << ", reference-in-computed "
           << (flow.reference_in_computed ? "holds" : "fails") << ", multiplicities "
           << (flow.multiplicities_match ? "match" : "differ");
        flow.verdict = os.str();
    }
    return flow;
}

std::vector<double> rayleigh_minimax_bound(const RadialOperator& op, const SLGrid& grid,
                                           const std::vector<TrialFunction>& trials) {
    if (trials.empty()) throw SpectralError("trial space is empty");
    const DiscreteOperator d = discretize(op, grid);
    const int n = d.size(), m = int(trials.size());
    Eigen::MatrixXd T(n, m);
    for (int j = 0; j < m; ++j) {
        double umax = 0;
        for (double x : d.x) umax = std::max(umax, std::abs(trials[j].u(x)));
        if (right_dirichlet(op) && std::abs(trials[j].u(op.b)) > 1e-10 * umax)
            throw SpectralError("trial function does not vanish at the Dirichlet boundary");
        if (left_dirichlet(op) && std::abs(trials[j].u(op.a)) > 1e-10 * umax)
            throw SpectralError("trial function does not vanish at the Dirichlet boundary");
        for (int i = 0; i < n; ++i) {
            const double x = d.x[d.first + i];
            if (x == 0 && d.gamma != 0) continue;
            T(i, j) = trials[j].u(x) / (d.gamma == 0 ? 1.0 : std::pow(std::abs(x), d.gamma));
        }
        // v is bounded at the tip; take its value there by linear extrapolation.
        if (d.x[d.first] == 0 && d.gamma != 0) {
            const double x1 = d.x[d.first + 1], x2 = d.x[d.first + 2];
            T(0, j) = T(1, j) - (T(2, j) - T(1, j)) * x1 / (x2 - x1);
        }
    }
    Eigen::MatrixXd KT(n, m), MT(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            double s = d.k_diag[i] * T(i, j);
            if (i > 0) s += d.k_off[i - 1] * T(i - 1, j);
            if (i + 1 < n) s += d.k_off[i] * T(i + 1, j);
            KT(i, j) = s;
            MT(i, j) = d.mass[i] * T(i, j);
        }
    Eigen::MatrixXd A = T.transpose() * KT, B = T.transpose() * MT;
    A = 0.5 * (A + A.transpose());
    B = 0.5 * (B + B.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(B);
    const auto& g = gram.eigenvalues();
    if (!(g.minCoeff() > 1e-12 * g.maxCoeff())) throw SpectralError("Gram matrix numerically singular");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
    if (ges.info() != Eigen::Success) throw SpectralError("generalized eigensolver failed");
    std::vector<double> out(ges.eigenvalues().data(), ges.eigenvalues().data() + m);
    return out;
}

} // namespace acclab

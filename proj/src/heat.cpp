#include "heat.hpp"

#include "parallel.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace acclab {

namespace {

constexpr double kPi = std::numbers::pi;

// Eight-point Gauss-Legendre rule on [-1, 1].
constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                           0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                           0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

void require_positive_time(double t) {
    if (!(t > 0)) throw HeatError("kernel needs t > 0");
}

// GSL occasionally returns NaN for J_nu at isolated arguments; libstdc++ covers those.
double bessel_j(double nu, double x) {
    gsl_sf_result r;
    if (gsl_sf_bessel_Jnu_e(nu, x, &r) == GSL_SUCCESS && std::isfinite(r.val)) return r.val;
    return std::cyl_bessel_j(nu, x);
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

double euclidean_kernel_r(int n, double r, double t) {
    require_positive_time(t);
    return std::pow(4 * kPi * t, -0.5 * n) * std::exp(-r * r / (4 * t));
}

double euclidean_kernel(int n, const std::vector<double>& z, const std::vector<double>& zp, double t) {
    if (int(z.size()) != n || int(zp.size()) != n) throw HeatError("point dimension does not match n");
    double r2 = 0;
    for (int i = 0; i < n; ++i) r2 += (z[i] - zp[i]) * (z[i] - zp[i]);
    return euclidean_kernel_r(n, std::sqrt(r2), t);
}

double cone_mode_kernel(double nu, int n, double x, double xp, double t) {
    require_positive_time(t);
    if (!(x > 0 && xp > 0)) throw HeatError("cone mode kernel needs x, x' > 0");
    if (nu < 0) throw HeatError("cone mode kernel needs nu >= 0");
    gsl_set_error_handler_off();
    gsl_sf_result r;
    // e^{-z} I_nu(z) absorbs the growth; the Gaussian keeps only (x - x')^2.
    if (gsl_sf_bessel_Inu_scaled_e(nu, x * xp / (2 * t), &r) != GSL_SUCCESS)
        throw HeatError("scaled Bessel I evaluation failed");
    const double d = x - xp;
    return std::pow(x * xp, -0.5 * (n - 2)) / (2 * t) * std::exp(-d * d / (4 * t)) * r.val;
}

double b_cylinder_kernel(double s, double sp, double t, double mu) {
    require_positive_time(t);
    const double d = s - sp;
    return std::exp(-d * d / (4 * t) - mu * t) / std::sqrt(4 * kPi * t);
}

double cone_dirichlet_mode_kernel(double nu, int n, double c, double R, double x, double xp, double t) {
    require_positive_time(t);
    if (!(x > 0 && xp > 0 && x <= R && xp <= R)) throw HeatError("points must lie in (0, R]");
    gsl_set_error_handler_off();
    const double pre = std::pow(x * xp, -0.5 * (n - 2)) / std::pow(c, n - 1);
    double sum = 0;
    for (int k = 1; k <= 100000; ++k) {
        const double j = bessel_zero(nu, k);
        const double lam = j * j / (R * R);
        const double decay = std::exp(-lam * t);
        const double jn1 = bessel_j(nu + 1, j);
        const double norm2 = 0.5 * R * R * jn1 * jn1;
        const double term = decay * bessel_j(nu, j * x / R) * bessel_j(nu, j * xp / R) / norm2;
        sum += term;
        // |J| <= 1 bounds every later term by decay / norm2, and norm2 grows like j.
        if (k >= 4 && decay / norm2 * pre <= 1e-17 * std::abs(sum * pre) + 1e-300) return pre * sum;
    }
    throw HeatError("Fourier-Bessel series did not converge for t = " + fmt_double(t));
}

HeatSpectrum heat_spectrum(const WarpFamily& fam, double eps, const SLGrid& grid_unit, int count, int jobs) {
    fam.validate();
    HeatSpectrum hs;
    hs.family = fam;
    hs.eps = eps;
    const auto& modes = fam.cross_section.modes;
    hs.modes.resize(modes.size());
    parallel_for(modes.size(), jobs, [&](std::size_t m) {
        const RadialOperator op = radial_operator(fam, modes[m].mu, eps);
        SLGrid g = grid_unit;
        g.a = op.a;
        g.b = op.b;
        hs.modes[m] = solve_mode(op, g, count);
    });
    return hs;
}

double heat_from_spectrum(const HeatSpectrum& hs, std::size_t mode, double x, double xp, double t, double tail_tol) {
    require_positive_time(t);
    if (mode >= hs.modes.size()) throw HeatError("mode index out of range");
    const ModeSolution& s = hs.modes[mode];
    if (std::exp(-s.lambda.back() * t) > tail_tol)
        throw HeatError("tail tolerance unreachable: t = " + fmt_double(t) + " needs eigenvalues beyond " +
                        fmt_double(s.lambda.back()));
    double sum = 0;
    for (std::size_t k = 0; k < s.lambda.size(); ++k) sum += std::exp(-s.lambda[k] * t) * s.u(k, x) * s.u(k, xp);
    return sum;
}

namespace {

double addition_sum(const CrossSection& cs, const std::vector<double>& per_mode, double tail_tol) {
    const double vol = cs.volume();
    double total = 0, last = 0;
    for (std::size_t m = 0; m < per_mode.size(); ++m) {
        last = cs.modes[m].multiplicity / vol * per_mode[m];
        total += last;
    }
    if (per_mode.size() > 1 && std::abs(last) > tail_tol * std::abs(total) + 1e-300)
        throw HeatError("cross-section truncation insufficient: last mode contributes " +
                        fmt_double(std::abs(last / total)) + " of the kernel");
    return total;
}

} // namespace

double heat_full(const HeatSpectrum& hs, double x, double xp, double t, double tail_tol) {
    std::vector<double> per_mode(hs.modes.size());
    for (std::size_t m = 0; m < hs.modes.size(); ++m) per_mode[m] = heat_from_spectrum(hs, m, x, xp, t, tail_tol);
    return addition_sum(hs.family.cross_section, per_mode, tail_tol);
}

double cone_full_kernel(const WarpFamily& fam, double x, double xp, double t, double tail_tol) {
    std::vector<double> per_mode;
    for (const auto& m : fam.cross_section.modes) {
        const double nu = indicial_roots(fam.n, m.mu, fam.c).nu;
        per_mode.push_back(cone_dirichlet_mode_kernel(nu, fam.n, fam.c, fam.x_max(), x, xp, t));
    }
    return addition_sum(fam.cross_section, per_mode, tail_tol);
}

const char* regime_name(Regime r) {
    switch (r) {
    case Regime::interior_F0101: return "interior_F0101";
    case Regime::scaled_F1010: return "scaled_F1010";
    case Regime::scaling_identity: return "scaling_identity";
    }
    return "?";
}

Regime regime_from_name(const std::string& s) {
    for (auto r : {Regime::interior_F0101, Regime::scaled_F1010, Regime::scaling_identity})
        if (s == regime_name(r)) return r;
    throw HeatError("unknown regime '" + s + "'");
}

std::vector<double> default_probe_times(Regime r) {
    if (r == Regime::interior_F0101) return {0.1, 0.15, 0.25, 0.4, 0.6, 1.0};
    return {0.5};
}

namespace {

// Eigenpairs per mode so that exp(-lambda t) < tol: a Dirichlet interval of
// length L has lambda_k >= (k pi / L)^2 before the angular term is added.
int pairs_needed(double length, double t_min, double tol, int floor_count, int N) {
    const double lam = -std::log(tol) / t_min;
    const int k = int(std::ceil(length * std::sqrt(lam) / kPi)) + 20;
    return std::clamp(std::max(k, floor_count), 1, N / 4);
}

SLGrid uniform_grid(int N) {
    SLGrid g;
    g.N = N;
    g.spacing = SLGrid::Spacing::uniform;
    return g;
}

} // namespace

DecayTable heat_probe(const WarpFamily& fam, const std::vector<double>& schedule, const ProbeSpec& spec) {
    if (fam.profile != Profile::capped) throw HeatError("heat_probe needs the capped profile");
    if (schedule.empty()) throw HeatError("eps schedule is empty");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] < schedule[i - 1])) throw HeatError("eps schedule must be strictly decreasing");
    const std::vector<double> times = spec.times.empty() ? default_probe_times(spec.regime) : spec.times;
    const double t_min = *std::min_element(times.begin(), times.end());
    const double tail = 1e-12;
    const int n = fam.n;

    DecayTable tab;
    tab.regime = spec.regime;
    tab.eps = schedule;

    if (spec.regime == Regime::interior_F0101) {
        WarpFamily cone = fam;
        std::vector<double> h0;
        for (double t : times) h0.push_back(cone_full_kernel(cone, spec.x, spec.xp, t));
        const int count = pairs_needed(fam.x_max(), t_min, tail, spec.count, spec.N);
        for (double eps : schedule) {
            const HeatSpectrum hs = heat_spectrum(fam, eps, uniform_grid(spec.N), count, spec.jobs);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double v = heat_full(hs, spec.x, spec.xp, times[i], tail);
                tab.rows.push_back({spec.regime, eps, times[i], spec.x, spec.xp, h0[i], v, std::abs(v - h0[i])});
            }
        }
        tab.notes.push_back("H_0: exact-cone Dirichlet kernel by Fourier-Bessel series");
    } else {
        // Both sides are solved on grids with the same spacing in model-space units,
        // so eps^n H_eps(eps rho, eps rho', eps^2 tau) and the model kernel share
        // their discretization on the overlap.
        auto model_kernel = [&](double R) {
            WarpFamily z = fam;
            z.scale = R;
            const double eps_z = spec.regime == Regime::scaled_F1010 ? 1.0 / R : 0.0;
            const int N = int(std::lround(R / spec.h_rho));
            const int count = pairs_needed(R, t_min, tail, spec.count, N);
            return heat_spectrum(z, eps_z, uniform_grid(N), count, spec.jobs);
        };
        std::vector<double> hz;
        if (spec.regime == Regime::scaled_F1010) {
            const HeatSpectrum z1 = model_kernel(spec.R_z), z2 = model_kernel(2 * spec.R_z);
            for (double tau : times) {
                const double a = heat_full(z1, spec.x, spec.xp, tau, tail);
                const double b = heat_full(z2, spec.x, spec.xp, tau, tail);
                tab.truncation_influence = std::max(tab.truncation_influence, std::abs(a - b) / std::abs(b));
                hz.push_back(b);
            }
            if (tab.truncation_influence > 1e-6)
                throw HeatError("truncation-domain influence detected: doubling R changes H_Z by " +
                                fmt_double(tab.truncation_influence));
            tab.notes.push_back("H_Z: model space truncated at R = " + fmt_double(2 * spec.R_z) +
                                " with a Dirichlet tail, checked against R = " + fmt_double(spec.R_z));
        }
        for (double eps : schedule) {
            const double L = 1.0 / eps;
            const int N = int(std::lround(L / spec.h_rho));
            const int count = pairs_needed(L, t_min, tail, spec.count, N);
            const HeatSpectrum hs = heat_spectrum(fam, eps, uniform_grid(N), count, spec.jobs);
            std::vector<double> model = hz;
            if (spec.regime == Regime::scaling_identity) {
                // The region x <= 1 of M_eps is exactly eps times Z truncated at 1/eps.
                WarpFamily z = fam;
                z.scale = L;
                const HeatSpectrum zs = heat_spectrum(z, eps, uniform_grid(N), count, spec.jobs);
                model.clear();
                for (double tau : times) model.push_back(heat_full(zs, spec.x, spec.xp, tau, tail));
            }
            const double sc = std::pow(eps, n);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double v =
                    sc * heat_full(hs, eps * spec.x, eps * spec.xp, eps * eps * times[i], tail);
                tab.rows.push_back({spec.regime, eps, times[i], spec.x, spec.xp, model[i], v, std::abs(v - model[i])});
            }
        }
    }
    for (double eps : schedule) {
        double d = 0, dr = 0;
        for (const auto& r : tab.rows)
            if (r.eps == eps) {
                d = std::max(d, r.abs_err);
                dr = std::max(dr, r.abs_err / std::abs(r.value_model));
            }
        tab.d.push_back(d);
        tab.d_rel.push_back(dr);
    }
    tab.strictly_decreasing = true;
    for (std::size_t i = 1; i < tab.d.size(); ++i)
        if (!(tab.d[i] < tab.d[i - 1])) tab.strictly_decreasing = false;
    return tab;
}

double g0_profile(int n, const std::vector<double>& X) {
    double r2 = 0;
    for (double v : X) r2 += v * v;
    return std::pow(4 * kPi, -0.5 * n) * std::exp(-r2 / 4);
}

FiberCheck g0_fiber_check(int n, double h) {
    if (n < 1) throw HeatError("fiber dimension must be >= 1");
    if (!(h > 0)) throw HeatError("grid step must be positive");
    FiberCheck fc;
    // Samples along the coordinate axes and the main diagonal, radii 0..4.
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1;
        dirs.push_back(e);
    }
    dirs.push_back(std::vector<double>(n, 1.0 / std::sqrt(double(n))));
    for (const auto& d : dirs)
        for (int k = 0; k <= 16; ++k) {
            const double r = 0.25 * k;
            std::vector<double> X(n);
            for (int i = 0; i < n; ++i) X[i] = r * d[i];
            const double g = g0_profile(n, X);
            double lap = 0, radial = 0;
            for (int i = 0; i < n; ++i) {
                std::vector<double> p = X, m = X;
                p[i] += h;
                m[i] -= h;
                const double gp = g0_profile(n, p), gm = g0_profile(n, m);
                lap += (gp - 2 * g + gm) / (h * h);
                radial += X[i] * (gp - gm) / (2 * h);
            }
            // D_j = -i d_j, so sum D_j^2 = -Laplacian.
            const double res = -lap - 0.5 * (radial + n * g);
            fc.fiber_residual = std::max(fc.fiber_residual, std::abs(res));

            // Fourier side, per radial ray: u_hat(xi) = exp(-|xi|^2).
            const double xi = r;
            auto uh = [](double s) { return std::exp(-s * s); };
            const double du = (uh(xi + h) - uh(xi - h)) / (2 * h);
            fc.transform_residual = std::max(fc.transform_residual, std::abs(xi * du + 2 * xi * xi * uh(xi)));
        }
    fc.u_hat_0 = std::exp(-0.0);
    // Tensor trapezoid over [-L, L]^n; the Gaussian factorizes across coordinates.
    const double L = 20;
    const int M = int(std::ceil(L / 0.05));
    double one_d = 0;
    for (int k = -M; k <= M; ++k) {
        const double s = k * 0.05;
        one_d += 0.05 * std::exp(-s * s / 4) / std::sqrt(4 * kPi);
    }
    fc.mass = std::pow(one_d, n);
    return fc;
}

double euclidean_mass(int n, double t, double h) {
    require_positive_time(t);
    const double L = 40 * std::sqrt(t);
    const int M = int(std::ceil(L / h));
    double one_d = 0;
    for (int k = -M; k <= M; ++k) {
        const double s = k * h;
        one_d += h * std::exp(-s * s / (4 * t)) / std::sqrt(4 * kPi * t);
    }
    return std::pow(one_d, n);
}

namespace {

Eigen::MatrixXd convolve_panels(const GridKernel& A, const GridKernel& B, const Eigen::VectorXd& w, double t,
                                int panels) {
    Eigen::MatrixXd acc;
    const double H = t / panels;
    for (int p = 0; p < panels; ++p) {
        const double l = p * H;
        for (int g = 0; g < 8; ++g) {
            const double s = l + 0.5 * H * (kGx[g] + 1);
            Eigen::MatrixXd term = A(t - s) * w.asDiagonal() * B(s);
            term *= 0.5 * H * kGw[g];
            if (acc.size() == 0) acc = term;
            else acc += term;
        }
    }
    return acc;
}

} // namespace

Eigen::MatrixXd t_convolve(const GridKernel& A, const GridKernel& B, const std::vector<double>& weights, double t,
                           const ConvolutionOptions& opt) {
    if (t < 0) throw HeatError("t_convolve needs t >= 0");
    if (opt.panels < 2) throw HeatError("t_convolve needs at least 2 panels");
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), Eigen::Index(weights.size()));
    if (t == 0) return Eigen::MatrixXd::Zero(A(0).rows(), B(0).cols());
    const Eigen::MatrixXd fine = convolve_panels(A, B, w, t, opt.panels);
    const Eigen::MatrixXd coarse = convolve_panels(A, B, w, t, opt.panels / 2);
    const double est = (fine - coarse).cwiseAbs().maxCoeff();
    if (est > opt.tolerance * std::max(1.0, fine.cwiseAbs().maxCoeff()))
        throw HeatError("t_convolve quadrature estimate " + fmt_double(est) + " above tolerance");
    return fine;
}

Eigen::MatrixXd SampledKernel::at(double t) const {
    const int M = int(values.size()) - 1;
    if (t < -1e-14 * T || t > T * (1 + 1e-14)) throw HeatError("sampled kernel evaluated outside [0, T]");
    const double pos = std::clamp(t / T * M, 0.0, double(M));
    int lo = int(std::floor(pos)) - 3;
    lo = std::clamp(lo, 0, std::max(0, M - 7));
    const int hi = std::min(M, lo + 7);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(values[0].rows(), values[0].cols());
    for (int i = lo; i <= hi; ++i) {
        double li = 1;
        for (int j = lo; j <= hi; ++j)
            if (j != i) li *= (pos - j) / double(i - j);
        out += li * values[i];
    }
    return out;
}

SampledKernel sample_kernel(const GridKernel& K, double T, int M) {
    if (M < 8) throw HeatError("sampled kernel needs at least 8 intervals");
    SampledKernel s;
    s.T = T;
    for (int m = 0; m <= M; ++m) s.values.push_back(K(T * m / M));
    return s;
}

NeumannTable volterra_neumann(const GridKernel& K, const std::vector<double>& weights, double T, int j_max,
                              int samples) {
    if (j_max < 1) throw HeatError("volterra_neumann needs j_max >= 1");
    if (!(T > 0)) throw HeatError("volterra_neumann needs T > 0");
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), Eigen::Index(weights.size()));
    const Eigen::MatrixXd k0 = K(0.0);
    if (k0.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, K(T).cwiseAbs().maxCoeff()))
        throw HeatError("kernel does not vanish at t = 0 (not Volterra-regular)");
    NeumannTable tab;
    SampledKernel cur = sample_kernel(K, T, samples);
    auto sup_of = [](const SampledKernel& s) {
        double m = 0;
        for (const auto& v : s.values) m = std::max(m, v.cwiseAbs().maxCoeff());
        return m;
    };
    tab.sup.push_back(sup_of(cur));
    for (int j = 2; j <= j_max; ++j) {
        SampledKernel next;
        next.T = T;
        for (int m = 0; m <= samples; ++m) {
            const double t = T * m / samples;
            if (m == 0) {
                next.values.push_back(Eigen::MatrixXd::Zero(k0.rows(), k0.cols()));
                continue;
            }
            const int panels = std::max(2, int(std::ceil(16.0 * t / T)));
            next.values.push_back(convolve_panels(K, [&](double s) { return cur.at(s); }, w, t, panels));
        }
        cur = std::move(next);
        tab.sup.push_back(sup_of(cur));
    }
    double fact = 1;
    for (int j = 1; j <= j_max; ++j) {
        fact *= (j + 1);
        tab.c_hat.push_back(std::pow(tab.sup[j - 1] * fact, 1.0 / j) / T);
    }
    tab.factorial_decay = true;
    for (int j = 1; j < j_max; ++j) {
        const double r = tab.sup[j] / tab.sup[j - 1];
        tab.ratio.push_back(r);
        if (!(r < T / j) && tab.factorial_decay) {
            tab.factorial_decay = false;
            std::ostringstream os;
            os << "sup ratio " << r << " at j = " << j << " is not below T/j = " << T / j;
            tab.witness = os.str();
        }
    }
    return tab;
}

MaxPrincipleResult max_principle_check(const std::vector<MaxPrincipleSample>& samples, double C, int N, double T,
                                       double eps) {
    if (!(C >= 0) || N < 0 || !(T > 0)) throw HeatError("max_principle_check needs C >= 0, N >= 0, T > 0");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.t < 0 || s.t > T) throw HeatError("sample time outside [0, T]");
        const double env = C * eps * eps * std::pow(s.t, 2 * N);
        if (std::abs(s.K) > env * (1 + 1e-12))
            throw HeatError("hypothesis |K| <= C eps^2 t^2N fails at sample " + std::to_string(i));
        if (s.t == 0 && s.E != 0) throw HeatError("hypothesis E(., 0) = 0 fails at sample " + std::to_string(i));
    }
    MaxPrincipleResult res;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const double rhs = std::exp(T) * C * eps * eps * std::pow(s.t, 2 * N);
        const double lhs = s.E * s.E;
        if (lhs > rhs * (1 + 1e-12)) {
            res.ok = false;
            res.witness = i;
            res.lhs = lhs;
            res.rhs = rhs;
            return res;
        }
    }
    return res;
}

} // namespace acclab

#include "model_geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace acclab {

long long sphere_harmonic_dim(int d, int ell) {
    // Harmonic polynomials of degree ell on R^{d+1}: C(ell+d, d) - C(ell+d-2, d).
    auto binom = [](long long a, long long b) -> long long {
        if (b < 0 || a < b) return 0;
        long long r = 1;
        for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    if (ell < 0) return 0;
    return binom(ell + d, d) - binom(ell + d - 2, d);
}

double sphere_volume(int d) {
    const double k = 0.5 * (d + 1);
    return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

CrossSection CrossSection::round_sphere(int dim, int ell_max) {
    if (dim < 1) throw GeometryError("cross-section dimension must be >= 1");
    if (ell_max < 0) throw GeometryError("ell_max must be >= 0");
    CrossSection cs;
    cs.kind = Kind::round_sphere;
    cs.dim = dim;
    for (int l = 0; l <= ell_max; ++l)
        cs.modes.push_back({double(l) * (l + dim - 1), int(sphere_harmonic_dim(dim, l)), l});
    return cs;
}

CrossSection CrossSection::explicit_list(std::vector<CrossSectionMode> modes) {
    if (modes.empty()) throw GeometryError("explicit cross-section needs at least one mode");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i].mu < 0 || modes[i].multiplicity < 1) throw GeometryError("invalid cross-section mode");
        if (i && modes[i].mu < modes[i - 1].mu) throw GeometryError("cross-section modes must be nondecreasing in mu");
        modes[i].ell = -1;
    }
    CrossSection cs;
    cs.kind = Kind::explicit_modes;
    cs.modes = std::move(modes);
    return cs;
}

double CrossSection::volume() const {
    if (kind == Kind::round_sphere) return sphere_volume(dim);
    // Explicit lists carry no geometry; the constant mode normalizes to volume 1.
    return 1.0;
}

const char* profile_name(Profile p) { return p == Profile::neck ? "neck" : "capped"; }

Profile profile_from_name(const std::string& s) {
    if (s == "neck") return Profile::neck;
    if (s == "capped") return Profile::capped;
    throw GeometryError("unknown profile '" + s + "' (expected neck or capped)");
}

const char* outer_bc_name(OuterBC b) { return b == OuterBC::dirichlet ? "dirichlet" : "neumann"; }

OuterBC outer_bc_from_name(const std::string& s) {
    if (s == "dirichlet") return OuterBC::dirichlet;
    if (s == "neumann") return OuterBC::neumann;
    throw GeometryError("unknown outer_bc '" + s + "' (expected dirichlet or neumann)");
}

CapProfile::CapProfile(double c, double rho_in, double rho_b) : c_(c), rho_in_(rho_in), rho_b_(rho_b) {
    if (!(c > 0)) throw GeometryError("cone slope c must be positive");
    if (!(rho_b > rho_in && rho_in > 0)) throw GeometryError("cap radii must satisfy 0 < rho_in < rho_b");
    const double L = rho_b - rho_in;
    coef_[0] = rho_in;
    coef_[1] = 1.0;
    coef_[2] = 0.0;
    Eigen::Matrix3d A;
    A << std::pow(L, 3), std::pow(L, 4), std::pow(L, 5),
         3 * L * L, 4 * std::pow(L, 3), 5 * std::pow(L, 4),
         6 * L, 12 * L * L, 20 * std::pow(L, 3);
    Eigen::Vector3d rhs(c * rho_b - rho_in - L, c - 1.0, 0.0);
    Eigen::Vector3d sol = A.fullPivLu().solve(rhs);
    for (int i = 0; i < 3; ++i) coef_[3 + i] = sol[i];
}

double CapProfile::value(double rho) const {
    if (rho <= rho_in_) return rho;
    if (rho >= rho_b_) return c_ * rho;
    const double s = rho - rho_in_;
    double r = 0;
    for (int k = 5; k >= 0; --k) r = r * s + coef_[k];
    return r;
}

double CapProfile::d1(double rho) const {
    if (rho <= rho_in_) return 1.0;
    if (rho >= rho_b_) return c_;
    const double s = rho - rho_in_;
    double r = 0;
    for (int k = 5; k >= 1; --k) r = r * s + k * coef_[k];
    return r;
}

double CapProfile::d2(double rho) const {
    if (rho <= rho_in_ || rho >= rho_b_) return 0.0;
    const double s = rho - rho_in_;
    double r = 0;
    for (int k = 5; k >= 2; --k) r = r * s + k * (k - 1) * coef_[k];
    return r;
}

WarpFamily WarpFamily::make(int n, double c, Profile profile, int ell_max, OuterBC bc, double cap_match_radius) {
    WarpFamily f;
    f.n = n;
    f.c = c;
    f.profile = profile;
    f.outer_bc = bc;
    f.cross_section = CrossSection::round_sphere(n - 1, ell_max);
    f.cap_match_radius = cap_match_radius;
    f.validate();
    return f;
}

void WarpFamily::validate() const {
    if (n < 3) throw GeometryError("dimension n must be >= 3");
    if (!(c > 0)) throw GeometryError("cone slope c must be positive");
    if (potential < 0) throw GeometryError("potential must be nonnegative");
    if (!(scale > 0)) throw GeometryError("scale must be positive");
    if (cross_section.kind == CrossSection::Kind::round_sphere && cross_section.dim != n - 1)
        throw GeometryError("round cross-section must have dimension n-1");
    if (profile == Profile::capped) {
        CapProfile F = cap();
        for (int i = 0; i <= 400; ++i) {
            double rho = F.rho_in() + (F.rho_b() - F.rho_in()) * i / 400.0;
            if (!(F.value(rho) > 0)) throw GeometryError("cap profile is not positive on the blend region");
        }
    }
}

namespace {

WarpSample warp_unit(const WarpFamily& fam, double x, double eps) {
    if (fam.profile == Profile::neck) {
        const double c2 = fam.c * fam.c;
        if (eps == 0) return {fam.c * std::abs(x), x < 0 ? -fam.c : fam.c, 0.0};
        const double f = std::sqrt(eps * eps + c2 * x * x);
        return {f, c2 * x / f, c2 * eps * eps / (f * f * f)};
    }
    if (eps == 0) return {fam.c * x, fam.c, 0.0};
    // Operator assembly evaluates the profile millions of times; keep the blend.
    thread_local CapProfile F;
    if (F.c() != fam.c || F.rho_b() != fam.cap_match_radius) F = fam.cap();
    const double rho = x / eps;
    return {eps * F.value(rho), F.d1(rho), F.d2(rho) / eps};
}

} // namespace

WarpSample warp(const WarpFamily& fam, double x, double eps) {
    if (eps < 0) throw GeometryError("eps must be >= 0");
    if (fam.scale == 1.0) return warp_unit(fam, x, eps);
    const WarpSample s = warp_unit(fam, x / fam.scale, eps);
    return {fam.scale * s.f, s.df, s.ddf / fam.scale};
}

MetricSample metric_eval(const WarpFamily& fam, double x, double eps) {
    if (x < fam.x_min() || x > fam.x_max() || std::isnan(x))
        throw GeometryError("x = " + std::to_string(x) + " outside the model domain");
    const double f = warp(fam, x, eps).f;
    return {1.0, f * f};
}

MetricSample metric_eval_z(const WarpFamily& fam, double rho) {
    if (fam.profile == Profile::neck) return {1.0, 1.0 + fam.c * fam.c * rho * rho};
    if (rho < 0) throw GeometryError("rho must be >= 0 on the capped model space");
    const double F = fam.cap().value(rho);
    return {1.0, F * F};
}

double RadialOperator::p(double x) const { return std::pow(warp(family, x, eps).f, family.n - 1); }
double RadialOperator::w(double x) const { return p(x); }

double RadialOperator::q(double x) const {
    const double f = warp(family, x, eps).f;
    return mu * std::pow(f, family.n - 3) + family.potential * std::pow(f, family.n - 1);
}

double RadialOperator::P(double x) const {
    const double pw = gamma == 0 ? 1.0 : std::pow(std::abs(x), 2 * gamma);
    return pw * p(x);
}

double RadialOperator::W(double x) const { return P(x); }

double RadialOperator::V(double x) const {
    const WarpSample s = warp(family, x, eps);
    const int n = family.n;
    const double fn1 = std::pow(s.f, n - 1);
    if (gamma == 0) return fn1 * (mu / (s.f * s.f) + family.potential);
    const double bracket =
        (gamma - gamma * gamma) / (x * x) - gamma * (n - 1) * s.df / (s.f * x) + mu / (s.f * s.f);
    return std::pow(std::abs(x), 2 * gamma) * fn1 * (bracket + family.potential);
}

double RadialOperator::apply(double x, double u, double du, double ddu) const {
    const WarpSample s = warp(family, x, eps);
    return -ddu - (family.n - 1) * (s.df / s.f) * du + (mu / (s.f * s.f) + family.potential) * u;
}

namespace {

// Any gamma in [0, gamma_+] with bounded v selects the Friedrichs branch; capping
// it keeps |x|^{2 gamma} within a range the tridiagonal solver resolves at high mu.
constexpr double kGammaCap = 4.0;

} // namespace

RadialOperator radial_operator(const WarpFamily& fam, double mu, double eps) {
    if (mu < 0) throw GeometryError("mode eigenvalue mu must be >= 0");
    if (eps < 0) throw GeometryError("eps must be >= 0");
    fam.validate();
    RadialOperator op;
    op.family = fam;
    op.mu = mu;
    op.eps = eps;
    op.b = fam.x_max();
    if (eps == 0) {
        // At eps = 0 the neck splits into two cones; the operator covers one of them.
        op.a = 0.0;
        op.inner_bc = InnerBC::friedrichs_cone;
        op.gamma = std::min(indicial_roots(fam.n, mu, fam.c).gamma_plus, kGammaCap);
    } else if (fam.profile == Profile::capped) {
        op.a = 0.0;
        op.inner_bc = InnerBC::smooth_cap;
        op.gamma = std::min(indicial_roots(fam.n, mu, 1.0).gamma_plus, kGammaCap);
    } else {
        op.a = fam.x_min();
        op.inner_bc = InnerBC::none;
        op.gamma = 0.0;
    }
    return op;
}

IndicialData indicial_roots(int n, double mu, double c) {
    if (n < 3) throw GeometryError("indicial roots need n >= 3");
    if (mu < 0 || !(c > 0)) throw GeometryError("indicial roots need mu >= 0 and c > 0");
    const double h = 0.5 * (n - 2);
    const double nu = std::sqrt(h * h + mu / (c * c));
    return {-h + nu, -h - nu, nu};
}

bool friedrichs_gate(int n, double gamma) { return gamma > 0.5 * (2 - n); }

double weight_eval(const WeightFunction& w, double x, double eps) {
    const double ax = std::abs(x);
    if (ax >= w.delta) return 1.0;
    if (ax <= eps) return eps;
    return ax;
}

} // namespace acclab

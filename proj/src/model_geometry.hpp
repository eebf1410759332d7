#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace acclab {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CrossSectionMode {
    double mu = 0.0;
    int multiplicity = 1;
    int ell = 0;  // spherical-harmonic degree; -1 for explicit modes
};

// Cross-section eigenvalues are those of the unit metric; the cone slope c lives in
// the warp profile, so a round sphere of radius c appears as f = c x.
struct CrossSection {
    enum class Kind { round_sphere, explicit_modes };
    Kind kind = Kind::round_sphere;
    int dim = 2;
    std::vector<CrossSectionMode> modes;

    static CrossSection round_sphere(int dim, int ell_max);
    static CrossSection explicit_list(std::vector<CrossSectionMode> modes);
    // Volume of the unit cross-section (unit sphere for round_sphere).
    double volume() const;
};

long long sphere_harmonic_dim(int sphere_dim, int ell);
double sphere_volume(int sphere_dim);

enum class Profile { neck, capped };
enum class OuterBC { dirichlet, neumann };

const char* profile_name(Profile p);
Profile profile_from_name(const std::string& s);
const char* outer_bc_name(OuterBC b);
OuterBC outer_bc_from_name(const std::string& s);

// F(rho) = rho on [0, rho_in], c rho on [rho_b, inf), quintic C2 blend between.
class CapProfile {
public:
    CapProfile(double c = 1.0, double rho_in = 0.5, double rho_b = 2.0);

    double value(double rho) const;
    double d1(double rho) const;
    double d2(double rho) const;
    double c() const { return c_; }
    double rho_in() const { return rho_in_; }
    double rho_b() const { return rho_b_; }

private:
    double c_, rho_in_, rho_b_;
    double coef_[6] {};  // blend polynomial in s = rho - rho_in
};

struct WarpFamily {
    int n = 3;
    double c = 1.0;
    Profile profile = Profile::capped;
    OuterBC outer_bc = OuterBC::dirichlet;
    CrossSection cross_section = CrossSection::round_sphere(2, 4);
    double cap_match_radius = 2.0;
    double potential = 0.0;  // constant R >= 0 added to the Laplacian
    // Length scale L: the metric is L^2 times the unit-scale family, on x in [0, L]
    // (or [-L, L]) with f(x) = L f_unit(x / L).
    double scale = 1.0;

    static WarpFamily make(int n, double c, Profile profile, int ell_max, OuterBC bc = OuterBC::dirichlet,
                           double cap_match_radius = 2.0);

    CapProfile cap() const { return CapProfile(c, 0.5, cap_match_radius); }
    double x_min() const { return profile == Profile::neck ? -scale : 0.0; }
    double x_max() const { return scale; }
    void validate() const;
};

struct WarpSample {
    double f, df, ddf;
};

WarpSample warp(const WarpFamily& fam, double x, double eps);

struct MetricSample {
    double g_xx = 1.0;
    double angular = 0.0;  // factor multiplying the unit cross-section metric
};

MetricSample metric_eval(const WarpFamily& fam, double x, double eps);
// Metric of the model space Z: dρ² + F(ρ)² h for the capped family, and the
// two-ended catenoid-like end dρ² + (1 + c²ρ²) h for the neck.
MetricSample metric_eval_z(const WarpFamily& fam, double rho);

enum class InnerBC { friedrichs_cone, smooth_cap, none };

// Per-mode operator u -> (-(p u')' + q u)/w with p = w = f^{n-1}, q = mu f^{n-3} + R w.
// Discretizations work with u = |x|^gamma v, whose transformed coefficients are
// P = W = |x|^{2 gamma} f^{n-1} and potential V.
struct RadialOperator {
    WarpFamily family;
    double mu = 0.0;
    double eps = 0.0;
    InnerBC inner_bc = InnerBC::none;
    double a = 0.0, b = 1.0;
    double gamma = 0.0;

    double p(double x) const;
    double w(double x) const;
    double q(double x) const;
    double P(double x) const;
    double W(double x) const;
    double V(double x) const;
    // Formal action on a smooth function given its value and first two derivatives.
    double apply(double x, double u, double du, double ddu) const;
};

RadialOperator radial_operator(const WarpFamily& fam, double mu, double eps);

struct IndicialData {
    double gamma_plus, gamma_minus, nu;
};

IndicialData indicial_roots(int n, double mu, double c);
bool friedrichs_gate(int n, double gamma);

struct WeightFunction {
    double eps = 0.0;
    double delta = 1.0;
};

double weight_eval(const WeightFunction& w, double x, double eps);

} // namespace acclab

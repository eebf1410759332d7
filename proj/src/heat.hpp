#pragma once

#include "model_geometry.hpp"
#include "spectral.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acclab {

class HeatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double euclidean_kernel(int n, const std::vector<double>& z, const std::vector<double>& zp, double t);
// Same kernel as a function of the distance r = |z - z'|.
double euclidean_kernel_r(int n, double r, double t);

// Exact-cone mode kernel, with respect to x^{n-1} dx.
double cone_mode_kernel(double nu, int n, double x, double xp, double t);

double b_cylinder_kernel(double s, double sp, double t, double mu);

// Dirichlet heat kernel of the mode on the exact cone of slope c truncated at x = R,
// by its Fourier-Bessel series; with respect to (c x)^{n-1} dx.
double cone_dirichlet_mode_kernel(double nu, int n, double c, double R, double x, double xp, double t);

// Per-mode eigenpairs of a family at fixed eps, ready for spectral kernel sums.
struct HeatSpectrum {
    WarpFamily family;
    double eps = 0;
    std::vector<ModeSolution> modes;  // aligned with family.cross_section.modes
};

HeatSpectrum heat_spectrum(const WarpFamily& fam, double eps, const SLGrid& grid_unit, int count, int jobs = 1);

// Radial kernel of one mode, w.r.t. f^{n-1} dx. Throws when exp(-lambda_max t)
// exceeds tail_tol.
double heat_from_spectrum(const HeatSpectrum& hs, std::size_t mode, double x, double xp, double t,
                          double tail_tol = 1e-12);

// Full kernel at two points on the same ray of the cross-section, w.r.t. the
// Riemannian density, by the addition formula. Modes beyond the truncation are
// checked through the size of the last included mode's contribution.
double heat_full(const HeatSpectrum& hs, double x, double xp, double t, double tail_tol = 1e-12);

// Same sum for the exact cone (eps = 0) using the Fourier-Bessel mode kernels.
double cone_full_kernel(const WarpFamily& fam, double x, double xp, double t, double tail_tol = 1e-14);

enum class Regime { interior_F0101, scaled_F1010, scaling_identity };
const char* regime_name(Regime r);
Regime regime_from_name(const std::string& s);

struct ProbeSpec {
    Regime regime = Regime::interior_F0101;
    double x = 0.5, xp = 0.5;     // interior points, or rho, rho' for the scaled regimes
    std::vector<double> times;    // t for the interior regime, tau for the scaled regimes
    int N = 2048;                 // interior regime grid size
    double h_rho = 0.01;          // scaled regimes: spacing in model-space units
    double R_z = 8.0;             // scaled regime: model-space truncation radius
    int count = 60;               // eigenpairs per mode
    int jobs = 1;
};

struct ProbeRow {
    Regime regime;
    double eps, t, x, xp;
    double value_model, value_eps, abs_err;
};

struct DecayTable {
    Regime regime;
    std::vector<ProbeRow> rows;
    std::vector<double> eps;
    std::vector<double> d;      // max over times of abs_err, per eps
    std::vector<double> d_rel;  // max over times of abs_err / |value_model|, per eps
    bool strictly_decreasing = false;
    double truncation_influence = 0;  // scaled regime: change of H_Z under doubling R
    std::vector<std::string> notes;
};

DecayTable heat_probe(const WarpFamily& fam, const std::vector<double>& schedule, const ProbeSpec& spec);

std::vector<double> default_probe_times(Regime r);

double g0_profile(int n, const std::vector<double>& X);

struct FiberCheck {
    double fiber_residual = 0;      // max |[sum D_i^2 + (R + n)/2] G0| over samples
    double transform_residual = 0;  // max |(xi d_xi + 2 |xi|^2) u_hat| over samples
    double u_hat_0 = 0;
    double mass = 0;  // trapezoid integral of G0 over the fiber
};

FiberCheck g0_fiber_check(int n, double h);

// Trapezoid-rule value of the integral of the Euclidean kernel over R^n.
double euclidean_mass(int n, double t, double h);

// Kernel on a spatial quadrature grid: K(t) is the matrix of values at nodes (i, j).
using GridKernel = std::function<Eigen::MatrixXd(double)>;

struct ConvolutionOptions {
    int panels = 16;
    double tolerance = 1e-9;
};

// (A * B)(t) = int_0^t sum_k A(t - s)_{ik} w_k B(s)_{kj} ds by composite Gauss
// quadrature; the estimate compares against half the panel count.
Eigen::MatrixXd t_convolve(const GridKernel& A, const GridKernel& B, const std::vector<double>& weights, double t,
                           const ConvolutionOptions& opt = {});

// Kernel sampled on a uniform time grid t_m = m T / M, evaluated between samples
// by local degree-7 Lagrange interpolation.
struct SampledKernel {
    double T = 1;
    std::vector<Eigen::MatrixXd> values;
    Eigen::MatrixXd at(double t) const;
};

SampledKernel sample_kernel(const GridKernel& K, double T, int M);

struct NeumannTable {
    std::vector<double> sup;      // sup over [0, T] and nodes of |K^{*j}|, j = 1..j_max
    std::vector<double> ratio;    // sup[j+1] / sup[j]
    std::vector<double> c_hat;    // smallest C with sup_j <= C^j T^j / (j+1)!
    bool factorial_decay = false; // ratio[j] < T / j for every j
    std::string witness;
};

NeumannTable volterra_neumann(const GridKernel& K, const std::vector<double>& weights, double T, int j_max,
                              int samples = 256);

struct MaxPrincipleSample {
    double t, E, K;
};

struct MaxPrincipleResult {
    bool ok = true;
    std::size_t witness = 0;
    double lhs = 0, rhs = 0;
};

// Checks |E|^2 <= e^T C eps^2 t^{2N} at every sample, after verifying the
// hypotheses |K| <= C eps^2 t^{2N} and E = 0 at t = 0.
MaxPrincipleResult max_principle_check(const std::vector<MaxPrincipleSample>& samples, double C, int N, double T,
                                       double eps);

} // namespace acclab

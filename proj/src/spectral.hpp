#pragma once

#include "model_geometry.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acclab {

class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SLGrid {
    enum class Spacing { uniform, graded };
    int N = 2048;
    Spacing spacing = Spacing::graded;
    double a = 0.0, b = 1.0;
    // Graded nodes cluster at x = 0 like |xi|^grading; on intervals straddling 0
    // the map is applied symmetrically.
    double grading = 2.0;

    std::vector<double> nodes() const;
    SLGrid refined() const;
};

SLGrid default_grid(const RadialOperator& op, int N);

// Vertex-centred finite-volume discretization of the transformed operator with
// lumped mass. Unknowns are v at nodes [first, last]; Dirichlet nodes are dropped.
struct DiscreteOperator {
    std::vector<double> x;
    int first = 0, last = 0;
    std::vector<double> k_diag, k_off;  // stiffness on active nodes, k_off[i] couples i, i+1
    std::vector<double> mass;           // lumped W-mass per active node
    double gamma = 0.0;

    int size() const { return last - first + 1; }
};

DiscreteOperator discretize(const RadialOperator& op, const SLGrid& grid);

struct ModeSolution {
    std::vector<double> lambda;
    std::vector<std::vector<double>> v;  // per eigenpair, values of v on all grid nodes
    std::vector<double> x;
    std::vector<double> mass;  // lumped mass on all nodes (0 on Dirichlet nodes)
    double gamma = 0.0;

    // Eigenfunction u_k = |x|^gamma v_k, linearly interpolated in v.
    double u(std::size_t k, double x) const;
};

ModeSolution solve_mode(const RadialOperator& op, const SLGrid& grid, int count);

struct RichardsonPair {
    std::vector<double> lambda;  // values on the refined grid
    std::vector<double> err;     // |lambda_2N - lambda_N| / 3
};

// Solves on grid and grid.refined(). Throws when an estimate exceeds rel_tol * lambda.
RichardsonPair solve_mode_richardson(const RadialOperator& op, const SLGrid& grid, int count,
                                     double rel_tol = 1e-2);

double bessel_zero(double nu, int k);

struct EigenEntry {
    double lambda = 0, err = 0;
    double mu = 0;
    int ell = 0;
    int mult = 1;
    int k = 1;  // radial index within the mode, from 1
};

struct EigenResult {
    double eps = 0;
    std::vector<EigenEntry> entries;  // sorted by lambda
    double tail_bound = 0;            // lower bound for any mode beyond the truncation
    // Leading entries guaranteed complete: below the tail bound and below the last
    // computed eigenvalue of every mode.
    int complete_count = 0;
    std::vector<std::string> notes;
};

EigenResult conic_reference_spectrum(const WarpFamily& fam, int per_mode);

struct SpectrumOptions {
    int N = 2048;
    int per_mode = 10;
    int jobs = 1;
    // Count of merged eigenvalues that must lie below the tail bound; 0 disables the check.
    int require_complete = 0;
    // Bound on the Richardson estimate relative to each eigenvalue.
    double rel_tol = 1e-2;
};

EigenResult assemble_spectrum(const WarpFamily& fam, double eps, const SpectrumOptions& opt);

struct Cluster {
    double center = 0;
    double window = 0;
    double discretization_err = 0;
    int multiplicity = 0;
    std::vector<std::pair<int, int>> curves;  // (ell, k)
    bool matched = false;
    double reference = 0;
    int reference_multiplicity = 0;
    double gap = 0;
    double tolerance = 0;
};

struct CurveSummary {
    int ell = 0, k = 1, mult = 1;
    double mu = 0;
    std::vector<double> lambda;  // along the schedule
    std::vector<double> err;
    std::vector<double> rates;  // empirical order from consecutive triples
    double limit = 0;           // accumulation estimate
    double limit_shift = 0;     // |limit - lambda at smallest eps|
    double discretization_err = 0;
    double extrapolation_err = 0;
    double window = 0;
};

struct SpectralFlow {
    std::vector<double> schedule;
    std::vector<EigenResult> spectra;
    std::vector<CurveSummary> curves;
    std::vector<Cluster> clusters;
    std::vector<Cluster> references;  // reference clusters considered
    std::vector<std::string> unmatched;
    bool computed_in_reference = false;
    bool reference_in_computed = false;
    bool multiplicities_match = false;
    std::string verdict;
};

struct FlowOptions {
    SpectrumOptions spectrum;
    int cluster_count = 10;
    int extrapolation_points = 4;
};

std::vector<double> default_schedule();

SpectralFlow spectral_flow(const WarpFamily& fam, const std::vector<double>& schedule, const FlowOptions& opt);

struct TrialFunction {
    std::function<double(double)> u;
};

// Upper bounds for the first dim eigenvalues of the discrete problem: Galerkin
// eigenvalues of the discrete quadratic form restricted to the sampled trial space.
std::vector<double> rayleigh_minimax_bound(const RadialOperator& op, const SLGrid& grid,
                                           const std::vector<TrialFunction>& trials);

} // namespace acclab

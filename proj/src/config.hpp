#pragma once

#include "heat.hpp"
#include "model_geometry.hpp"
#include "spectral.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace acclab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Experiment configuration, read from an INI file:
//
//   [model]     n, c, profile (neck|capped), cap_match_radius, outer_bc (dirichlet|neumann),
//               mode_count (spherical-harmonic degrees 0..mode_count-1), potential
//   [schedule]  eps = comma-separated, strictly decreasing
//   [solver]    N, scheme (fv_lumped), per_mode, cluster_count, extrapolation_points,
//               tolerance, require_complete
//   [probes]    regime, x, xprime, times, N, h_rho, R_z, count
//   [outputs]   dir, prefix, formats (csv,json)
//
// Missing keys keep their defaults; unknown keys are errors.
struct ExperimentConfig {
    WarpFamily model = WarpFamily::make(3, 1.0, Profile::capped, 4);
    int mode_count = 5;
    std::vector<double> schedule = default_schedule();

    std::string scheme = "fv_lumped";
    int N = 2048;
    int per_mode = 10;
    int cluster_count = 10;
    int extrapolation_points = 4;
    double tolerance = 1e-2;
    int require_complete = 0;

    ProbeSpec probe;

    std::string out_dir = ".";
    std::string prefix;
    bool write_csv = true;
    bool write_json = true;

    void validate() const;
    SpectrumOptions spectrum_options(int jobs) const;
    FlowOptions flow_options(int jobs) const;
};

ExperimentConfig parse_config(const std::string& ini_text);
ExperimentConfig load_config(const std::string& path);

std::vector<double> parse_list(const std::string& text);

} // namespace acclab

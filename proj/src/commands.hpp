#pragma once

#include "config.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace acclab {

// A named output file held in memory; callers decide where it is written.
struct Artifact {
    std::string name;
    std::string content;
};

struct CommandResult {
    int status = 0;        // process exit code the command asks for
    std::string text;      // human-readable report
    nlohmann::json summary;
    std::vector<Artifact> artifacts;
};

// 17 significant digits, '.' decimal point, independent of the global locale.
std::string format_number(double v);

CommandResult cmd_faces(const std::string& space_kind, int n = 3);
CommandResult cmd_lift(const std::string& map, const std::string& monomial);
// Orders are CalculusOrders JSON documents; the calculus name selects the rule.
CommandResult cmd_compose(const std::string& calculus, const std::string& a_json, const std::string& b_json);
CommandResult cmd_spectrum(const ExperimentConfig& cfg, int jobs);
CommandResult cmd_flow(const ExperimentConfig& cfg, int jobs);
// The optional regime overrides the config's probe regime.
CommandResult cmd_heat(const ExperimentConfig& cfg, int jobs, const std::string& regime = {});
CommandResult cmd_verify_tables();

std::string spectrum_csv(const std::vector<EigenResult>& spectra);
std::string heat_csv(const DecayTable& tab);
nlohmann::json clusters_json(const std::vector<Cluster>& clusters);
nlohmann::json decay_json(const DecayTable& tab);

} // namespace acclab

#pragma once

#include "corner_blowup.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace acclab {

// One golden-table comparison. A check passes when no row mismatches.
struct AuditCheck {
    std::string name;
    std::string table;   // golden file
    std::string origin;  // "embedded" or the override path
    int rows = 0;
    std::vector<std::string> mismatches;
    std::vector<std::string> notes;

    bool ok() const { return mismatches.empty() && rows > 0; }
};

AuditCheck audit_lift_table();
// Closed-form sc composition against the final table and the pushforward pipeline
// on random order assignments; b and conic composition rules; conic thresholds.
AuditCheck audit_composition(int random_trials = 20, std::uint64_t seed = 0x5eed0002);
AuditCheck audit_face_inventories();
AuditCheck audit_kernel_orders();
AuditCheck audit_lifted_operator();
AuditCheck audit_densities();
AuditCheck audit_pushforward_map();

std::vector<AuditCheck> audit_all();
nlohmann::json audit_to_json(const std::vector<AuditCheck>& checks);

struct FaceReport {
    std::string kind;
    std::string scope;  // which faces the table compares: all, restriction or prefix <p>
    int total_faces = 0;
    std::vector<std::pair<std::string, std::string>> faces;  // (name, origin) in scope, construction order
    std::vector<Corner> corners;
    bool golden_match = false;
    std::vector<std::string> diff;
};

FaceReport face_report(SpaceKind kind, int n = 3);
nlohmann::json face_report_json(const FaceReport& r);
std::string face_report_table(const FaceReport& r);

struct LiftReport {
    std::string map, input, output;
    bool golden_checked = false;
    bool golden_match = false;
    std::string expected;
};

// Lift of a monomial in rho_* notation under beta_L, beta_R or beta_C on the sc
// triple heat space.
LiftReport lift_report(const std::string& map, const std::string& monomial);

} // namespace acclab

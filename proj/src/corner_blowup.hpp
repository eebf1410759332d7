#pragma once

#include "affine.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acclab {

class BlowupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FaceOrigin { original_boundary, radial_blowup, parabolic_blowup, restriction };

const char* origin_name(FaceOrigin o);
FaceOrigin origin_from_name(const std::string& s);

struct FaceId {
    std::string name;
    FaceOrigin origin = FaceOrigin::original_boundary;
    Affine center_codim{0};
    bool reconstructed = false;
};

// Product of boundary defining functions; faces keep their first-insertion order.
struct Monomial {
    std::vector<std::pair<std::string, Affine>> terms;
    bool prefactor_smooth = true;

    Monomial() = default;
    Monomial(std::initializer_list<std::pair<std::string, Affine>> init);

    void add(const std::string& face, const Affine& e);
    Monomial& mul(const Monomial& o);
    Monomial pow(Rational s) const;
    void prune();
    Affine exponent(const std::string& face) const;
    bool is_one() const;
    // Faces printed as rho_<suffix>, joined by a middle dot; "1" for the empty product.
    std::string str() const;

    friend bool operator==(const Monomial& a, const Monomial& b);
    friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }
};

std::string face_to_rho(const std::string& face);
std::string rho_to_face(const std::string& rho);

Monomial parse_monomial(const std::string& text);

struct BlowupCenter {
    std::vector<std::string> contained_in_faces;
    std::string diagonal_tag;
    std::vector<std::string> parabolic_directions;
    Affine codim{2};
};

struct Corner {
    std::string name;
    std::vector<std::string> faces;
};

// One step of a construction: a blowup, a new original face, a new scalar
// variable, or the restriction to a level set that pairs two face groups.
struct HistoryEntry {
    enum class Kind { blowup, add_face, add_variable, restriction };
    Kind kind = Kind::blowup;
    BlowupCenter center;
    std::string new_face;
    std::string variable;
    Monomial variable_lift;
    std::vector<std::string> group_a, group_b;
    std::vector<std::string> corner_faces;
    bool reconstructed = false;
};

struct JacobianConfig {
    std::map<std::string, Affine> overrides;
};

class CornerSpace {
public:
    std::string name;
    int n = 3;
    std::vector<FaceId> faces;
    std::vector<HistoryEntry> history;
    std::map<std::string, Monomial> scalar_vars;
    std::vector<Corner> corners;
    JacobianConfig jacobian;

    bool has_face(const std::string& f) const;
    const FaceId& face(const std::string& f) const;
    std::vector<std::string> face_names() const;
};

// Pullback of boundary defining functions under a b-map: rows are target
// faces, entries are exponents of source faces.
struct BMapSpec {
    std::string name;
    std::string source;
    std::string target;
    std::vector<std::string> target_faces;
    std::vector<std::string> source_faces;
    std::map<std::string, Monomial> lifts;
};

CornerSpace empty_space(const std::string& name, int n);
CornerSpace add_face(CornerSpace s, const std::string& face, bool reconstructed = false);
CornerSpace add_variable(CornerSpace s, const std::string& var, const Monomial& lift);
CornerSpace blow_up(CornerSpace s, const BlowupCenter& center, const std::string& new_face);
// Restriction to a level set such as {eps = eps'}: each pair (a, b) of faces from the
// two groups becomes one face, triples meeting both groups become corners, and the
// listed blown-up faces become corners lying in every paired face.
CornerSpace restrict_pairing(CornerSpace s, const std::vector<std::string>& group_a,
                             const std::vector<std::string>& group_b,
                             const std::vector<std::string>& corner_faces = {});

// Replays a history from scratch.
CornerSpace replay(const std::string& name, int n, const std::vector<HistoryEntry>& history,
                   const JacobianConfig& jac = {});

// Blowdown map of a single blowup step, as a b-map from the new space to the old.
BMapSpec blowdown_map(const CornerSpace& before, const HistoryEntry& step);
std::vector<BMapSpec> blowdown_chain(const CornerSpace& space);

Monomial lift_monomial(const std::vector<BMapSpec>& chain, const Monomial& m);
Monomial lift_monomial(const BMapSpec& map, const Monomial& m);

struct LiftingMatrix {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<std::vector<Affine>> e;
};

LiftingMatrix lifting_matrix(const BMapSpec& f);

struct FibrationWitness {
    bool ok = true;
    std::string column;
    std::string row1, row2;
};

FibrationWitness is_b_fibration(const BMapSpec& f);
BMapSpec identity_map(const CornerSpace& s);

// Jacobian exponent of the blowup creating `face` (defaults: radial codim c -> c-1,
// parabolic with one direction -> c; per-face overrides win).
Affine jacobian_exponent(const CornerSpace& s, const std::string& face);
// Lift of weight * mu through the blowup history of s, as exponents relative to a
// smooth nonvanishing density on s.
Monomial density_lift(const CornerSpace& s, const Monomial& weight);

enum class SpaceKind {
    b_heat,
    conic_heat,
    sc_heat,
    acc_double,
    acc_heat,
    sc_triple_heat,
    conic_triple_heat,
    acc_triple_heat
};

const char* space_kind_name(SpaceKind k);
std::optional<SpaceKind> space_kind_from_name(const std::string& s);
std::vector<SpaceKind> all_space_kinds();

CornerSpace build_space(SpaceKind kind, int n = 3);

nlohmann::json space_to_json(const CornerSpace& s);
nlohmann::json history_to_json(const std::vector<HistoryEntry>& h);
std::vector<HistoryEntry> history_from_json(const nlohmann::json& j);

// Partial b-maps of the sc triple heat space onto its three double-space copies,
// given by their printed lifting data; and the face correspondence used for pushforward.
BMapSpec sc_triple_lift_map(const std::string& which, int n = 3);
// The same maps computed from the construction: a triple face lies in the lift of
// a double face when its generic point projects into that face. The projection
// keeps two spatial factors and one time variable; a face's generic point is read
// off from the scalar variables vanishing on it and its diagonal tag.
BMapSpec sc_triple_lift_map_derived(const std::string& which, int n = 3);
BMapSpec sc_triple_pushforward_map(int n = 3);

bool space_equal(const CornerSpace& a, const CornerSpace& b);

} // namespace acclab

#include "corner_blowup.hpp"

#include "golden.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace acclab {

const char* origin_name(FaceOrigin o) {
    switch (o) {
    case FaceOrigin::original_boundary: return "original_boundary";
    case FaceOrigin::radial_blowup: return "radial_blowup";
    case FaceOrigin::parabolic_blowup: return "parabolic_blowup";
    case FaceOrigin::restriction: return "restriction";
    }
    return "?";
}

FaceOrigin origin_from_name(const std::string& s) {
    for (auto o : {FaceOrigin::original_boundary, FaceOrigin::radial_blowup, FaceOrigin::parabolic_blowup,
                   FaceOrigin::restriction})
        if (s == origin_name(o)) return o;
    throw BlowupError("unknown face origin '" + s + "'");
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::initializer_list<std::pair<std::string, Affine>> init) {
    for (const auto& [f, e] : init) add(f, e);
}

void Monomial::add(const std::string& face, const Affine& e) {
    for (auto& [f, x] : terms)
        if (f == face) { x += e; return; }
    terms.emplace_back(face, e);
}

Monomial& Monomial::mul(const Monomial& o) {
    for (const auto& [f, e] : o.terms) add(f, e);
    prefactor_smooth = prefactor_smooth && o.prefactor_smooth;
    prune();
    return *this;
}

Monomial Monomial::pow(Rational s) const {
    Monomial out = *this;
    for (auto& [f, e] : out.terms) e = e * s;
    out.prune();
    return out;
}

void Monomial::prune() {
    std::erase_if(terms, [](const auto& t) { return t.second == Affine{}; });
}

Affine Monomial::exponent(const std::string& face) const {
    for (const auto& [f, e] : terms)
        if (f == face) return e;
    return {};
}

bool Monomial::is_one() const {
    return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.second == Affine{}; });
}

std::string face_to_rho(const std::string& face) {
    if (face.rfind("F_", 0) == 0) return "rho_" + face.substr(2);
    return "rho[" + face + "]";
}

std::string rho_to_face(const std::string& rho) {
    if (rho.rfind("rho_", 0) == 0) return "F_" + rho.substr(4);
    if (rho.rfind("rho[", 0) == 0 && rho.back() == ']') return rho.substr(4, rho.size() - 5);
    return rho;
}

std::string Monomial::str() const {
    std::string out;
    for (const auto& [f, e] : terms) {
        if (e == Affine{}) continue;
        if (!out.empty()) out += "·";
        out += face_to_rho(f);
        if (e != Affine{1}) {
            std::string es = e.str();
            bool simple = e.is_constant() && e.a.denominator() == 1 && e.a > 0;
            out += "^" + (simple ? es : "(" + es + ")");
        }
    }
    return out.empty() ? "1" : out;
}

bool operator==(const Monomial& a, const Monomial& b) {
    std::map<std::string, Affine> x, y;
    for (const auto& [f, e] : a.terms) x[f] += e;
    for (const auto& [f, e] : b.terms) y[f] += e;
    std::erase_if(x, [](const auto& t) { return t.second == Affine{}; });
    std::erase_if(y, [](const auto& t) { return t.second == Affine{}; });
    return x == y;
}

Monomial parse_monomial(const std::string& text) {
    // Factors separated by whitespace, '*' or a middle dot; each is rho_X, F_X or
    // rho[X], optionally followed by ^exp with exp an affine expression.
    std::string s = text;
    for (std::size_t p; (p = s.find("·")) != std::string::npos;) s.replace(p, 2, " ");
    std::replace(s.begin(), s.end(), '*', ' ');
    Monomial m;
    std::istringstream in(s);
    for (std::string tok; in >> tok;) {
        if (tok == "1") continue;
        Affine e{1};
        auto caret = tok.find('^');
        std::string base = tok.substr(0, caret);
        if (caret != std::string::npos) {
            std::string es = tok.substr(caret + 1);
            try {
                e = parse_affine(es);
            } catch (const std::exception& ex) {
                throw BlowupError("bad exponent in monomial '" + text + "': " + ex.what());
            }
        }
        if (base.rfind("rho", 0) != 0 && base.rfind("F_", 0) != 0 && base.find('_') == std::string::npos)
            throw BlowupError("bad factor '" + tok + "' in monomial '" + text + "'");
        m.add(rho_to_face(base), e);
    }
    m.prune();
    return m;
}

// ---------------------------------------------------------------- CornerSpace

bool CornerSpace::has_face(const std::string& f) const {
    return std::any_of(faces.begin(), faces.end(), [&](const FaceId& x) { return x.name == f; });
}

const FaceId& CornerSpace::face(const std::string& f) const {
    for (const auto& x : faces)
        if (x.name == f) return x;
    throw BlowupError("space " + name + " has no face " + f);
}

std::vector<std::string> CornerSpace::face_names() const {
    std::vector<std::string> out;
    for (const auto& f : faces) out.push_back(f.name);
    return out;
}

CornerSpace empty_space(const std::string& name, int n) {
    CornerSpace s;
    s.name = name;
    s.n = n;
    return s;
}

CornerSpace add_face(CornerSpace s, const std::string& face, bool reconstructed) {
    if (s.has_face(face)) throw BlowupError("duplicate face " + face);
    s.faces.push_back({face, FaceOrigin::original_boundary, Affine{1}, reconstructed});
    HistoryEntry h;
    h.kind = HistoryEntry::Kind::add_face;
    h.new_face = face;
    h.reconstructed = reconstructed;
    s.history.push_back(h);
    return s;
}

CornerSpace add_variable(CornerSpace s, const std::string& var, const Monomial& lift) {
    if (s.scalar_vars.count(var)) throw BlowupError("duplicate variable " + var);
    for (const auto& [f, e] : lift.terms)
        if (!s.has_face(f)) throw BlowupError("variable " + var + " refers to unknown face " + f);
    s.scalar_vars[var] = lift;
    HistoryEntry h;
    h.kind = HistoryEntry::Kind::add_variable;
    h.variable = var;
    h.variable_lift = lift;
    s.history.push_back(h);
    return s;
}

namespace {

// Exponent of the new defining function in the lift of rho_f: twice the face
// weight along parabolic directions, once for radial ones, zero off the center.
std::map<std::string, Affine> face_weights(const CornerSpace& s, const BlowupCenter& c) {
    std::set<std::string> parabolic_faces;
    for (const auto& v : c.parabolic_directions) {
        auto it = s.scalar_vars.find(v);
        if (it == s.scalar_vars.end()) throw BlowupError("unknown parabolic direction " + v);
        for (const auto& [f, e] : it->second.terms)
            if (e != Affine{}) parabolic_faces.insert(f);
    }
    std::map<std::string, Affine> w;
    for (const auto& f : c.contained_in_faces) w[f] = parabolic_faces.count(f) ? Affine{2} : Affine{1};
    return w;
}

void validate_center(const CornerSpace& s, const BlowupCenter& c, const std::string& new_face) {
    if (c.contained_in_faces.empty()) throw BlowupError("blowup center for " + new_face + " lies in no face");
    std::set<std::string> seen;
    for (const auto& f : c.contained_in_faces) {
        if (!s.has_face(f)) throw BlowupError("blowup center for " + new_face + " refers to unknown face " + f);
        if (!seen.insert(f).second) throw BlowupError("face " + f + " repeated in center of " + new_face);
    }
    if (c.diagonal_tag.empty() && c.codim.value(s.n) < 2)
        throw BlowupError("center of " + new_face + " has codimension < 2 and no diagonal tag");
    if (s.has_face(new_face)) throw BlowupError("duplicate face " + new_face);
}

std::string or_pattern(const std::vector<std::string>& faces) {
    std::string acc;
    for (const auto& f : faces) {
        std::string d = f.substr(f.find('_') + 1);
        if (acc.empty()) acc = d;
        if (d.size() != acc.size()) throw BlowupError("face labels of different length in restriction: " + f);
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d[i] != '0') acc[i] = d[i];
    }
    return acc;
}

} // namespace

CornerSpace blow_up(CornerSpace s, const BlowupCenter& center, const std::string& new_face) {
    validate_center(s, center, new_face);
    auto w = face_weights(s, center);
    for (auto& [v, m] : s.scalar_vars) {
        Affine e{};
        for (const auto& [f, x] : m.terms) {
            auto it = w.find(f);
            if (it != w.end()) e += Affine{x.a * it->second.a, x.b * it->second.a};
        }
        if (e != Affine{}) m.add(new_face, e);
    }
    FaceOrigin o = center.parabolic_directions.empty() ? FaceOrigin::radial_blowup : FaceOrigin::parabolic_blowup;
    s.faces.push_back({new_face, o, center.codim, false});
    HistoryEntry h;
    h.kind = HistoryEntry::Kind::blowup;
    h.center = center;
    h.new_face = new_face;
    s.history.push_back(h);
    return s;
}

CornerSpace restrict_pairing(CornerSpace s, const std::vector<std::string>& group_a,
                             const std::vector<std::string>& group_b,
                             const std::vector<std::string>& corner_faces) {
    if (group_a.empty() || group_b.empty()) throw BlowupError("restriction needs two non-empty face groups");
    for (const auto& f : group_a)
        if (!s.has_face(f)) throw BlowupError("restriction refers to unknown face " + f);
    for (const auto& f : group_b)
        if (!s.has_face(f)) throw BlowupError("restriction refers to unknown face " + f);
    for (const auto& f : corner_faces)
        if (!s.has_face(f)) throw BlowupError("restriction refers to unknown face " + f);

    std::map<std::string, std::vector<std::string>> pairs_of;
    std::vector<std::string> new_faces;
    auto pair_name = [](const std::string& a, const std::string& b) { return "F_" + or_pattern({a, b}); };
    for (const auto& a : group_a)
        for (const auto& b : group_b) {
            std::string p = pair_name(a, b);
            new_faces.push_back(p);
            pairs_of[a].push_back(p);
            pairs_of[b].push_back(p);
        }

    // rho_a vanishes exactly on the paired faces through a.
    for (auto& [v, m] : s.scalar_vars) {
        Monomial out;
        out.prefactor_smooth = m.prefactor_smooth;
        for (const auto& [f, e] : m.terms) {
            auto it = pairs_of.find(f);
            if (it == pairs_of.end()) {
                if (std::find(corner_faces.begin(), corner_faces.end(), f) != corner_faces.end()) continue;
                out.add(f, e);
            } else {
                for (const auto& p : it->second) out.add(p, e);
            }
        }
        out.prune();
        m = out;
    }

    std::vector<FaceId> faces;
    for (const auto& f : s.faces) {
        bool grouped = pairs_of.count(f.name) ||
                       std::find(corner_faces.begin(), corner_faces.end(), f.name) != corner_faces.end();
        if (!grouped) faces.push_back(f);
    }
    for (const auto& p : new_faces) {
        if (std::any_of(faces.begin(), faces.end(), [&](const FaceId& x) { return x.name == p; }))
            throw BlowupError("restriction produces duplicate face " + p);
        faces.push_back({p, FaceOrigin::restriction, Affine{1}, false});
    }
    s.faces = faces;

    // Triples drawing two faces from one group and one from the other.
    auto add_triples = [&](const std::vector<std::string>& two, const std::vector<std::string>& one, bool two_first) {
        for (std::size_t i = 0; i < two.size(); ++i)
            for (std::size_t j = i + 1; j < two.size(); ++j)
                for (const auto& c : one) {
                    Corner k;
                    k.name = "C_" + or_pattern({two[i], two[j], c});
                    for (const auto& t : {two[i], two[j]})
                        k.faces.push_back(two_first ? pair_name(t, c) : pair_name(c, t));
                    s.corners.push_back(k);
                }
    };
    add_triples(group_a, group_b, true);
    add_triples(group_b, group_a, false);
    if (!corner_faces.empty()) {
        std::vector<std::string> all = group_a;
        all.insert(all.end(), group_b.begin(), group_b.end());
        for (const auto& cf : corner_faces) {
            (void)cf;
            s.corners.push_back({"C_" + or_pattern(all), new_faces});
        }
    }

    HistoryEntry h;
    h.kind = HistoryEntry::Kind::restriction;
    h.group_a = group_a;
    h.group_b = group_b;
    h.corner_faces = corner_faces;
    s.history.push_back(h);
    return s;
}

CornerSpace replay(const std::string& name, int n, const std::vector<HistoryEntry>& history,
                   const JacobianConfig& jac) {
    CornerSpace s = empty_space(name, n);
    s.jacobian = jac;
    for (const auto& h : history) {
        switch (h.kind) {
        case HistoryEntry::Kind::add_face: s = add_face(std::move(s), h.new_face, h.reconstructed); break;
        case HistoryEntry::Kind::add_variable: s = add_variable(std::move(s), h.variable, h.variable_lift); break;
        case HistoryEntry::Kind::blowup: s = blow_up(std::move(s), h.center, h.new_face); break;
        case HistoryEntry::Kind::restriction:
            s = restrict_pairing(std::move(s), h.group_a, h.group_b, h.corner_faces);
            break;
        }
    }
    return s;
}

// ---------------------------------------------------------------- b-maps

BMapSpec blowdown_map(const CornerSpace& before, const HistoryEntry& step) {
    if (step.kind != HistoryEntry::Kind::blowup) throw BlowupError("blowdown map requested for a non-blowup step");
    CornerSpace after = blow_up(before, step.center, step.new_face);
    BMapSpec m;
    m.name = "blowdown:" + step.new_face;
    m.source = before.name + "+" + step.new_face;
    m.target = before.name;
    m.source_faces = after.face_names();
    m.target_faces = before.face_names();
    auto w = face_weights(before, step.center);
    for (const auto& f : m.target_faces) {
        Monomial l{{f, Affine{1}}};
        auto it = w.find(f);
        if (it != w.end()) l.add(step.new_face, it->second);
        m.lifts[f] = l;
    }
    return m;
}

std::vector<BMapSpec> blowdown_chain(const CornerSpace& space) {
    std::vector<BMapSpec> chain;
    CornerSpace cur = empty_space(space.name, space.n);
    for (const auto& h : space.history) {
        if (h.kind == HistoryEntry::Kind::blowup) {
            chain.push_back(blowdown_map(cur, h));
            cur = blow_up(std::move(cur), h.center, h.new_face);
        } else {
            std::vector<HistoryEntry> prefix(space.history.begin(), space.history.begin() + (&h - space.history.data()) + 1);
            cur = replay(space.name, space.n, prefix, space.jacobian);
        }
    }
    return chain;
}

Monomial lift_monomial(const BMapSpec& map, const Monomial& m) {
    Monomial out;
    out.prefactor_smooth = m.prefactor_smooth;
    for (const auto& [f, e] : m.terms) {
        auto it = map.lifts.find(f);
        if (it == map.lifts.end()) {
            // A blowdown map fixes faces created after its own step.
            bool known = std::find(map.target_faces.begin(), map.target_faces.end(), f) != map.target_faces.end();
            if (known || map.name.rfind("blowdown:", 0) != 0)
                throw BlowupError("map " + map.name + " has no lift for face " + f);
            out.add(f, e);
            continue;
        }
        for (const auto& [g, x] : it->second.terms) {
            if (!e.is_constant() && !x.is_constant())
                throw BlowupError("non-affine exponent while lifting " + f + " through " + map.name);
            Affine prod = x.is_constant() ? e * x.a : x * e.a;
            out.add(g, prod);
        }
    }
    out.prune();
    return out;
}

Monomial lift_monomial(const std::vector<BMapSpec>& chain, const Monomial& m) {
    Monomial cur = m;
    for (const auto& b : chain) cur = lift_monomial(b, cur);
    return cur;
}

LiftingMatrix lifting_matrix(const BMapSpec& f) {
    LiftingMatrix L;
    L.rows = f.target_faces;
    L.cols = f.source_faces;
    for (const auto& r : L.rows) {
        auto it = f.lifts.find(r);
        if (it == f.lifts.end()) throw BlowupError("map " + f.name + " has no lift for face " + r);
        std::vector<Affine> row;
        for (const auto& c : L.cols) {
            Affine e = it->second.exponent(c);
            if (!e.is_constant() || e.a.denominator() != 1 || e.a < 0)
                throw BlowupError("map " + f.name + " is not a b-map: exponent " + e.str() + " of " + c + " in lift of " + r);
            row.push_back(e);
        }
        for (const auto& [g, e] : it->second.terms)
            if (std::find(L.cols.begin(), L.cols.end(), g) == L.cols.end())
                throw BlowupError("lift of " + r + " under " + f.name + " uses unknown source face " + g);
        L.e.push_back(row);
    }
    return L;
}

FibrationWitness is_b_fibration(const BMapSpec& f) {
    LiftingMatrix L = lifting_matrix(f);
    for (std::size_t j = 0; j < L.cols.size(); ++j) {
        std::size_t hit = L.rows.size();
        for (std::size_t i = 0; i < L.rows.size(); ++i) {
            if (L.e[i][j] == Affine{}) continue;
            if (hit != L.rows.size()) return {false, L.cols[j], L.rows[hit], L.rows[i]};
            hit = i;
        }
    }
    return {};
}

BMapSpec identity_map(const CornerSpace& s) {
    BMapSpec m;
    m.name = "id:" + s.name;
    m.source = m.target = s.name;
    m.source_faces = m.target_faces = s.face_names();
    for (const auto& f : m.target_faces) m.lifts[f] = Monomial{{f, Affine{1}}};
    return m;
}

// ---------------------------------------------------------------- densities

Affine jacobian_exponent(const CornerSpace& s, const std::string& face) {
    auto ov = s.jacobian.overrides.find(face);
    if (ov != s.jacobian.overrides.end()) return ov->second;
    const FaceId& f = s.face(face);
    switch (f.origin) {
    case FaceOrigin::radial_blowup: return f.center_codim - Affine{1};
    case FaceOrigin::parabolic_blowup: {
        // one extra unit per parabolic direction beyond the radial count
        for (const auto& h : s.history)
            if (h.kind == HistoryEntry::Kind::blowup && h.new_face == face)
                return f.center_codim - Affine{1} + Affine{static_cast<std::int64_t>(h.center.parabolic_directions.size())};
        return f.center_codim;
    }
    default: return {};
    }
}

Monomial density_lift(const CornerSpace& s, const Monomial& weight) {
    Monomial out = lift_monomial(blowdown_chain(s), weight);
    for (const auto& h : s.history) {
        if (h.kind != HistoryEntry::Kind::blowup) continue;
        out.add(h.new_face, jacobian_exponent(s, h.new_face));
    }
    out.prune();
    return out;
}

// ---------------------------------------------------------------- named spaces

const char* space_kind_name(SpaceKind k) {
    switch (k) {
    case SpaceKind::b_heat: return "b_heat";
    case SpaceKind::conic_heat: return "conic_heat";
    case SpaceKind::sc_heat: return "sc_heat";
    case SpaceKind::acc_double: return "acc_double";
    case SpaceKind::acc_heat: return "acc_heat";
    case SpaceKind::sc_triple_heat: return "sc_triple_heat";
    case SpaceKind::conic_triple_heat: return "conic_triple_heat";
    case SpaceKind::acc_triple_heat: return "acc_triple_heat";
    }
    return "?";
}

std::vector<SpaceKind> all_space_kinds() {
    return {SpaceKind::b_heat,         SpaceKind::conic_heat,        SpaceKind::sc_heat,
            SpaceKind::acc_double,     SpaceKind::acc_heat,          SpaceKind::sc_triple_heat,
            SpaceKind::conic_triple_heat, SpaceKind::acc_triple_heat};
}

std::optional<SpaceKind> space_kind_from_name(const std::string& s) {
    for (auto k : all_space_kinds())
        if (s == space_kind_name(k)) return k;
    return std::nullopt;
}

namespace {

using Faces = std::vector<std::string>;
using Dirs = std::vector<std::string>;

struct Builder {
    CornerSpace s;
    Builder(const std::string& name, int n) : s(empty_space(name, n)) {}
    Builder& face(const std::string& f, bool reconstructed = false) {
        s = add_face(std::move(s), f, reconstructed);
        return *this;
    }
    Builder& var(const std::string& v, const Monomial& m) {
        s = add_variable(std::move(s), v, m);
        return *this;
    }
    Builder& radial(const std::string& f, Faces in, Affine codim, std::string diag = {}) {
        s = blow_up(std::move(s), {std::move(in), std::move(diag), {}, codim}, f);
        return *this;
    }
    Builder& parabolic(const std::string& f, Faces in, Dirs dirs, Affine codim, std::string diag = {}) {
        s = blow_up(std::move(s), {std::move(in), std::move(diag), std::move(dirs), codim}, f);
        return *this;
    }
    Builder& restrict_to(Faces a, Faces b, Faces corner = {}) {
        s = restrict_pairing(std::move(s), a, b, corner);
        return *this;
    }
};

Monomial rho(const std::string& f) { return Monomial{{f, Affine{1}}}; }

const Affine N = Affine::dim();

CornerSpace build_b_heat(int n) {
    Builder b("b_heat", n);
    b.face("F_100").face("F_010").face("F_001");
    b.var("x", rho("F_100")).var("x'", rho("F_010")).var("t", rho("F_001"));
    b.radial("F_110", {"F_100", "F_010"}, 2);
    b.parabolic("F_d2", {"F_001"}, {"t"}, N + Affine{1}, "Delta(MxM)");
    return b.s;
}

CornerSpace build_conic_heat(int n) {
    Builder b("conic_heat", n);
    b.face("F_100").face("F_010").face("F_001");
    b.var("x", rho("F_100")).var("x'", rho("F_010")).var("t", rho("F_001"));
    b.parabolic("F_112", {"F_100", "F_010", "F_001"}, {"t"}, 3);
    b.parabolic("F_d2", {"F_001"}, {"t"}, N + Affine{1}, "Delta(MxM)");
    return b.s;
}

CornerSpace build_sc_heat(int n) {
    Builder b("sc_heat", n);
    b.face("F_100").face("F_010").face("F_001");
    b.var("x", rho("F_100")).var("x'", rho("F_010")).var("t", rho("F_001"));
    b.radial("F_110", {"F_100", "F_010"}, 2);
    b.radial("F_220", {"F_110"}, N + Affine{1}, "Delta(YxY)");
    b.parabolic("F_d2", {"F_001"}, {"t"}, N + Affine{1}, "Delta(MxM)");
    return b.s;
}

CornerSpace build_acc_double(int n) {
    Builder b("acc_double", n);
    b.face("F_1000").face("F_0100").face("F_0010").face("F_0001");
    b.var("x", rho("F_1000")).var("r", rho("F_0100")).var("x'", rho("F_0010")).var("r'", rho("F_0001"));
    b.radial("F_1111", {"F_1000", "F_0100", "F_0010", "F_0001"}, 4);
    b.restrict_to({"F_1000", "F_0100"}, {"F_0010", "F_0001"}, {"F_1111"});
    return b.s;
}

CornerSpace build_acc_heat(int n) {
    Builder b("acc_heat", n);
    b.face("F_1000").face("F_0100").face("F_0010").face("F_0001").face("F_t");
    b.var("x", rho("F_1000")).var("r", rho("F_0100")).var("x'", rho("F_0010")).var("r'", rho("F_0001"));
    b.var("t", rho("F_t"));
    b.parabolic("F_11112", {"F_1000", "F_0100", "F_0010", "F_0001", "F_t"}, {"t"}, 5);
    b.radial("F_11110", {"F_1000", "F_0100", "F_0010", "F_0001"}, 4);
    b.restrict_to({"F_1000", "F_0100"}, {"F_0010", "F_0001"});
    b.parabolic("F_d2", {"F_t"}, {"t"}, N + Affine{1}, "Delta(MxM)");
    return b.s;
}

CornerSpace build_sc_triple(int n) {
    Builder b("sc_triple_heat", n);
    b.face("F_10000").face("F_01000").face("F_00100");
    // Time faces appear in the construction only through the lift tables.
    b.face("F_00010", true).face("F_00001", true);
    // t'' = t - t' vanishes on a face of the product that is not a coordinate face.
    b.face("F_00022", true);
    b.var("x", rho("F_10000")).var("x'", rho("F_01000")).var("x''", rho("F_00100"));
    b.var("t", rho("F_00010")).var("t'", rho("F_00001"));
    b.radial("F_11100", {"F_10000", "F_01000", "F_00100"}, 3);
    b.radial("F_11000", {"F_10000", "F_01000"}, 2);
    b.radial("F_01100", {"F_01000", "F_00100"}, 2);
    b.radial("F_10100", {"F_10000", "F_00100"}, 2);
    b.radial("F_22200", {"F_11100"}, Affine{1} + N * Rational(2), "Delta(YxY'xY'')");
    b.radial("F_22000", {"F_11000"}, N + Affine{1}, "Delta(YxY')");
    b.radial("F_02200", {"F_01100"}, N + Affine{1}, "Delta(Y'xY'')");
    b.radial("F_20200", {"F_10100"}, N + Affine{1}, "Delta(YxY'')");
    b.radial("F_00011", {"F_00010", "F_00001"}, 2);
    b.var("t''", rho("F_00011"));
    b.parabolic("F_d3", {"F_00011"}, {"t''"}, Affine{3} + N * Rational(2), "Delta(MxM'xM'')");
    b.parabolic("F_d20", {"F_00010"}, {"t"}, N + Affine{1}, "Delta(MxM')");
    b.parabolic("F_d02", {"F_00001"}, {"t'"}, N + Affine{1}, "Delta(M'xM'')");
    b.parabolic("F_d22", {"F_00011"}, {"t''"}, N + Affine{1}, "Delta(MxM'')");
    b.s.jacobian.overrides["F_22200"] = Affine{1} + N * Rational(2);
    return b.s;
}

CornerSpace build_conic_triple(int n) {
    Builder b("conic_triple_heat", n);
    for (const char* f : {"X_Y", "X_Y1", "X_Y2", "X_t", "X_t1"}) b.face(f);
    b.face("X_t2", true);
    b.var("x", rho("X_Y")).var("x'", rho("X_Y1")).var("x''", rho("X_Y2"));
    b.var("t", rho("X_t")).var("t'", rho("X_t1")).var("t''", rho("X_t2"));
    b.parabolic("F_11122", {"X_Y", "X_Y1", "X_Y2", "X_t", "X_t1"}, {"t", "t'"}, 5);
    b.parabolic("F_11020", {"X_Y", "X_Y1", "X_t"}, {"t"}, 3);
    b.parabolic("F_01102", {"X_Y1", "X_Y2", "X_t1"}, {"t'"}, 3);
    b.parabolic("F_10122", {"X_Y", "X_Y2", "X_t2"}, {"t''"}, 3);
    b.parabolic("F_d3", {"X_t", "X_t1"}, {"t", "t'"}, Affine{4} + N * Rational(2), "Delta(S3)");
    b.parabolic("F_d20", {"X_t"}, {"t"}, N + Affine{1}, "Delta(S2 x 1)");
    b.parabolic("F_d02", {"X_t1"}, {"t'"}, N + Affine{1}, "Delta(1 x S2)");
    b.parabolic("F_d22", {"X_t2"}, {"t''"}, N + Affine{1}, "Delta(S2 x' 1)");
    return b.s;
}

CornerSpace build_acc_triple(int n) {
    Builder b("acc_triple_heat", n);
    for (const char* f : {"X_x", "X_r", "X_x1", "X_r1", "X_x2", "X_r2", "X_t", "X_s"}) b.face(f);
    b.var("x", rho("X_x")).var("r", rho("X_r")).var("x'", rho("X_x1")).var("r'", rho("X_r1"));
    b.var("x''", rho("X_x2")).var("r''", rho("X_r2")).var("t", rho("X_t")).var("s", rho("X_s"));
    b.radial("T_YYY", {"X_x", "X_r", "X_x1", "X_r1", "X_x2", "X_r2"}, 6);
    b.radial("T_YY1", {"X_x", "X_r", "X_x1", "X_r1"}, 4);
    b.radial("T_Y1Y2", {"X_x1", "X_r1", "X_x2", "X_r2"}, 4);
    b.radial("T_YY2", {"X_x", "X_r", "X_x2", "X_r2"}, 4);
    b.radial("R_ts", {"X_t", "X_s"}, 2);
    b.parabolic("S_11122", {"T_YYY", "R_ts"}, {"t", "s"}, 3);
    b.parabolic("S_11020", {"T_YY1", "X_t"}, {"t"}, 3);
    b.parabolic("S_01102", {"T_Y1Y2", "X_s"}, {"s"}, 3);
    b.parabolic("S_10122", {"T_YY2", "R_ts"}, {"t", "s"}, 3);
    b.radial("S_111", {"T_YYY"}, 2, "Delta(YxY'xY'')");
    b.radial("S_110", {"T_YY1"}, 2, "Delta(YxY')");
    b.radial("S_011", {"T_Y1Y2"}, 2, "Delta(Y'xY'')");
    b.radial("S_101", {"T_YY2"}, 2, "Delta(YxY'')");
    b.parabolic("S_td", {"R_ts"}, {"t", "s"}, Affine{4} + N * Rational(2), "Delta(M3)");
    b.parabolic("S_d20", {"X_t"}, {"t"}, N + Affine{1}, "Delta(MxM')");
    b.parabolic("S_d02", {"X_s"}, {"s"}, N + Affine{1}, "Delta(M'xM'')");
    b.parabolic("S_d22", {"R_ts"}, {"t", "s"}, N + Affine{2}, "Delta(MxM'')");
    return b.s;
}

} // namespace

CornerSpace build_space(SpaceKind kind, int n) {
    if (n < 1) throw BlowupError("dimension must be positive");
    switch (kind) {
    case SpaceKind::b_heat: return build_b_heat(n);
    case SpaceKind::conic_heat: return build_conic_heat(n);
    case SpaceKind::sc_heat: return build_sc_heat(n);
    case SpaceKind::acc_double: return build_acc_double(n);
    case SpaceKind::acc_heat: return build_acc_heat(n);
    case SpaceKind::sc_triple_heat: return build_sc_triple(n);
    case SpaceKind::conic_triple_heat: return build_conic_triple(n);
    case SpaceKind::acc_triple_heat: return build_acc_triple(n);
    }
    throw BlowupError("unknown space kind");
}

// ---------------------------------------------------------------- JSON

namespace {

nlohmann::json affine_json(const Affine& a) {
    if (a.is_constant() && a.a.denominator() == 1) return a.a.numerator();
    return a.str();
}

Affine affine_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Affine{j.get<std::int64_t>()};
    if (j.is_string()) return parse_affine(j.get<std::string>());
    throw BlowupError("bad exponent in JSON: " + j.dump());
}

nlohmann::json monomial_json(const Monomial& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [f, e] : m.terms) arr.push_back({f, affine_json(e)});
    return arr;
}

Monomial monomial_from_json(const nlohmann::json& j) {
    Monomial m;
    for (const auto& t : j) m.add(t.at(0).get<std::string>(), affine_from_json(t.at(1)));
    return m;
}

const char* kind_name(HistoryEntry::Kind k) {
    switch (k) {
    case HistoryEntry::Kind::blowup: return "blowup";
    case HistoryEntry::Kind::add_face: return "add_face";
    case HistoryEntry::Kind::add_variable: return "add_variable";
    case HistoryEntry::Kind::restriction: return "restriction";
    }
    return "?";
}

} // namespace

nlohmann::json space_to_json(const CornerSpace& s) {
    nlohmann::json j;
    j["space"] = s.name;
    j["n"] = s.n;
    j["faces"] = nlohmann::json::array();
    for (const auto& f : s.faces)
        j["faces"].push_back({{"name", f.name},
                              {"origin", origin_name(f.origin)},
                              {"codim_of_center", affine_json(f.center_codim)},
                              {"reconstructed", f.reconstructed}});
    j["lifts"] = nlohmann::json::object();
    for (const auto& [v, m] : s.scalar_vars) j["lifts"][v] = monomial_json(m);
    j["corners"] = nlohmann::json::array();
    for (const auto& c : s.corners) j["corners"].push_back({{"name", c.name}, {"faces", c.faces}});
    j["history"] = history_to_json(s.history);
    return j;
}

nlohmann::json history_to_json(const std::vector<HistoryEntry>& h) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : h) {
        nlohmann::json j;
        j["kind"] = kind_name(e.kind);
        switch (e.kind) {
        case HistoryEntry::Kind::add_face:
            j["face"] = e.new_face;
            if (e.reconstructed) j["reconstructed"] = true;
            break;
        case HistoryEntry::Kind::add_variable:
            j["variable"] = e.variable;
            j["lift"] = monomial_json(e.variable_lift);
            break;
        case HistoryEntry::Kind::blowup:
            j["face"] = e.new_face;
            j["center"] = {{"contained_in_faces", e.center.contained_in_faces},
                           {"diagonal_tag", e.center.diagonal_tag},
                           {"parabolic_directions", e.center.parabolic_directions},
                           {"codim", affine_json(e.center.codim)}};
            break;
        case HistoryEntry::Kind::restriction:
            j["group_a"] = e.group_a;
            j["group_b"] = e.group_b;
            j["corner_faces"] = e.corner_faces;
            break;
        }
        arr.push_back(j);
    }
    return arr;
}

std::vector<HistoryEntry> history_from_json(const nlohmann::json& arr) {
    std::vector<HistoryEntry> out;
    for (const auto& j : arr) {
        HistoryEntry e;
        std::string k = j.at("kind").get<std::string>();
        if (k == "add_face") {
            e.kind = HistoryEntry::Kind::add_face;
            e.new_face = j.at("face");
            e.reconstructed = j.value("reconstructed", false);
        } else if (k == "add_variable") {
            e.kind = HistoryEntry::Kind::add_variable;
            e.variable = j.at("variable");
            e.variable_lift = monomial_from_json(j.at("lift"));
        } else if (k == "blowup") {
            e.kind = HistoryEntry::Kind::blowup;
            e.new_face = j.at("face");
            const auto& c = j.at("center");
            e.center.contained_in_faces = c.at("contained_in_faces").get<std::vector<std::string>>();
            e.center.diagonal_tag = c.value("diagonal_tag", "");
            e.center.parabolic_directions = c.value("parabolic_directions", std::vector<std::string>{});
            e.center.codim = affine_from_json(c.at("codim"));
        } else if (k == "restriction") {
            e.kind = HistoryEntry::Kind::restriction;
            e.group_a = j.at("group_a").get<std::vector<std::string>>();
            e.group_b = j.at("group_b").get<std::vector<std::string>>();
            e.corner_faces = j.value("corner_faces", std::vector<std::string>{});
        } else {
            throw BlowupError("unknown history entry kind '" + k + "'");
        }
        out.push_back(e);
    }
    return out;
}

bool space_equal(const CornerSpace& a, const CornerSpace& b) {
    if (a.n != b.n || a.faces.size() != b.faces.size()) return false;
    std::map<std::string, std::pair<FaceOrigin, Affine>> fa, fb;
    for (const auto& f : a.faces) fa[f.name] = {f.origin, f.center_codim};
    for (const auto& f : b.faces) fb[f.name] = {f.origin, f.center_codim};
    if (fa != fb) return false;
    if (a.scalar_vars.size() != b.scalar_vars.size()) return false;
    for (const auto& [v, m] : a.scalar_vars) {
        auto it = b.scalar_vars.find(v);
        if (it == b.scalar_vars.end() || !(it->second == m)) return false;
    }
    std::set<std::pair<std::string, std::set<std::string>>> ca, cb;
    for (const auto& c : a.corners) ca.insert({c.name, {c.faces.begin(), c.faces.end()}});
    for (const auto& c : b.corners) cb.insert({c.name, {c.faces.begin(), c.faces.end()}});
    return ca == cb;
}

// ---------------------------------------------------------------- sc triple maps

BMapSpec sc_triple_lift_map(const std::string& which, int n) {
    if (which != "beta_L" && which != "beta_R" && which != "beta_C")
        throw BlowupError("unknown triple-space map '" + which + "' (expected beta_L, beta_R or beta_C)");
    CornerSpace triple = build_space(SpaceKind::sc_triple_heat, n);
    CornerSpace dbl = build_space(SpaceKind::sc_heat, n);
    BMapSpec m;
    m.name = which;
    m.source = triple.name;
    m.target = dbl.name;
    m.source_faces = triple.face_names();
    m.target_faces = dbl.face_names();
    for (const auto& sec : parse_sections(golden_text("sc_triple_lifts.txt")))
        for (const auto& row : sec.rows) {
            if (row.size() < 4 || row[0] != which) continue;
            if (row[2] != "=") throw BlowupError("malformed lift row for " + which);
            std::string target = rho_to_face(row[1]);
            if (!dbl.has_face(target)) throw BlowupError(which + " lifts unknown double-space face " + target);
            Monomial l;
            for (std::size_t i = 3; i < row.size(); ++i) {
                std::string f = rho_to_face(row[i]);
                if (!triple.has_face(f)) throw BlowupError(which + " lift uses unknown triple-space face " + f);
                l.add(f, Affine{1});
            }
            m.lifts[target] = l;
        }
    for (const auto& f : m.target_faces)
        if (!m.lifts.count(f)) throw BlowupError(which + " has no lift for " + f);
    return m;
}

namespace {

// Factor indices named by a diagonal tag such as Delta(YxY'') or Delta(MxM'xM'').
std::set<int> diagonal_factors(const std::string& tag, char letter) {
    std::set<int> out;
    if (tag.rfind("Delta(", 0) != 0) return out;
    const std::string body = tag.substr(6, tag.size() - 7);
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] != letter) return {};
        int primes = 0;
        for (++i; i < body.size() && body[i] == '\''; ++i) ++primes;
        out.insert(primes);
        if (i < body.size() && body[i] == 'x') ++i;
    }
    return out;
}

} // namespace

BMapSpec sc_triple_lift_map_derived(const std::string& which, int n) {
    int a, b;
    std::string tau;
    if (which == "beta_L") a = 0, b = 1, tau = "t";
    else if (which == "beta_R") a = 1, b = 2, tau = "t'";
    else if (which == "beta_C") a = 0, b = 2, tau = "t''";
    else throw BlowupError("unknown triple-space map '" + which + "' (expected beta_L, beta_R or beta_C)");

    const CornerSpace triple = build_space(SpaceKind::sc_triple_heat, n);
    const CornerSpace dbl = build_space(SpaceKind::sc_heat, n);
    BMapSpec m;
    m.name = which + "_derived";
    m.source = triple.name;
    m.target = dbl.name;
    m.source_faces = triple.face_names();
    m.target_faces = dbl.face_names();
    for (const auto& f : m.target_faces) m.lifts[f] = Monomial{};

    std::map<std::string, std::string> tags;
    for (const auto& h : triple.history)
        if (h.kind == HistoryEntry::Kind::blowup) tags[h.new_face] = h.center.diagonal_tag;
    auto order = [](const CornerSpace& s, const std::string& var, const std::string& face) {
        Affine e;
        for (const auto& [f, x] : s.scalar_vars.at(var).terms)
            if (f == face) e += x;
        return e;
    };
    // Exponent of a source face in the lift of G: the vanishing order there of the
    // projected variable, divided by the order of the double-space variable at G.
    auto put = [&](const std::string& g, const std::string& dvar, const std::string& tvar, const std::string& h) {
        const Affine og = order(dbl, dvar, g);
        m.lifts[g].add(h, order(triple, tvar, h) * (Rational(1) / og.a));
    };
    const std::string xs[3] = {"x", "x'", "x''"};
    for (const auto& h : m.source_faces) {
        const bool za = order(triple, xs[a], h) != Affine{}, zb = order(triple, xs[b], h) != Affine{};
        const std::set<int> ydiag = diagonal_factors(tags[h], 'Y');
        const std::set<int> mdiag = diagonal_factors(tags[h], 'M');
        if (za && zb) put(ydiag.count(a) && ydiag.count(b) ? "F_220" : "F_110", "x", xs[a], h);
        else if (za) put("F_100", "x", xs[a], h);
        else if (zb) put("F_010", "x'", xs[b], h);
        if (order(triple, tau, h) != Affine{}) put(mdiag.count(a) && mdiag.count(b) ? "F_d2" : "F_001", "t", tau, h);
    }
    return m;
}

BMapSpec sc_triple_pushforward_map(int n) {
    CornerSpace triple = build_space(SpaceKind::sc_triple_heat, n);
    CornerSpace dbl = build_space(SpaceKind::sc_heat, n);
    BMapSpec m;
    m.name = "beta_C_pushforward";
    m.source = triple.name;
    m.target = dbl.name;
    m.source_faces = triple.face_names();
    m.target_faces = dbl.face_names();
    for (const auto& f : m.target_faces) m.lifts[f] = Monomial{};
    for (const auto& sec : parse_sections(golden_text("sc_triple_pushforward.txt")))
        for (const auto& row : sec.rows) {
            if (row.size() != 2) throw BlowupError("malformed pushforward row");
            if (!triple.has_face(row[0])) throw BlowupError("pushforward table names unknown face " + row[0]);
            if (row[1] == "interior") continue;
            if (!dbl.has_face(row[1])) throw BlowupError("pushforward table targets unknown face " + row[1]);
            m.lifts[row[1]].add(row[0], Affine{1});
        }
    return m;
}

} // namespace acclab

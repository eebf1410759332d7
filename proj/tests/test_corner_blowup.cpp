#include "corner_blowup.hpp"
#include "doctest.h"
#include "golden.hpp"
#include "test_rng.hpp"

#include <set>

using namespace acclab;

namespace {

std::set<std::pair<std::string, std::string>> inventory(const CornerSpace& s, const std::vector<std::string>& scope) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& f : s.faces) {
        if (scope[1] == "restriction" && f.origin != FaceOrigin::restriction) continue;
        if (scope[1] == "prefix" && f.name.rfind(scope[2], 0) != 0) continue;
        out.insert({f.name, origin_name(f.origin)});
    }
    return out;
}

Monomial rho(const std::string& f, Affine e = Affine(1)) { return Monomial{{f, e}}; }

} // namespace

TEST_CASE("face inventories match the face tables") {
    auto sections = parse_sections(golden_text("face_inventory.txt"));
    for (auto kind : all_space_kinds()) {
        CAPTURE(space_kind_name(kind));
        const auto& sec = find_section(sections, space_kind_name(kind));
        CornerSpace s = build_space(kind, 3);
        std::vector<std::string> scope;
        std::set<std::pair<std::string, std::string>> faces;
        std::set<std::pair<std::string, std::set<std::string>>> corners;
        for (const auto& row : sec.rows) {
            if (row[0] == "scope") scope = row;
            else if (row[0] == "face") faces.insert({row[1], row[2]});
            else if (row[0] == "corner") corners.insert({row[1], {row.begin() + 2, row.end()}});
        }
        REQUIRE(scope.size() >= 2);
        CHECK(inventory(s, scope) == faces);
        if (!corners.empty()) {
            std::set<std::pair<std::string, std::set<std::string>>> got;
            for (const auto& c : s.corners) got.insert({c.name, {c.faces.begin(), c.faces.end()}});
            CHECK(got == corners);
        }
    }
}

TEST_CASE("acc triple heat space lists its twelve blowups in table order") {
    CornerSpace s = build_space(SpaceKind::acc_triple_heat);
    std::vector<std::string> order;
    for (const auto& h : s.history)
        if (h.kind == HistoryEntry::Kind::blowup && h.new_face.rfind("S_", 0) == 0) order.push_back(h.new_face);
    CHECK(order == std::vector<std::string>{"S_11122", "S_11020", "S_01102", "S_10122", "S_111", "S_110", "S_011",
                                            "S_101", "S_td", "S_d20", "S_d02", "S_d22"});
}

TEST_CASE("scalar lifts on the double heat spaces") {
    CornerSpace b = build_space(SpaceKind::b_heat);
    CHECK(b.scalar_vars.at("x") == Monomial{{"F_100", 1}, {"F_110", 1}});
    CHECK(b.scalar_vars.at("t") == Monomial{{"F_001", 1}, {"F_d2", 2}});
    CornerSpace c = build_space(SpaceKind::conic_heat);
    CHECK(c.scalar_vars.at("t") == Monomial{{"F_001", 1}, {"F_112", 2}, {"F_d2", 2}});
    CHECK(c.scalar_vars.at("x'") == Monomial{{"F_010", 1}, {"F_112", 1}});
}

TEST_CASE("blowing up the product corner of two cusp-edge faces") {
    CornerSpace s = empty_space("S2", 3);
    for (const char* f : {"F_1000", "F_0100", "F_0010", "F_0001"}) s = add_face(s, f);
    s = add_variable(s, "x", rho("F_1000"));
    s = blow_up(s, {{"F_1000", "F_0100", "F_0010", "F_0001"}, "", {}, 4}, "F_1111");
    CHECK(s.scalar_vars.at("x") == Monomial{{"F_1000", 1}, {"F_1111", 1}});
}

TEST_CASE("a center meeting no scalar variable leaves lifts unchanged") {
    CornerSpace s = empty_space("X", 3);
    for (const char* f : {"F_100", "F_010", "F_001"}) s = add_face(s, f);
    s = add_variable(s, "t", rho("F_001"));
    auto before = s.scalar_vars;
    s = blow_up(s, {{"F_100", "F_010"}, "", {}, 2}, "F_110");
    CHECK(s.scalar_vars == before);
}

TEST_CASE("blowup errors") {
    CornerSpace s = empty_space("X", 3);
    s = add_face(s, "F_100");
    s = add_face(s, "F_010");
    CHECK_THROWS_AS(blow_up(s, {{"F_999"}, "", {}, 2}, "F_new"), BlowupError);
    CHECK_THROWS_AS(blow_up(s, {{"F_100"}, "", {"t"}, 2}, "F_new"), BlowupError);
    CHECK_THROWS_AS(blow_up(s, {{"F_100"}, "", {}, 1}, "F_new"), BlowupError);
    CHECK_THROWS_AS(blow_up(s, {{"F_100", "F_010"}, "", {}, 2}, "F_100"), BlowupError);
    CHECK_NOTHROW(blow_up(s, {{"F_100"}, "Delta", {}, 1}, "F_new"));
}

TEST_CASE("the printed lift table loads as three monomial maps") {
    int rows = 0;
    for (const auto& sec : parse_sections(golden_text("sc_triple_lifts.txt")))
        for (const auto& row : sec.rows) {
            BMapSpec m = sc_triple_lift_map(row[0]);
            Monomial expect;
            for (std::size_t i = 3; i < row.size(); ++i) expect.add(rho_to_face(row[i]), Affine(1));
            CHECK(lift_monomial(m, rho(rho_to_face(row[1]))) == expect);
            ++rows;
        }
    CHECK(rows == 18);
    CHECK(lift_monomial(sc_triple_lift_map("beta_L"), rho("F_110")) == Monomial{{"F_11100", 1}, {"F_11000", 1}});
    CHECK(lift_monomial(sc_triple_lift_map("beta_C"), rho("F_d2")) == Monomial{{"F_d3", 1}, {"F_d22", 1}});
}

TEST_CASE("computed triple lifts commute with the scalar variables") {
    // Each projection keeps two spatial factors and one time variable; pulling a
    // double-space scalar back through the computed map must give the triple-space
    // scalar it projects to, exponents included.
    const CornerSpace triple = build_space(SpaceKind::sc_triple_heat);
    const CornerSpace dbl = build_space(SpaceKind::sc_heat);
    const std::map<std::string, std::map<std::string, std::string>> keep = {
        {"beta_L", {{"x", "x"}, {"x'", "x'"}, {"t", "t"}}},
        {"beta_R", {{"x", "x'"}, {"x'", "x''"}, {"t", "t'"}}},
        {"beta_C", {{"x", "x"}, {"x'", "x''"}, {"t", "t''"}}},
    };
    for (const auto& [map, vars] : keep) {
        const BMapSpec m = sc_triple_lift_map_derived(map);
        for (const auto& [dv, tv] : vars)
            CHECK_MESSAGE(lift_monomial(m, dbl.scalar_vars.at(dv)) == triple.scalar_vars.at(tv), map << " " << dv);
        // Every source face lies over at most one spatial and one temporal face.
        std::map<std::string, int> hits;
        for (const auto& [g, mono] : m.lifts)
            for (const auto& [h, e] : mono.terms) hits[h] += g == "F_001" || g == "F_d2" ? 10 : 1;
        for (const auto& [h, n] : hits) CHECK_MESSAGE((n % 10 <= 1 && n / 10 <= 1), map << " " << h);
    }
    CHECK(lift_monomial(sc_triple_lift_map_derived("beta_L"), rho("F_110")) == Monomial{{"F_11100", 1}, {"F_11000", 1}});
    CHECK(lift_monomial(sc_triple_lift_map_derived("beta_C"), rho("F_d2")) == Monomial{{"F_d3", 1}, {"F_d22", 1}});
    CHECK(lift_monomial(sc_triple_lift_map_derived("beta_R"), rho("F_220")) ==
          Monomial{{"F_22200", 1}, {"F_02200", 1}});
    CHECK_THROWS_AS(sc_triple_lift_map_derived("beta_X"), BlowupError);
}

TEST_CASE("lifting matrix of the center map") {
    LiftingMatrix L = lifting_matrix(sc_triple_lift_map("beta_C"));
    auto row_of = [&](const std::string& r) {
        std::set<std::string> out;
        for (std::size_t i = 0; i < L.rows.size(); ++i)
            if (L.rows[i] == r)
                for (std::size_t j = 0; j < L.cols.size(); ++j)
                    if (L.e[i][j] == Affine(1)) out.insert(L.cols[j]);
        return out;
    };
    CHECK(row_of("F_100") == std::set<std::string>{"F_10000", "F_11000"});
    CHECK(row_of("F_001") == std::set<std::string>{"F_00022", "F_00011", "F_d22"});
}

TEST_CASE("identity maps") {
    CornerSpace s = build_space(SpaceKind::sc_heat);
    BMapSpec id = identity_map(s);
    LiftingMatrix L = lifting_matrix(id);
    for (std::size_t i = 0; i < L.rows.size(); ++i)
        for (std::size_t j = 0; j < L.cols.size(); ++j) CHECK(L.e[i][j] == Affine(i == j ? 1 : 0));
    CHECK(is_b_fibration(id).ok);
    Monomial m{{"F_110", Rational(1, 2)}, {"F_d2", 3}};
    CHECK(lift_monomial(id, m) == m);
    CHECK(lift_monomial(std::vector<BMapSpec>{}, m) == m);
}

TEST_CASE("b-fibration test") {
    CHECK(is_b_fibration(sc_triple_pushforward_map()).ok);
    BMapSpec bad;
    bad.name = "bad";
    bad.source_faces = {"F_a", "F_b"};
    bad.target_faces = {"F_1", "F_2"};
    bad.lifts["F_1"] = Monomial{{"F_a", 1}};
    bad.lifts["F_2"] = Monomial{{"F_a", 1}, {"F_b", 1}};
    FibrationWitness w = is_b_fibration(bad);
    CHECK_FALSE(w.ok);
    CHECK(w.column == "F_a");
    CHECK(w.row1 == "F_1");
    CHECK(w.row2 == "F_2");
}

TEST_CASE("lifting matrix rejects non-b-map exponents") {
    BMapSpec m;
    m.name = "frac";
    m.source_faces = {"F_a"};
    m.target_faces = {"F_1"};
    m.lifts["F_1"] = Monomial{{"F_a", Rational(1, 2)}};
    CHECK_THROWS_AS(lifting_matrix(m), BlowupError);
}

TEST_CASE("density lifts") {
    auto sections = parse_sections(golden_text("sc_composition.txt"));
    CornerSpace triple = build_space(SpaceKind::sc_triple_heat);
    Monomial mu3 = density_lift(triple, {});
    for (const auto& row : find_section(sections, "mu3_lift").rows) {
        CAPTURE(row[0]);
        CHECK(mu3.exponent(row[0]) == parse_affine(row[1]));
    }
    CHECK(mu3.exponent("F_11100") == Affine(2));

    Monomial half = density_lift(build_space(SpaceKind::sc_heat), {}).pow(Rational(-1, 2));
    for (const auto& row : find_section(sections, "half_density").rows) {
        CAPTURE(row[0]);
        CHECK(half.exponent(row[0]) == parse_affine(row[1]));
    }

    CornerSpace bare = empty_space("X", 3);
    bare = add_face(bare, "F_1");
    Monomial w{{"F_1", Rational(-1, 2)}};
    CHECK(density_lift(bare, w) == w);
}

TEST_CASE("lift of x after the four corner blowups") {
    CornerSpace s = build_space(SpaceKind::sc_triple_heat);
    std::vector<HistoryEntry> prefix;
    int blowups = 0;
    for (const auto& h : s.history) {
        if (h.kind == HistoryEntry::Kind::blowup && ++blowups > 4) break;
        prefix.push_back(h);
    }
    CornerSpace p = replay("prefix", 3, prefix);
    CHECK(p.scalar_vars.at("x") ==
          parse_monomial("rho_11100 rho_11000 rho_10100 rho_10000"));
}

TEST_CASE("history replay is deterministic") {
    for (auto kind : all_space_kinds()) {
        CAPTURE(space_kind_name(kind));
        CornerSpace s = build_space(kind, 4);
        nlohmann::json j = history_to_json(s.history);
        CornerSpace r = replay(s.name, s.n, history_from_json(nlohmann::json::parse(j.dump())), s.jacobian);
        CHECK(space_equal(s, r));
        CHECK(space_to_json(s) == space_to_json(r));
    }
}

TEST_CASE("monomial text round trip") {
    Monomial m{{"F_d3", 1}, {"F_d02", 2}, {"F_110", Affine(Rational(-1, 2), Rational(1, 2))}};
    CHECK(m.str() == "rho_d3·rho_d02^2·rho_110^((n-1)/2)");
    CHECK(parse_monomial(m.str()) == m);
    CHECK(parse_monomial("1").is_one());
    CHECK_THROWS_AS(parse_monomial("rho_1^("), BlowupError);
}

TEST_CASE("property: nested centers may be blown up in either order") {
    // Blowing up C2 (inside the faces S2) and then C1 (inside S1 subset of S2) must
    // agree with C1 first followed by the lift of C2, which lies in N1 and S2 minus S1.
    testing::Rng rng(0xb10c0001);
    for (int trial = 0; trial < 200; ++trial) {
        int k = static_cast<int>(rng.range(3, 6));
        CornerSpace base = empty_space("X", 3);
        std::vector<std::string> faces;
        for (int i = 0; i < k; ++i) {
            faces.push_back("F_" + std::to_string(i));
            base = add_face(base, faces.back());
        }
        int vars = static_cast<int>(rng.range(1, 4));
        for (int v = 0; v < vars; ++v) {
            Monomial m;
            for (const auto& f : faces)
                if (rng.range(0, 2) == 0) m.add(f, Affine(rng.range(1, 3)));
            base = add_variable(base, "v" + std::to_string(v), m);
        }
        std::vector<std::string> s2, s1;
        for (const auto& f : faces)
            if (rng.range(0, 1) == 0) s2.push_back(f);
        if (s2.size() < 2) s2 = {faces[0], faces[1], faces[2]};
        for (const auto& f : s2)
            if (rng.range(0, 1) == 0) s1.push_back(f);
        if (s1.size() < 2 || s1.size() == s2.size()) s1 = {s2[0], s2[1]};
        if (s1.size() == s2.size()) continue;
        std::vector<std::string> rest;
        for (const auto& f : s2)
            if (std::find(s1.begin(), s1.end(), f) == s1.end()) rest.push_back(f);

        CornerSpace b = blow_up(base, {s2, "", {}, Affine(static_cast<std::int64_t>(s2.size()))}, "N2");
        b = blow_up(b, {s1, "", {}, Affine(static_cast<std::int64_t>(s1.size()))}, "N1");

        std::vector<std::string> lifted = rest;
        lifted.push_back("N1");
        CornerSpace a = blow_up(base, {s1, "", {}, Affine(static_cast<std::int64_t>(s1.size()))}, "N1");
        a = blow_up(a, {lifted, "", {}, Affine(static_cast<std::int64_t>(s2.size()))}, "N2");

        auto names_a = a.face_names(), names_b = b.face_names();
        CHECK(std::set<std::string>(names_a.begin(), names_a.end()) ==
              std::set<std::string>(names_b.begin(), names_b.end()));
        for (const auto& [v, m] : b.scalar_vars) CHECK(a.scalar_vars.at(v) == m);
    }
}

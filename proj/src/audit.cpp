#include "audit.hpp"

#include "calculus_orders.hpp"
#include "golden.hpp"
#include "splitmix.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace acclab {

namespace {

AuditCheck start(const std::string& name, const std::string& table) {
    AuditCheck c;
    c.name = name;
    c.table = table;
    c.origin = golden_origin(table);
    return c;
}

IndexSet random_set(SplitMix64& d, int n) {
    std::vector<IndexTerm> t;
    const int count = int(d.range(1, 2));
    for (int i = 0; i < count; ++i) t.push_back({Affine(Rational(d.range(-4, 4), d.range(1, 4))), int(d.range(0, 1))});
    return IndexSet(t, n);
}

std::map<std::string, IndexSet> sc_env(const CalculusOrders& a, const CalculusOrders& b) {
    return {{"A_110", sc_index_110(a)},
            {"A_220", sc_index_220(a)},
            {"B_110", sc_index_110(b)},
            {"B_220", sc_index_220(b)},
            {"-ka", IndexSet::single(-a.k, 0, a.n)},
            {"-kb", IndexSet::single(-b.k, 0, b.n)}};
}

IndexSet formula(const std::vector<std::string>& row, const std::map<std::string, IndexSet>& env, int n) {
    return eval_order_formula(parse_order_formula({row.begin() + 1, row.end()}), env, n);
}

std::set<std::pair<std::string, std::string>> inventory(const CornerSpace& s, const std::vector<std::string>& scope) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& f : s.faces) {
        if (scope[1] == "restriction" && f.origin != FaceOrigin::restriction) continue;
        if (scope[1] == "prefix" && f.name.rfind(scope[2], 0) != 0) continue;
        out.insert({f.name, origin_name(f.origin)});
    }
    return out;
}

IndexSet one(Rational a) { return IndexSet::single(Affine(a)); }

} // namespace

AuditCheck audit_lift_table() {
    AuditCheck c = start("sc triple lifts", "sc_triple_lifts.txt");
    for (const auto& sec : parse_sections(golden_text(c.table)))
        for (const auto& row : sec.rows) {
            if (row.size() < 4 || row[2] != "=") {
                c.mismatches.push_back("malformed row in " + c.table);
                continue;
            }
            Monomial expect;
            for (std::size_t i = 3; i < row.size(); ++i) expect.add(rho_to_face(row[i]), Affine(1));
            const Monomial got =
                lift_monomial(sc_triple_lift_map_derived(row[0]), Monomial{{rho_to_face(row[1]), Affine(1)}});
            if (got != expect)
                c.mismatches.push_back(row[0] + " " + row[1] + ": computed " + got.str() + ", table " + expect.str());
            ++c.rows;
        }
    if (c.rows != 18) c.mismatches.push_back("expected 18 lift rows, found " + std::to_string(c.rows));
    return c;
}

AuditCheck audit_composition(int random_trials, std::uint64_t seed) {
    AuditCheck c = start("sc/b/conic composition", "sc_composition.txt");
    const auto sections = parse_sections(golden_text(c.table));
    SplitMix64 d(seed);
    for (int trial = 0; trial < random_trials; ++trial) {
        const int n = int(d.range(3, 7));
        auto k = [&] { return Affine(Rational(-d.range(1, 8), d.range(1, 2))); };
        const CalculusOrders a = make_sc(random_set(d, n), random_set(d, n), k(), n);
        const CalculusOrders b = make_sc(random_set(d, n), random_set(d, n), k(), n);
        const CalculusOrders closed = sc_compose(a, b);
        const ScPipeline p = sc_compose_pipeline(a, b);
        const auto env = sc_env(a, b);
        for (const auto& row : find_section(sections, "final").rows) {
            ++c.rows;
            const IndexSet want = formula(row, env, n);
            if (closed.at(row[0]) != want)
                c.mismatches.push_back("trial " + std::to_string(trial) + " " + row[0] + ": closed form " +
                                       closed.at(row[0]).str() + ", table " + want.str());
            if (p.composed.at(row[0]) != want)
                c.mismatches.push_back("trial " + std::to_string(trial) + " " + row[0] + ": pipeline " +
                                       p.composed.at(row[0]).str() + ", table " + want.str());
        }
        for (const auto& row : find_section(sections, "pushforward_input").rows) {
            ++c.rows;
            if (p.pushforward_input.at(row[0]) != formula(row, env, n))
                c.mismatches.push_back("trial " + std::to_string(trial) + " pushforward input " + row[0]);
        }
        if (!(p.composed == closed)) c.mismatches.push_back("trial " + std::to_string(trial) + ": pipeline != closed form");
        for (const char* table : {"kappa_A", "kappa_B"}) {
            const FaceOrders& derived = std::string(table) == "kappa_A" ? p.kappa_a : p.kappa_b;
            const std::string known = std::string(table) == "kappa_A" ? "F_11000" : "F_01100";
            for (const auto& row : find_section(sections, table).rows) {
                ++c.rows;
                const bool same = derived.at(row[0]) == formula(row, env, n);
                if (!same && row[0] != known) c.mismatches.push_back(std::string(table) + " at " + row[0]);
            }
        }
    }
    c.notes.push_back("kappa_A at F_11000 and kappa_B at F_01100: the printed entries name the F_220 data "
                      "although these faces lift from F_110; the derived orders are used");
    c.notes.push_back(std::to_string(random_trials) + " random order assignments, exact rational comparison");

    // b rule: index sets add, orders add.
    const CalculusOrders x = make_b(one(Rational(1, 2)), Affine(-2)), y = make_b(one(1), Affine(-1));
    const CalculusOrders xy = b_compose(x, y);
    ++c.rows;
    if (!(xy.k == Affine(-3)) || b_index_110(xy) != one(Rational(3, 2)))
        c.mismatches.push_back("b composition: expected k = -3 and E_110 = 3/2, got " + xy.k.str() + ", " +
                               b_index_110(xy).str());

    // Conic rule and its thresholds: each inequality flips exactly at its boundary.
    const CalculusOrders ca = make_conic(one(1), one(1), one(2), Affine(-2));
    const CalculusOrders cc = conic_compose(ca, ca);
    ++c.rows;
    if (cc.at("F_112") != one(4) || cc.at("F_100") != one(1) || !(cc.k == Affine(-4)))
        c.mismatches.push_back("conic composition of the reference pair");
    const Rational q(1, 7);
    auto violated = [](const std::vector<ConicViolation>& v, const std::string& name) {
        return v.size() == 1 && v[0].inequality == name;
    };
    const CalculusOrders k_at = make_conic(one(1), one(1), one(2), Affine(0));
    const CalculusOrders k_past = make_conic(one(1), one(1), one(2), Affine(-q));
    const CalculusOrders b_at = make_conic(one(1), one(1), one(-1), Affine(-2));
    const CalculusOrders b_past = make_conic(one(1), one(1), one(-1 + q), Affine(-2));
    const std::vector<std::pair<std::string, bool>> flips = {
        {"-k_a > 0", violated(conic_preconditions(k_at, ca), "-k_a > 0") && conic_preconditions(k_past, ca).empty()},
        {"beta_112+alpha_010 > 0", violated(conic_preconditions(ca, b_at), "beta_112+alpha_010 > 0") &&
                                       conic_preconditions(ca, b_past).empty()},
    };
    for (const auto& [name, ok] : flips) {
        ++c.rows;
        if (!ok) c.mismatches.push_back("conic precondition " + name + " does not flip at its threshold");
    }
    return c;
}

AuditCheck audit_face_inventories() {
    AuditCheck c = start("face inventories", "face_inventory.txt");
    for (auto kind : all_space_kinds()) {
        const FaceReport r = face_report(kind);
        ++c.rows;
        for (const auto& line : r.diff) c.mismatches.push_back(std::string(space_kind_name(kind)) + ": " + line);
    }
    const CornerSpace s = build_space(SpaceKind::acc_triple_heat);
    std::vector<std::string> order;
    for (const auto& h : s.history)
        if (h.kind == HistoryEntry::Kind::blowup && h.new_face.rfind("S_", 0) == 0) order.push_back(h.new_face);
    const std::vector<std::string> expect = {"S_11122", "S_11020", "S_01102", "S_10122", "S_111", "S_110",
                                             "S_011",   "S_101",   "S_td",    "S_d20",   "S_d02", "S_d22"};
    ++c.rows;
    if (order != expect) c.mismatches.push_back("acc_triple_heat blowup order differs from the table order");
    return c;
}

AuditCheck audit_kernel_orders() {
    AuditCheck c = start("heat kernel leading orders", "kernel_orders.txt");
    const auto sections = parse_sections(golden_text(c.table));
    for (int n : {3, 4, 7})
        for (Rational mu0 : {Rational(0), Rational(1, 2), Rational(3)})
            for (auto kind : {KernelKind::b_heat_kernel, KernelKind::conic_heat_kernel, KernelKind::sc_heat_kernel,
                              KernelKind::acc_heat_kernel}) {
                const CalculusOrders o = canonical_kernel_orders(kind, n, mu0);
                for (const auto& row : find_section(sections, kernel_kind_name(kind)).rows) {
                    ++c.rows;
                    std::ostringstream where;
                    where << kernel_kind_name(kind) << " n=" << n << " mu0=" << rational_str(mu0) << " " << row[0];
                    if (row[0] == "k") {
                        if (!(o.k == parse_affine(row[1]))) c.mismatches.push_back(where.str());
                        continue;
                    }
                    const IndexSet& e = o.at(row[0]);
                    if (row[1] == "inf") {
                        if (!e.is_infinite()) c.mismatches.push_back(where.str() + " should be infinite");
                        continue;
                    }
                    Rational expect = parse_affine(row[1]).at(n);
                    if (row.size() == 4 && row[2] == "mu0") expect += parse_affine(row[3]).at(n) * mu0;
                    if (e.is_infinite() || e.leading().alpha.at(n) != expect)
                        c.mismatches.push_back(where.str() + ": got " + e.str() + ", table " + rational_str(expect));
                }
            }
    return c;
}

AuditCheck audit_lifted_operator() {
    AuditCheck c = start("lifted heat operator", "lifted_operator.txt");
    const auto rows = lifted_heat_operator_table();
    const auto sections = parse_sections(golden_text(c.table));
    if (sections.empty()) c.mismatches.push_back("empty table");
    for (const auto& g : sections.empty() ? std::vector<std::vector<std::string>>{} : sections.front().rows) {
        ++c.rows;
        auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.face == g[0]; });
        if (it == rows.end()) {
            c.mismatches.push_back(g[0] + " missing");
            continue;
        }
        bool ok = it->prefactor.exponent(g[0]) == parse_affine(g[1]) && it->model_operator == g[2];
        if (g[3] != "-")
            ok = ok && it->time_variable == g[3] && it->time_faces == std::vector<std::string>(g.begin() + 4, g.end());
        if (!ok) c.mismatches.push_back(g[0]);
    }
    return c;
}

AuditCheck audit_densities() {
    AuditCheck c = start("density lifts and b-weight", "sc_composition.txt");
    const auto sections = parse_sections(golden_text(c.table));
    const Monomial mu3 = density_lift(build_space(SpaceKind::sc_triple_heat), {});
    for (const auto& row : find_section(sections, "mu3_lift").rows) {
        ++c.rows;
        if (mu3.exponent(row[0]) != parse_affine(row[1])) c.mismatches.push_back("mu3 at " + row[0]);
    }
    const Monomial half = density_lift(build_space(SpaceKind::sc_heat), {}).pow(Rational(-1, 2));
    for (const auto& row : find_section(sections, "half_density").rows) {
        ++c.rows;
        if (half.exponent(row[0]) != parse_affine(row[1])) c.mismatches.push_back("half density at " + row[0]);
    }
    for (int n : {3, 5}) {
        const Monomial w = sc_triple_b_weight(n);
        for (const auto& row : find_section(sections, "b_weight").rows) {
            ++c.rows;
            if (w.exponent(row[0]).at(n) != parse_affine(row[1]).at(n))
                c.mismatches.push_back("b-weight at " + row[0] + " n=" + std::to_string(n));
        }
    }
    return c;
}

AuditCheck audit_pushforward_map() {
    AuditCheck c = start("center projection faces", "sc_triple_pushforward.txt");
    const CornerSpace triple = build_space(SpaceKind::sc_triple_heat);
    std::map<std::string, int> seen;
    for (const auto& sec : parse_sections(golden_text(c.table)))
        for (const auto& row : sec.rows) {
            ++c.rows;
            if (row.size() != 2) c.mismatches.push_back("malformed row");
            else ++seen[row[0]];
        }
    for (const auto& f : triple.face_names()) {
        if (seen[f] == 0 && triple.face(f).reconstructed)
            c.notes.push_back(f + " is reconstructed and absent from the table; it maps to the interior");
        else if (seen[f] != 1)
            c.mismatches.push_back(f + " listed " + std::to_string(seen[f]) + " times");
    }
    try {
        const BMapSpec m = sc_triple_pushforward_map();
        for (const auto& [target, lift] : m.lifts)
            if (lift.is_one()) c.mismatches.push_back("no source face maps onto " + target);
    } catch (const BlowupError& e) {
        c.mismatches.push_back(e.what());
    }
    return c;
}

std::vector<AuditCheck> audit_all() {
    return {audit_lift_table(),    audit_composition(),     audit_face_inventories(), audit_kernel_orders(),
            audit_lifted_operator(), audit_densities(),     audit_pushforward_map()};
}

nlohmann::json audit_to_json(const std::vector<AuditCheck>& checks) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name},
                       {"table", c.table},
                       {"origin", c.origin},
                       {"rows", c.rows},
                       {"ok", c.ok()},
                       {"mismatches", c.mismatches},
                       {"notes", c.notes}});
    return out;
}

FaceReport face_report(SpaceKind kind, int n) {
    FaceReport r;
    r.kind = space_kind_name(kind);
    const CornerSpace s = build_space(kind, n);
    r.corners = s.corners;
    r.total_faces = int(s.faces.size());

    const auto sections = parse_sections(golden_text("face_inventory.txt"));
    const TableSection& sec = find_section(sections, r.kind);
    std::vector<std::string> scope;
    std::set<std::pair<std::string, std::string>> faces;
    std::set<std::pair<std::string, std::set<std::string>>> corners;
    for (const auto& row : sec.rows) {
        if (row[0] == "scope") scope = row;
        else if (row[0] == "face") faces.insert({row[1], row[2]});
        else if (row[0] == "corner") corners.insert({row[1], {row.begin() + 2, row.end()}});
    }
    if (scope.size() < 2) throw BlowupError("face table for " + r.kind + " has no scope line");
    r.scope = scope[1] == "prefix" && scope.size() > 2 ? "prefix " + scope[2] : scope[1];
    const auto in_scope = inventory(s, scope);
    for (const auto& f : s.faces)
        if (in_scope.count({f.name, origin_name(f.origin)})) r.faces.push_back({f.name, origin_name(f.origin)});
    const auto& got = in_scope;
    for (const auto& f : faces)
        if (!got.count(f)) r.diff.push_back("missing face " + f.first + " (" + f.second + ")");
    for (const auto& f : got)
        if (!faces.count(f)) r.diff.push_back("unexpected face " + f.first + " (" + f.second + ")");
    if (!corners.empty()) {
        std::set<std::pair<std::string, std::set<std::string>>> have;
        for (const auto& c : s.corners) have.insert({c.name, {c.faces.begin(), c.faces.end()}});
        for (const auto& c : corners)
            if (!have.count(c)) r.diff.push_back("missing corner " + c.first);
        for (const auto& c : have)
            if (!corners.count(c)) r.diff.push_back("unexpected corner " + c.first);
    }
    r.golden_match = r.diff.empty();
    return r;
}

nlohmann::json face_report_json(const FaceReport& r) {
    nlohmann::json faces = nlohmann::json::array(), corners = nlohmann::json::array();
    for (const auto& [name, origin] : r.faces) faces.push_back({{"face", name}, {"origin", origin}});
    for (const auto& c : r.corners) corners.push_back({{"corner", c.name}, {"faces", c.faces}});
    return {{"kind", r.kind},      {"scope", r.scope},   {"total_faces", r.total_faces}, {"faces", faces},
            {"corners", corners}, {"golden_match", r.golden_match}, {"diff", r.diff}};
}

std::string face_report_table(const FaceReport& r) {
    std::size_t w = 4;
    for (const auto& f : r.faces) w = std::max(w, f.first.size());
    std::ostringstream os;
    os << r.kind << "  (" << r.faces.size() << " of " << r.total_faces << " faces, scope " << r.scope << ")\n";
    os << "  " << std::string("face") << std::string(w - 4 + 2, ' ') << "origin\n";
    for (const auto& [name, origin] : r.faces) os << "  " << name << std::string(w - name.size() + 2, ' ') << origin << "\n";
    for (const auto& c : r.corners) {
        os << "  " << c.name << std::string(c.name.size() < w ? w - c.name.size() + 2 : 2, ' ') << "corner";
        for (const auto& f : c.faces) os << " " << f;
        os << "\n";
    }
    os << (r.golden_match ? "matches the face table\n" : "DIFFERS from the face table\n");
    for (const auto& d : r.diff) os << "  " << d << "\n";
    return os.str();
}

LiftReport lift_report(const std::string& map, const std::string& monomial) {
    LiftReport r;
    r.map = map;
    const Monomial m = parse_monomial(monomial);
    r.input = m.str();
    const Monomial lifted = lift_monomial(sc_triple_lift_map_derived(map), m);
    r.output = lifted.str();
    // Bare defining functions are checked against the lift table.
    if (m.terms.size() == 1 && m.terms[0].second == Affine(1)) {
        const std::string rho = face_to_rho(m.terms[0].first);
        for (const auto& sec : parse_sections(golden_text("sc_triple_lifts.txt")))
            for (const auto& row : sec.rows)
                if (row.size() >= 4 && row[0] == map && row[1] == rho) {
                    Monomial expect;
                    for (std::size_t i = 3; i < row.size(); ++i) expect.add(rho_to_face(row[i]), Affine(1));
                    r.golden_checked = true;
                    r.expected = expect.str();
                    r.golden_match = expect == lifted;
                }
    }
    return r;
}

} // namespace acclab

#include "calculus_orders.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

namespace acclab {

namespace {

const Affine N = Affine::dim();

Affine half(Affine x) { return x * Rational(1, 2); }

std::vector<std::string> faces_of(Calculus c) {
    switch (c) {
    case Calculus::b: return {"F_110", "F_d2", "F_100", "F_010", "F_001"};
    case Calculus::conic: return {"F_112", "F_d2", "F_100", "F_010", "F_001"};
    case Calculus::sc: return {"F_110", "F_220", "F_d2", "F_100", "F_010", "F_001"};
    case Calculus::acc:
    case Calculus::smooth_eps: {
        std::vector<std::string> out;
        for (const auto& f : build_space(SpaceKind::acc_heat, 3).faces) out.push_back(f.name);
        return out;
    }
    }
    return {};
}

CalculusOrders blank(Calculus c, Affine k, int n) {
    CalculusOrders o;
    o.calculus = c;
    o.n = n;
    o.k = k;
    for (const auto& f : faces_of(c)) o.face_orders[f] = IndexSet::infinite(n);
    o.face_orders["F_d2"] = IndexSet::single(diagonal_order(k), 0, n);
    return o;
}

void require(const CalculusOrders& a, Calculus c, const char* op) {
    if (a.calculus != c)
        throw CalculusError(std::string(op) + " expects " + calculus_name(c) + " calculus elements, got " +
                            calculus_name(a.calculus));
}

void require_same_n(const CalculusOrders& a, const CalculusOrders& b) {
    if (a.n != b.n) throw CalculusError("composition of elements configured with different dimensions");
}

IndexSet times(const IndexSet& e, std::int64_t m, int n) {
    IndexSet out = IndexSet::single(Affine(0), 0, n);
    for (std::int64_t i = 0; i < m; ++i) out = indexset_sum(out, e);
    return out;
}

} // namespace

const char* calculus_name(Calculus c) {
    switch (c) {
    case Calculus::b: return "b";
    case Calculus::conic: return "conic";
    case Calculus::sc: return "sc";
    case Calculus::acc: return "acc";
    case Calculus::smooth_eps: return "smooth_eps";
    }
    return "?";
}

Calculus calculus_from_name(const std::string& s) {
    for (auto c : {Calculus::b, Calculus::conic, Calculus::sc, Calculus::acc, Calculus::smooth_eps})
        if (s == calculus_name(c)) return c;
    throw CalculusError("unknown calculus '" + s + "'");
}

const IndexSet& CalculusOrders::at(const std::string& face) const {
    auto it = face_orders.find(face);
    if (it == face_orders.end())
        throw CalculusError(std::string(calculus_name(calculus)) + " element has no order at " + face);
    return it->second;
}

bool operator==(const CalculusOrders& a, const CalculusOrders& b) {
    auto same_ptr = [](const auto& x, const auto& y) { return (!x && !y) || (x && y && *x == *y); };
    return a.calculus == b.calculus && a.n == b.n && a.k == b.k && a.face_orders == b.face_orders &&
           same_ptr(a.coeff_b, b.coeff_b) && same_ptr(a.coeff_conic, b.coeff_conic);
}

Affine diagonal_order(const Affine& k) { return -half(N + Affine(3)) - k; }

CalculusOrders make_b(const IndexSet& e110, Affine k, int n) {
    CalculusOrders o = blank(Calculus::b, k, n);
    o.face_orders["F_110"] = indexset_shift(e110, Affine(Rational(-1, 2)));
    return o;
}

CalculusOrders make_conic(const IndexSet& e100, const IndexSet& e010, const IndexSet& e112, Affine k, int n) {
    CalculusOrders o = blank(Calculus::conic, k, n);
    o.face_orders["F_100"] = e100;
    o.face_orders["F_010"] = e010;
    o.face_orders["F_112"] = e112;
    return o;
}

CalculusOrders make_sc(const IndexSet& e110, const IndexSet& e220, Affine k, int n) {
    CalculusOrders o = blank(Calculus::sc, k, n);
    o.face_orders["F_110"] = indexset_shift(e110, Affine(Rational(-1, 2)));
    o.face_orders["F_220"] = indexset_shift(e220, -half(N + Affine(2)));
    return o;
}

CalculusOrders make_acc(const IndexSet& e1010, const IndexSet& e1001, const IndexSet& e0110, const IndexSet& e0101,
                        Affine k, int n, std::shared_ptr<const CalculusOrders> coeff_b,
                        std::shared_ptr<const CalculusOrders> coeff_conic) {
    CalculusOrders o = blank(Calculus::acc, k, n);
    o.face_orders["F_1010"] = e1010;
    o.face_orders["F_1001"] = e1001;
    o.face_orders["F_0110"] = e0110;
    o.face_orders["F_0101"] = e0101;
    if (coeff_b && coeff_b->calculus != Calculus::b) throw CalculusError("acc coefficient at F_1010 must be a b element");
    if (coeff_conic && coeff_conic->calculus != Calculus::conic)
        throw CalculusError("acc coefficient at F_0101 must be a conic element");
    o.coeff_b = std::move(coeff_b);
    o.coeff_conic = std::move(coeff_conic);
    o.conjectural = true;
    return o;
}

IndexSet b_index_110(const CalculusOrders& a) {
    require(a, Calculus::b, "b_index_110");
    return indexset_shift(a.at("F_110"), Affine(Rational(1, 2)));
}

IndexSet sc_index_110(const CalculusOrders& a) {
    require(a, Calculus::sc, "sc_index_110");
    return indexset_shift(a.at("F_110"), Affine(Rational(1, 2)));
}

IndexSet sc_index_220(const CalculusOrders& a) {
    require(a, Calculus::sc, "sc_index_220");
    return indexset_shift(a.at("F_220"), half(N + Affine(2)));
}

CalculusOrders b_compose(const CalculusOrders& a, const CalculusOrders& b) {
    require(a, Calculus::b, "b_compose");
    require(b, Calculus::b, "b_compose");
    require_same_n(a, b);
    return make_b(indexset_sum(b_index_110(a), b_index_110(b)), a.k + b.k, a.n);
}

std::vector<ConicViolation> conic_preconditions(const CalculusOrders& a, const CalculusOrders& b) {
    require(a, Calculus::conic, "conic_compose");
    require(b, Calculus::conic, "conic_compose");
    require_same_n(a, b);
    const int n = a.n;
    std::vector<ConicViolation> out;
    // Exact check on rational leaders; an infinite-order face satisfies every bound.
    auto leader = [n](const IndexSet& e) -> std::optional<Rational> {
        if (e.is_infinite()) return std::nullopt;
        return e.leading().alpha.at(n);
    };
    auto check = [&](const char* name, std::optional<Rational> x, std::optional<Rational> y, Rational bound) {
        if (!x || !y) return;
        Rational lhs = *x + *y;
        if (!(lhs > bound)) out.push_back({name, boost::rational_cast<double>(lhs)});
    };
    check("beta_112+alpha_010 > 0", leader(b.at("F_112")), leader(a.at("F_010")), 0);
    check("alpha_112+beta_100 > 0", leader(a.at("F_112")), leader(b.at("F_100")), 0);
    check("-k_a > 0", -a.k.at(n), Rational(0), 0);
    check("-k_b > 0", -b.k.at(n), Rational(0), 0);
    check("beta_100+alpha_010 > -1", leader(b.at("F_100")), leader(a.at("F_010")), -1);
    return out;
}

CalculusOrders conic_compose(const CalculusOrders& a, const CalculusOrders& b) {
    auto v = conic_preconditions(a, b);
    if (!v.empty()) {
        std::string msg = "conic composition precondition violated:";
        for (const auto& x : v) msg += " " + x.inequality + " violated (lhs " + std::to_string(x.lhs) + ");";
        msg.pop_back();
        throw CalculusError(msg);
    }
    return make_conic(a.at("F_100"), b.at("F_010"), indexset_sum(a.at("F_112"), b.at("F_112")), a.k + b.k, a.n);
}

CalculusOrders sc_compose(const CalculusOrders& a, const CalculusOrders& b) {
    require(a, Calculus::sc, "sc_compose");
    require(b, Calculus::sc, "sc_compose");
    require_same_n(a, b);
    return make_sc(indexset_sum(sc_index_110(a), sc_index_110(b)), indexset_sum(sc_index_220(a), sc_index_220(b)),
                   a.k + b.k, a.n);
}

FaceOrders lift_orders(const BMapSpec& map, const FaceOrders& target_orders, int n) {
    LiftingMatrix L = lifting_matrix(map);
    FaceOrders out;
    for (std::size_t j = 0; j < L.cols.size(); ++j) {
        bool any = false;
        IndexSet acc = IndexSet::single(Affine(0), 0, n);
        for (std::size_t i = 0; i < L.rows.size(); ++i) {
            const Affine& e = L.e[i][j];
            if (e == Affine(0)) continue;
            auto it = target_orders.find(L.rows[i]);
            if (it == target_orders.end()) throw CalculusError("no order given at " + L.rows[i]);
            any = true;
            acc = indexset_sum(acc, times(it->second, e.a.numerator(), n));
        }
        out[L.cols[j]] = any ? acc : IndexSet::infinite(n);
    }
    return out;
}

PushforwardResult pushforward_orders(const CornerSpace& space3, const BMapSpec& map_c, const FaceOrders& orders,
                                     const Monomial& bweight) {
    FibrationWitness w = is_b_fibration(map_c);
    if (!w.ok)
        throw CalculusError("pushforward along " + map_c.name + " needs a b-fibration; column " + w.column +
                            " meets rows " + w.row1 + " and " + w.row2);
    const int n = space3.n;
    LiftingMatrix L = lifting_matrix(map_c);
    PushforwardResult res;
    for (const auto& r : L.rows) res.orders[r] = IndexSet::infinite(n);
    std::map<std::string, std::vector<std::pair<std::string, Rational>>> leaders;
    for (const auto& f : space3.faces) {
        auto it = orders.find(f.name);
        if (it == orders.end()) throw CalculusError("no order given at " + f.name);
        IndexSet total = indexset_shift(it->second, bweight.exponent(f.name));
        std::string target;
        for (std::size_t i = 0; i < L.rows.size(); ++i) {
            auto c = std::find(L.cols.begin(), L.cols.end(), f.name);
            if (c != L.cols.end() && L.e[i][c - L.cols.begin()] != Affine(0)) target = L.rows[i];
        }
        if (target.empty()) {
            if (!total.is_infinite() && !(total.leading().alpha.at(n) > Rational(0)))
                throw IntegrabilityError(f.name, total.str());
            continue;
        }
        if (total.is_infinite()) continue;
        leaders[target].push_back({f.name, total.leading().alpha.at(n)});
        res.orders[target] = indexset_union(res.orders[target], total);
    }
    for (const auto& [t, ls] : leaders) {
        for (std::size_t i = 0; i < ls.size(); ++i)
            for (std::size_t j = i + 1; j < ls.size(); ++j)
                if (ls[i].second == ls[j].second)
                    res.coincidences.push_back(t + ": " + ls[i].first + " and " + ls[j].first);
    }
    return res;
}

Monomial sc_triple_b_weight(int n) {
    CornerSpace triple = build_space(SpaceKind::sc_triple_heat, n);
    CornerSpace dbl = build_space(SpaceKind::sc_heat, n);
    Monomial mu3 = density_lift(triple, {});
    Monomial nu = density_lift(dbl, {}).pow(Rational(-1, 2));
    Monomial w = mu3;
    BMapSpec maps[] = {sc_triple_lift_map("beta_L", n), sc_triple_lift_map("beta_R", n),
                       sc_triple_lift_map("beta_C", n)};
    for (const auto& m : maps) w.mul(lift_monomial(m, nu));
    Monomial all_rho;
    for (const auto& f : dbl.faces) all_rho.add(f.name, Affine(1));
    Monomial support = lift_monomial(maps[2], all_rho);
    Monomial out;
    for (const auto& f : triple.faces) {
        Affine e = w.exponent(f.name) + Affine(1);
        if (support.exponent(f.name) != Affine(0)) e = e - Affine(1);
        out.add(f.name, e);
    }
    out.prune();
    return out;
}

ScPipeline sc_compose_pipeline(const CalculusOrders& a, const CalculusOrders& b) {
    require(a, Calculus::sc, "sc_compose");
    require(b, Calculus::sc, "sc_compose");
    require_same_n(a, b);
    const int n = a.n;
    CornerSpace triple = build_space(SpaceKind::sc_triple_heat, n);
    ScPipeline p;
    p.kappa_a = lift_orders(sc_triple_lift_map("beta_L", n), a.face_orders, n);
    p.kappa_b = lift_orders(sc_triple_lift_map("beta_R", n), b.face_orders, n);
    p.bweight = sc_triple_b_weight(n);
    for (const auto& f : triple.faces) {
        IndexSet prod = indexset_sum(p.kappa_a.at(f.name), p.kappa_b.at(f.name));
        p.product[f.name] = prod;
        p.pushforward_input[f.name] = indexset_shift(prod, p.bweight.exponent(f.name));
    }
    p.result = pushforward_orders(triple, sc_triple_pushforward_map(n), p.product, p.bweight);
    CalculusOrders c = blank(Calculus::sc, a.k + b.k, n);
    for (const auto& [f, e] : p.result.orders) c.face_orders[f] = e;
    if (c.at("F_d2") != IndexSet::single(diagonal_order(c.k), 0, n))
        throw CalculusError("diagonal order " + c.at("F_d2").str() + " inconsistent with k = " + c.k.str());
    for (const auto& s : p.result.coincidences) c.notes.push_back("coincident leading orders at " + s);
    p.composed = c;
    return p;
}

CalculusOrders acc_compose(const CalculusOrders& a, const CalculusOrders& b) {
    require(a, Calculus::acc, "acc_compose");
    require(b, Calculus::acc, "acc_compose");
    require_same_n(a, b);
    std::shared_ptr<const CalculusOrders> cb, cc;
    if (a.coeff_b && b.coeff_b) {
        try {
            cb = std::make_shared<CalculusOrders>(b_compose(*a.coeff_b, *b.coeff_b));
        } catch (const CalculusError& e) {
            throw CalculusError(std::string("coefficient at F_1010: ") + e.what());
        }
    }
    if (a.coeff_conic && b.coeff_conic) {
        try {
            cc = std::make_shared<CalculusOrders>(conic_compose(*a.coeff_conic, *b.coeff_conic));
        } catch (const CalculusError& e) {
            throw CalculusError(std::string("coefficient at F_0101: ") + e.what());
        }
    }
    CalculusOrders c = make_acc(indexset_sum(a.at("F_1010"), b.at("F_1010")), indexset_sum(a.at("F_1001"), b.at("F_1001")),
                                indexset_sum(a.at("F_0110"), b.at("F_0110")), indexset_sum(a.at("F_0101"), b.at("F_0101")),
                                a.k + b.k, a.n, cb, cc);
    c.notes.push_back("conjectural: the acc composition rule is stated as an expectation");
    return c;
}

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
    case KernelKind::b_heat_kernel: return "b_heat_kernel";
    case KernelKind::conic_heat_kernel: return "conic_heat_kernel";
    case KernelKind::sc_heat_kernel: return "sc_heat_kernel";
    case KernelKind::acc_heat_kernel: return "acc_heat_kernel";
    }
    return "?";
}

KernelKind kernel_kind_from_name(const std::string& s) {
    for (auto k : {KernelKind::b_heat_kernel, KernelKind::conic_heat_kernel, KernelKind::sc_heat_kernel,
                   KernelKind::acc_heat_kernel})
        if (s == kernel_kind_name(k)) return k;
    throw CalculusError("unknown heat kernel '" + s + "'");
}

CalculusOrders canonical_kernel_orders(KernelKind kind, int n, Rational mu0) {
    const Affine k(-2);
    switch (kind) {
    case KernelKind::b_heat_kernel: return make_b(IndexSet::single(Affine(Rational(1, 2)), 0, n), k, n);
    case KernelKind::conic_heat_kernel: {
        Affine side = -half(N + Affine(1)) + Affine(mu0);
        Affine front = Affine(Rational(-3, 2)) + half(N * Rational(2) + Affine(1)) + Affine(mu0 * 2);
        return make_conic(IndexSet::single(side, 0, n), IndexSet::single(side, 0, n), IndexSet::single(front, 0, n), k, n);
    }
    case KernelKind::sc_heat_kernel: return make_sc(IndexSet::infinite(n), IndexSet::single(Affine(0), 0, n), k, n);
    case KernelKind::acc_heat_kernel: {
        auto cb = std::make_shared<CalculusOrders>(canonical_kernel_orders(KernelKind::b_heat_kernel, n, mu0));
        auto cc = std::make_shared<CalculusOrders>(canonical_kernel_orders(KernelKind::conic_heat_kernel, n, mu0));
        IndexSet two = IndexSet::single(Affine(2), 0, n);
        return make_acc(two, two, two, IndexSet::single(Affine(0), 0, n), k, n, cb, cc);
    }
    }
    throw CalculusError("unknown heat kernel");
}

std::vector<LiftedOperatorFace> lifted_heat_operator_table() {
    return {
        {"F_1010", Monomial{{"F_1010", -2}}, "b_laplacian_on_cylinder", "tau", {"F_1001", "F_0110"},
         "rho_1010^(-2) (d_tau + Delta_{b,sigma}),  tau = t/(rho_1001 rho_0110)^2"},
        {"F_0101", Monomial{}, "conic_laplacian_on_cone", "t'", {"F_1010"}, "d_t' + Delta_{0,s},  t' = t/rho_1010^2"},
        {"F_0110", Monomial{{"F_0110", -2}}, "none", "", {}, "rho_0110^(-2)"},
        {"F_1001", Monomial{{"F_1001", -2}}, "none", "", {}, "rho_1001^(-2)"},
    };
}

std::string OrderFormula::str() const {
    if (infinite) return "inf";
    std::string out = constant.str();
    for (const auto& s : symbols) out += (s.front() == '-' ? "" : "+") + s;
    return out;
}

OrderFormula parse_order_formula(const std::vector<std::string>& tokens) {
    OrderFormula f;
    if (tokens.empty()) throw CalculusError("empty order formula");
    if (tokens[0] == "inf") {
        f.infinite = true;
        return f;
    }
    f.constant = parse_affine(tokens[0]);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::string t = tokens[i];
        std::size_t start = 0;
        while (start <= t.size()) {
            auto plus = t.find('+', start);
            std::string s = t.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
            if (!s.empty()) f.symbols.push_back(s);
            if (plus == std::string::npos) break;
            start = plus + 1;
        }
    }
    return f;
}

IndexSet eval_order_formula(const OrderFormula& f, const std::map<std::string, IndexSet>& env, int n) {
    if (f.infinite) return IndexSet::infinite(n);
    IndexSet acc = IndexSet::single(f.constant, 0, n);
    for (const auto& s : f.symbols) {
        auto it = env.find(s);
        if (it == env.end()) throw CalculusError("order formula uses unknown symbol " + s);
        acc = indexset_sum(acc, it->second);
    }
    return acc;
}

namespace {

nlohmann::json affine_to_json(const Affine& a) {
    if (a.is_constant() && a.a.denominator() == 1) return a.a.numerator();
    return a.str();
}

Affine affine_of(const nlohmann::json& j) {
    if (j.is_number_integer()) return Affine(j.get<std::int64_t>());
    if (j.is_string()) return parse_affine(j.get<std::string>());
    throw CalculusError("bad rational value " + j.dump());
}

} // namespace

nlohmann::json orders_to_json(const CalculusOrders& a) {
    nlohmann::json j;
    j["calculus"] = calculus_name(a.calculus);
    j["n"] = a.n;
    j["k"] = affine_to_json(a.k);
    j["faces"] = nlohmann::json::object();
    for (const auto& [f, e] : a.face_orders) j["faces"][f] = indexset_to_json(e);
    if (a.coeff_b) j["coeff_b"] = orders_to_json(*a.coeff_b);
    if (a.coeff_conic) j["coeff_conic"] = orders_to_json(*a.coeff_conic);
    if (a.conjectural) j["conjectural"] = true;
    if (!a.notes.empty()) j["notes"] = a.notes;
    return j;
}

CalculusOrders orders_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw CalculusError("calculus element must be a JSON object");
    Calculus c = calculus_from_name(j.at("calculus").get<std::string>());
    int n = j.value("n", 3);
    Affine k = j.contains("k") ? affine_of(j.at("k")) : Affine(0);
    CalculusOrders o = blank(c, k, n);
    if (j.contains("faces")) {
        for (const auto& [f, e] : j.at("faces").items()) {
            if (!o.face_orders.count(f))
                throw CalculusError("face " + f + " is not a face of the " + calculus_name(c) + " heat space");
            o.face_orders[f] = indexset_from_json(e, n);
        }
    }
    if (o.at("F_d2") != IndexSet::single(diagonal_order(k), 0, n))
        throw CalculusError("diagonal order " + o.at("F_d2").str() + " inconsistent with k = " + k.str());
    if (j.contains("coeff_b")) o.coeff_b = std::make_shared<CalculusOrders>(orders_from_json(j.at("coeff_b")));
    if (j.contains("coeff_conic")) o.coeff_conic = std::make_shared<CalculusOrders>(orders_from_json(j.at("coeff_conic")));
    if (c == Calculus::acc) {
        if (o.coeff_b && o.coeff_b->calculus != Calculus::b) throw CalculusError("coeff_b must be a b element");
        if (o.coeff_conic && o.coeff_conic->calculus != Calculus::conic)
            throw CalculusError("coeff_conic must be a conic element");
        o.conjectural = true;
    }
    return o;
}

std::string orders_table(const CalculusOrders& a) {
    std::ostringstream os;
    os << "calculus " << calculus_name(a.calculus) << "  n=" << a.n << "  k=" << a.k.str();
    if (a.conjectural) os << "  (conjectural)";
    os << "\n";
    std::vector<std::string> order = faces_of(a.calculus);
    for (const auto& f : order) {
        const IndexSet& e = a.at(f);
        os << "  " << f << std::string(f.size() < 8 ? 8 - f.size() : 1, ' ');
        if (e.is_infinite()) {
            os << "inf\n";
            continue;
        }
        IndexTerm t = e.leading();
        os << t.alpha.str();
        if (t.p) os << " (log^" << t.p << ")";
        os << "   " << e.str() << "\n";
    }
    if (a.coeff_b) os << "coefficient at F_1010:\n" << orders_table(*a.coeff_b);
    if (a.coeff_conic) os << "coefficient at F_0101:\n" << orders_table(*a.coeff_conic);
    for (const auto& s : a.notes) os << "note: " << s << "\n";
    return os.str();
}

} // namespace acclab

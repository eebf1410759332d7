#include "commands.hpp"

#include "audit.hpp"
#include "calculus_orders.hpp"
#include "golden.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace acclab {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, p);
}

namespace {

nlohmann::json number_or_null(bool present, double v) { return present ? nlohmann::json(v) : nlohmann::json(); }

std::string with_prefix(const ExperimentConfig& cfg, const std::string& name) {
    return cfg.prefix.empty() ? name : cfg.prefix + "_" + name;
}

void add_outputs(CommandResult& r, const ExperimentConfig& cfg, const std::string& stem, const std::string& csv) {
    if (cfg.write_csv) r.artifacts.push_back({with_prefix(cfg, stem + ".csv"), csv});
    if (cfg.write_json) r.artifacts.push_back({with_prefix(cfg, stem + ".json"), r.summary.dump(2) + "\n"});
}

nlohmann::json model_json(const ExperimentConfig& cfg) {
    return {{"n", cfg.model.n},
            {"c", cfg.model.c},
            {"profile", profile_name(cfg.model.profile)},
            {"outer_bc", outer_bc_name(cfg.model.outer_bc)},
            {"cap_match_radius", cfg.model.cap_match_radius},
            {"mode_count", cfg.mode_count},
            {"N", cfg.N}};
}

// Eigenvalues at one eps that agree within their error estimates form one cluster.
std::vector<Cluster> spectrum_clusters(const EigenResult& res, const std::vector<Cluster>& refs, double rel_floor) {
    std::vector<Cluster> out;
    for (const auto& e : res.entries) {
        if (!out.empty()) {
            Cluster& last = out.back();
            const double tol = std::max(last.discretization_err + e.err, rel_floor * e.lambda);
            if (std::abs(e.lambda - last.center) <= tol) {
                last.center = (last.center * last.multiplicity + e.lambda * e.mult) / (last.multiplicity + e.mult);
                last.multiplicity += e.mult;
                last.discretization_err = std::max(last.discretization_err, e.err);
                last.curves.emplace_back(e.ell, e.k);
                continue;
            }
        }
        Cluster c;
        c.center = e.lambda;
        c.multiplicity = e.mult;
        c.discretization_err = e.err;
        c.curves.emplace_back(e.ell, e.k);
        out.push_back(c);
    }
    for (auto& c : out) {
        const Cluster* best = nullptr;
        for (const auto& r : refs)
            if (!best || std::abs(r.center - c.center) < std::abs(best->center - c.center)) best = &r;
        if (!best) continue;
        c.reference = best->center;
        c.reference_multiplicity = best->multiplicity;
        c.gap = std::abs(best->center - c.center);
        c.tolerance = std::max(1e-3 * best->center, 3 * c.discretization_err);
        c.matched = c.gap <= c.tolerance;
    }
    return out;
}

std::vector<Cluster> reference_clusters(const WarpFamily& fam, int per_mode) {
    std::vector<Cluster> refs;
    for (const auto& e : conic_reference_spectrum(fam, per_mode).entries) {
        if (!refs.empty() && std::abs(e.lambda - refs.back().center) <= 1e-12 * e.lambda) {
            refs.back().multiplicity += e.mult;
            continue;
        }
        Cluster r;
        r.center = e.lambda;
        r.multiplicity = e.mult;
        refs.push_back(r);
    }
    return refs;
}

} // namespace

std::string spectrum_csv(const std::vector<EigenResult>& spectra) {
    std::string s = "eps,mode_mu,mode_mult,k,lambda,err_est\n";
    for (const auto& r : spectra)
        for (const auto& e : r.entries)
            s += format_number(r.eps) + "," + format_number(e.mu) + "," + std::to_string(e.mult) + "," +
                 std::to_string(e.k) + "," + format_number(e.lambda) + "," + format_number(e.err) + "\n";
    return s;
}

std::string heat_csv(const DecayTable& tab) {
    std::string s = "regime,eps,t_or_tau,x,xprime,value_model,value_eps,abs_err\n";
    for (const auto& r : tab.rows)
        s += std::string(regime_name(r.regime)) + "," + format_number(r.eps) + "," + format_number(r.t) + "," +
             format_number(r.x) + "," + format_number(r.xp) + "," + format_number(r.value_model) + "," +
             format_number(r.value_eps) + "," + format_number(r.abs_err) + "\n";
    return s;
}

nlohmann::json clusters_json(const std::vector<Cluster>& clusters) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : clusters)
        out.push_back({{"center", c.center},
                       {"multiplicity", c.multiplicity},
                       {"matched_reference", number_or_null(c.matched, c.reference)},
                       {"gap", c.gap}});
    return out;
}

nlohmann::json decay_json(const DecayTable& tab) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < tab.eps.size(); ++i)
        rows.push_back({{"eps", tab.eps[i]}, {"max_abs_err", tab.d[i]}, {"max_rel_err", tab.d_rel[i]}});
    nlohmann::json j = {{"regime", regime_name(tab.regime)},
                        {"decay", rows},
                        {"strictly_decreasing", tab.strictly_decreasing},
                        {"notes", tab.notes}};
    if (tab.regime == Regime::scaled_F1010) j["truncation_influence"] = tab.truncation_influence;
    return j;
}

CommandResult cmd_faces(const std::string& space_kind, int n) {
    const auto kind = space_kind_from_name(space_kind);
    if (!kind) {
        std::string names;
        for (auto k : all_space_kinds()) names += std::string(names.empty() ? "" : ", ") + space_kind_name(k);
        throw BlowupError("unknown space kind '" + space_kind + "' (expected one of " + names + ")");
    }
    const FaceReport rep = face_report(*kind, n);
    CommandResult r;
    r.status = rep.golden_match ? 0 : 1;
    r.text = face_report_table(rep);
    r.summary = face_report_json(rep);
    r.artifacts.push_back({"faces_" + rep.kind + ".json", r.summary.dump(2) + "\n"});
    return r;
}

CommandResult cmd_lift(const std::string& map, const std::string& monomial) {
    const LiftReport rep = lift_report(map, monomial);
    CommandResult r;
    r.text = rep.output + "\n";
    if (rep.golden_checked)
        r.text += rep.golden_match ? "matches the lift table\n" : "DIFFERS from the lift table: " + rep.expected + "\n";
    r.status = rep.golden_checked && !rep.golden_match ? 1 : 0;
    r.summary = {{"map", rep.map}, {"input", rep.input}, {"output", rep.output}, {"golden_checked", rep.golden_checked}};
    if (rep.golden_checked) {
        r.summary["golden_match"] = rep.golden_match;
        r.summary["expected"] = rep.expected;
    }
    r.artifacts.push_back({"lift.json", r.summary.dump(2) + "\n"});
    return r;
}

CommandResult cmd_compose(const std::string& calculus, const std::string& a_json, const std::string& b_json) {
    const Calculus kind = calculus_from_name(calculus);
    auto load = [&](const std::string& text, const char* which) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw CalculusError(std::string("operand ") + which + " is not valid JSON: " + e.what());
        }
        CalculusOrders o = orders_from_json(j);
        if (o.calculus != kind)
            throw CalculusError(std::string("operand ") + which + " is a " + calculus_name(o.calculus) +
                                " element, expected " + calculus_name(kind));
        return o;
    };
    const CalculusOrders a = load(a_json, "A"), b = load(b_json, "B");
    CalculusOrders c;
    switch (kind) {
    case Calculus::b: c = b_compose(a, b); break;
    case Calculus::conic: c = conic_compose(a, b); break;
    case Calculus::sc: c = sc_compose(a, b); break;
    case Calculus::acc: c = acc_compose(a, b); break;
    default: throw CalculusError(std::string("no composition rule for the ") + calculus_name(kind) + " calculus");
    }
    CommandResult r;
    r.summary = orders_to_json(c);
    r.summary["conjectural"] = c.conjectural;
    r.text = orders_table(c);
    r.artifacts.push_back({"compose_" + calculus + ".json", r.summary.dump(2) + "\n"});
    return r;
}

CommandResult cmd_spectrum(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    const SpectrumOptions opt = cfg.spectrum_options(jobs);
    const std::vector<Cluster> refs = reference_clusters(cfg.model, cfg.per_mode);
    std::vector<EigenResult> spectra;
    nlohmann::json per_eps = nlohmann::json::array();
    for (double eps : cfg.schedule) {
        spectra.push_back(assemble_spectrum(cfg.model, eps, opt));
        const EigenResult& res = spectra.back();
        per_eps.push_back({{"eps", eps},
                           {"complete_count", res.complete_count},
                           {"tail_bound", res.tail_bound},
                           {"clusters", clusters_json(spectrum_clusters(res, refs, 1e-9))},
                           {"notes", res.notes}});
    }
    CommandResult r;
    r.summary = {{"command", "spectrum"}, {"model", model_json(cfg)}, {"spectra", per_eps}};
    std::ostringstream os;
    for (const auto& res : spectra)
        os << "eps " << format_number(res.eps) << ": " << res.entries.size() << " eigenvalues, "
           << res.complete_count << " complete\n";
    r.text = os.str();
    add_outputs(r, cfg, "spectrum", spectrum_csv(spectra));
    return r;
}

CommandResult cmd_flow(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    SpectralFlow flow = spectral_flow(cfg.model, cfg.schedule, cfg.flow_options(jobs));
    // Only the leading clusters on each side enter the verdict.
    const std::size_t K = std::size_t(cfg.cluster_count);
    if (flow.clusters.size() > K) flow.clusters.resize(K);
    if (flow.references.size() > K) flow.references.resize(K);
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& c : flow.curves)
        curves.push_back({{"ell", c.ell},
                          {"k", c.k},
                          {"mult", c.mult},
                          {"mu", c.mu},
                          {"lambda", c.lambda},
                          {"rates", c.rates},
                          {"limit", c.limit},
                          {"window", c.window}});
    CommandResult r;
    r.summary = {{"command", "flow"},
                 {"model", model_json(cfg)},
                 {"schedule", flow.schedule},
                 {"clusters", clusters_json(flow.clusters)},
                 {"references", clusters_json(flow.references)},
                 {"curves", curves},
                 {"computed_in_reference", flow.computed_in_reference},
                 {"reference_in_computed", flow.reference_in_computed},
                 {"multiplicities_match", flow.multiplicities_match},
                 {"unmatched", flow.unmatched},
                 {"verdict", flow.verdict}};
    std::ostringstream os;
    os << "verdict: " << flow.verdict << "\n";
    for (const auto& c : flow.clusters)
        os << "  " << format_number(c.center) << " x" << c.multiplicity << "  reference "
           << (c.matched ? format_number(c.reference) : std::string("none")) << "  gap " << format_number(c.gap)
           << "\n";
    for (const auto& u : flow.unmatched) os << "  " << u << "\n";
    r.text = os.str();
    const bool holds = flow.computed_in_reference && flow.reference_in_computed && flow.multiplicities_match;
    r.status = holds ? 0 : 1;
    add_outputs(r, cfg, "flow", spectrum_csv(flow.spectra));
    return r;
}

CommandResult cmd_heat(const ExperimentConfig& cfg, int jobs, const std::string& regime) {
    cfg.validate();
    ProbeSpec spec = cfg.probe;
    try {
        if (!regime.empty()) spec.regime = regime_from_name(regime);
    } catch (const HeatError& e) {
        throw ConfigError(e.what());
    }
    spec.jobs = jobs;
    const DecayTable tab = heat_probe(cfg.model, cfg.schedule, spec);
    CommandResult r;
    r.summary = {{"command", "heat"}, {"model", model_json(cfg)}, {"decay_tables", {decay_json(tab)}}};
    std::ostringstream os;
    os << regime_name(tab.regime) << "\n";
    for (std::size_t i = 0; i < tab.eps.size(); ++i)
        os << "  eps " << format_number(tab.eps[i]) << "  max abs err " << format_number(tab.d[i]) << "  max rel err "
           << format_number(tab.d_rel[i]) << "\n";
    os << (tab.strictly_decreasing ? "strictly decreasing\n" : "NOT strictly decreasing\n");
    r.text = os.str();
    add_outputs(r, cfg, std::string("heat_") + regime_name(tab.regime), heat_csv(tab));
    return r;
}

CommandResult cmd_verify_tables() {
    CommandResult r;
    const std::vector<AuditCheck> checks = audit_all();
    r.summary = {{"checks", audit_to_json(checks)}};
    std::ostringstream os;
    bool ok = true;
    for (const auto& c : checks) {
        ok = ok && c.ok();
        os << (c.ok() ? "PASS " : "FAIL ") << c.name << "  (" << c.rows << " rows, " << c.origin << ")\n";
        for (const auto& m : c.mismatches) os << "    " << m << "\n";
        for (const auto& n : c.notes) os << "    note: " << n << "\n";
    }
    r.status = ok ? 0 : 1;
    r.summary["ok"] = ok;
    r.text = os.str();
    r.artifacts.push_back({"verify_tables.json", r.summary.dump(2) + "\n"});
    return r;
}

} // namespace acclab

#include "audit.hpp"
#include "calculus_orders.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "golden.hpp"

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace acclab;

namespace {

const char* kQuick = R"(
[model]
n = 3
c = 1
profile = capped
mode_count = 3

[schedule]
eps = 0.2, 0.1, 0.05, 0.025

[solver]
N = 128
per_mode = 3
cluster_count = 3
extrapolation_points = 3
)";

std::string artifact(const CommandResult& r, const std::string& name) {
    for (const auto& a : r.artifacts)
        if (a.name == name) return a.content;
    FAIL("missing artifact " << name);
    return {};
}

// Sets an environment variable for the lifetime of the guard.
struct EnvGuard {
    std::string key;
    EnvGuard(const std::string& k, const std::string& v) : key(k) { setenv(k.c_str(), v.c_str(), 1); }
    ~EnvGuard() { unsetenv(key.c_str()); }
};

} // namespace

TEST_CASE("config parsing and validation") {
    const ExperimentConfig c = parse_config(kQuick);
    CHECK(c.model.profile == Profile::capped);
    CHECK(c.model.cross_section.modes.size() == 3);
    CHECK(c.schedule == std::vector<double>{0.2, 0.1, 0.05, 0.025});
    CHECK(c.N == 128);
    CHECK(c.tolerance == 1e-2);
    CHECK(c.write_csv);

    const ExperimentConfig d = parse_config("");
    CHECK(d.schedule == default_schedule());
    CHECK(d.model.cross_section.modes.size() == 5);

    auto throws = [](const std::string& text, const std::string& needle) {
        try {
            parse_config(text);
            FAIL("expected a config error for: " << text);
        } catch (const ConfigError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
        }
    };
    throws("[schedule]\neps =\n", "schedule.eps is empty");
    throws("[schedule]\neps = 0.1, 0.2\n", "strictly decreasing");
    throws("[schedule]\neps = 0.1, 0.1\n", "strictly decreasing");
    throws("[solver]\ntolerance = 0\n", "tolerance must be > 0");
    throws("[solver]\ntolerance = -1e-3\n", "tolerance must be > 0");
    throws("[model]\nprofile = torus\n", "unknown profile");
    throws("[model]\nouter_bc = robin\n", "unknown outer_bc");
    throws("[probes]\nregime = sideways\n", "unknown regime");
    throws("[solver]\nscheme = spectral\n", "not supported");
    throws("[model]\ncolour = red\n", "unknown key model.colour");
    throws("[plots]\nx = 1\n", "unknown section");
    throws("[model]\nn = three\n", "not an integer");
    throws("[outputs]\nformats = xml\n", "unknown format");
    throws("[model]\nmode_count = 0\n", "mode_count");
}

TEST_CASE("numbers print with 17 significant digits regardless of locale") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(9.869604401089358) == "9.869604401089358");
    CHECK(format_number(1e-20) == "9.9999999999999995e-21");
    CHECK(format_number(-2.5) == "-2.5");
    // The C locale is the only one guaranteed to exist; a comma locale, when
    // installed, must not change the output.
    for (const char* loc : {"de_DE.UTF-8", "fr_FR.UTF-8"})
        if (std::setlocale(LC_ALL, loc)) {
            CHECK(format_number(0.5) == "0.5");
            std::setlocale(LC_ALL, "C");
        }
}

TEST_CASE("faces and lift commands") {
    auto b = cmd_faces("b_heat");
    CHECK(b.status == 0);
    CHECK(b.summary["faces"].size() == 5);
    CHECK(cmd_faces("sc_heat").summary["faces"].size() == 6);
    auto acc = cmd_faces("acc_triple_heat");
    CHECK(acc.summary["faces"].size() == 12);
    CHECK(acc.summary["faces"][0]["face"] == "S_11122");
    CHECK_THROWS_AS(cmd_faces("klein_bottle"), BlowupError);

    auto r = cmd_lift("beta_R", "rho_d2");
    CHECK(r.summary["output"] == "rho_d3·rho_d02");
    CHECK(r.summary["golden_match"] == true);
    CHECK(r.status == 0);
    // The computed lift includes the scattering face over {x = x'' = 0}, which the
    // printed row omits; the command reports the difference and exits 1.
    auto l100 = cmd_lift("beta_L", "rho_100");
    CHECK(parse_monomial(l100.summary["output"]) == parse_monomial("rho_10000 rho_10100 rho_20200"));
    CHECK(l100.summary["golden_match"] == false);
    CHECK(l100.status == 1);
    auto trivial = cmd_lift("beta_C", "1");
    CHECK(trivial.summary["output"] == "1");
    CHECK(trivial.summary["golden_checked"] == false);
    CHECK_THROWS(cmd_lift("beta_L", "rho_nowhere"));
}

TEST_CASE("compose command") {
    auto one = [](Rational a) { return IndexSet::single(Affine(a)); };
    const std::string a = orders_to_json(make_conic(one(1), one(1), one(2), Affine(-2))).dump();
    const std::string k0 = orders_to_json(make_conic(one(1), one(1), one(2), Affine(0))).dump();
    auto r = cmd_compose("conic", a, a);
    CHECK(r.summary["k"] == -4);
    CHECK(r.summary["conjectural"] == false);
    try {
        cmd_compose("conic", k0, a);
        FAIL("expected the -k_a > 0 precondition");
    } catch (const CalculusError& e) {
        CHECK(std::string(e.what()).find("-k_a > 0 violated") != std::string::npos);
    }
    CHECK_THROWS_AS(cmd_compose("sc", a, a), CalculusError);
    CHECK_THROWS_AS(cmd_compose("conic", "{not json", a), CalculusError);

    const std::string s = orders_to_json(make_sc(one(0), one(0), Affine(-2))).dump();
    auto sc = cmd_compose("sc", s, s);
    CHECK(sc.summary["faces"]["F_100"] == "inf");
    CHECK(sc.text.find("F_220") != std::string::npos);

    auto cb = std::make_shared<const CalculusOrders>(make_b(one(Rational(1, 2)), Affine(-2)));
    auto cc = std::make_shared<const CalculusOrders>(make_conic(one(1), one(1), one(2), Affine(-2)));
    const std::string acc = orders_to_json(make_acc(one(2), one(2), one(2), one(0), Affine(-2), 3, cb, cc)).dump();
    CHECK(cmd_compose("acc", acc, acc).summary["conjectural"] == true);
}

TEST_CASE("spectrum and flow outputs are byte-identical across runs") {
    const ExperimentConfig cfg = parse_config(kQuick);
    auto s1 = cmd_spectrum(cfg, 1), s2 = cmd_spectrum(cfg, 2);
    REQUIRE(s1.artifacts.size() == 2);
    CHECK(artifact(s1, "spectrum.csv") == artifact(s2, "spectrum.csv"));
    CHECK(artifact(s1, "spectrum.json") == artifact(s2, "spectrum.json"));
    const std::string csv = artifact(s1, "spectrum.csv");
    CHECK(csv.rfind("eps,mode_mu,mode_mult,k,lambda,err_est\n", 0) == 0);
    CHECK(csv.find("0.20000000000000001,0,1,1,") != std::string::npos);

    auto f = cmd_flow(cfg, 1);
    CHECK(f.summary["verdict"] == "both inclusions hold, multiplicities match");
    CHECK(f.status == 0);
    const auto& cl = f.summary["clusters"];
    REQUIRE(cl.size() == 3);
    for (const auto& c : cl) {
        CHECK(c.contains("center"));
        CHECK(c.contains("multiplicity"));
        CHECK(c.contains("matched_reference"));
        CHECK(c.contains("gap"));
    }
    CHECK(artifact(f, "flow.json") == artifact(cmd_flow(cfg, 1), "flow.json"));

    ExperimentConfig neck = cfg;
    neck.model = WarpFamily::make(3, 1.0, Profile::neck, 2);
    auto fn = cmd_flow(neck, 1);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(fn.summary["clusters"][i]["multiplicity"] == 2 * cl[i]["multiplicity"].get<int>());

    ExperimentConfig empty = cfg;
    empty.schedule.clear();
    CHECK_THROWS_AS(cmd_spectrum(empty, 1), ConfigError);
}

TEST_CASE("heat command writes decay tables") {
    ExperimentConfig cfg = parse_config(std::string(kQuick) + R"(
[probes]
regime = interior_F0101
times = 0.2, 0.5
N = 128
count = 20
)");
    cfg.model = WarpFamily::make(3, 0.5, Profile::capped, 10);
    auto r = cmd_heat(cfg, 1);
    const std::string csv = artifact(r, "heat_interior_F0101.csv");
    CHECK(csv.rfind("regime,eps,t_or_tau,x,xprime,value_model,value_eps,abs_err\n", 0) == 0);
    const auto& tab = r.summary["decay_tables"][0];
    CHECK(tab["decay"].size() == 4);
    CHECK(tab["strictly_decreasing"] == true);
    CHECK(csv == heat_csv(heat_probe(cfg.model, cfg.schedule, cfg.probe)));
    CHECK_THROWS_AS(cmd_heat(cfg, 1, "nowhere"), ConfigError);
}

TEST_CASE("verify-tables aggregates every golden check") {
    auto all = cmd_verify_tables();
    const auto& checks = all.summary["checks"];
    REQUIRE(checks.size() == 7);
    bool every = true;
    for (const auto& c : checks) every = every && c["ok"].get<bool>();
    CHECK(all.status == (every ? 0 : 1));
    // The computed lifts differ from nine printed rows; every other table agrees.
    CHECK(checks[0]["ok"] == false);
    CHECK(checks[0]["mismatches"].size() == 9);
    for (std::size_t i = 1; i < checks.size(); ++i) CHECK_MESSAGE(checks[i]["ok"] == true, checks[i]["name"]);

    // An override directory with a corrupted face inventory flips that check.
    const auto dir = std::filesystem::temp_directory_path() / "acclab_golden_override";
    std::filesystem::create_directories(dir);
    std::string text = golden_text("face_inventory.txt");
    const auto pos = text.find("F_220");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 5, "F_330");
    std::ofstream(dir / "face_inventory.txt") << text;
    auto index_of = [&](const nlohmann::json& cs) {
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (cs[i]["table"] == "face_inventory.txt") return i;
        FAIL("no face inventory check");
        return std::size_t(0);
    };
    {
        EnvGuard env("ACCLAB_DATA_DIR", dir.string());
        auto bad = cmd_verify_tables();
        const auto& c = bad.summary["checks"][index_of(bad.summary["checks"])];
        CHECK(c["origin"] == (dir / "face_inventory.txt").string());
        CHECK(c["ok"] == false);
        CHECK(bad.status == 1);
    }
    std::filesystem::remove_all(dir);
    auto again = cmd_verify_tables();
    CHECK(again.summary["checks"][index_of(again.summary["checks"])]["ok"] == true);
}

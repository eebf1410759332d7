#include "acclab/acclab.h"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

namespace {

struct Options {
    std::string config;
    std::string out;
    int jobs = 1;
    double tolerance = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int report_error(acclab_status s) {
    std::cerr << "error (" << int(s) << "): " << acclab_last_error() << "\n";
    return 2;
}

// Runs one library call and prints its report. Artifacts are written to --out,
// or to the config's output directory for config-driven commands.
int run(const Options& opt, bool config_driven, const std::function<acclab_status(acclab_context*, acclab_result**)>& call) {
    acclab_context* ctx = nullptr;
    if (acclab_status s = acclab_context_create(&ctx); s != ACCLAB_OK) return report_error(s);
    auto fail = [&](acclab_status s) {
        const int code = report_error(s);
        acclab_context_destroy(ctx);
        return code;
    };
    if (!opt.config.empty())
        if (acclab_status s = acclab_context_load_config(ctx, opt.config.c_str()); s != ACCLAB_OK) return fail(s);
    if (acclab_status s = acclab_context_set_jobs(ctx, opt.jobs); s != ACCLAB_OK) return fail(s);
    if (opt.tolerance != 0)
        if (acclab_status s = acclab_context_set_tolerance(ctx, opt.tolerance); s != ACCLAB_OK) return fail(s);

    acclab_result* res = nullptr;
    if (acclab_status s = call(ctx, &res); s != ACCLAB_OK) return fail(s);
    std::cout << acclab_result_text(res);

    std::string dir = opt.out;
    if (dir.empty() && config_driven) dir = acclab_context_out_dir(ctx);
    int code = acclab_result_exit_code(res);
    if (!dir.empty()) {
        if (acclab_status s = acclab_result_write(res, dir.c_str()); s != ACCLAB_OK) code = report_error(s);
        else
            for (size_t i = 0; i < acclab_result_artifact_count(res); ++i)
                std::cout << "wrote " << dir << "/" << acclab_result_artifact_name(res, i) << "\n";
    }
    acclab_result_destroy(res);
    acclab_context_destroy(ctx);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acclab: heat-space bookkeeping, spectral convergence and heat-kernel probes"};
    app.set_version_flag("--version", std::string(acclab_version()));
    Options opt;
    bool verify_flag = false;
    app.add_flag("--verify-tables", verify_flag, "Check every golden table and exit");
    app.add_option("--config", opt.config, "INI experiment config")->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "Directory for CSV/JSON artifacts");
    app.add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tolerance", opt.tolerance, "Solver tolerance, overriding solver.tolerance")
        ->check(CLI::PositiveNumber);

    // Flags are accepted before or after the subcommand name.
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "INI experiment config")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Directory for CSV/JSON artifacts");
        sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--tolerance", opt.tolerance, "Solver tolerance")->check(CLI::PositiveNumber);
    };

    std::string kind;
    auto* faces = app.add_subcommand("faces", "Face and corner inventory of a heat space, checked against its table");
    faces->add_option("space_kind", kind, "b_heat, conic_heat, sc_heat, acc_double, acc_heat, ...")->required();
    common(faces);

    std::string map, monomial;
    auto* lift = app.add_subcommand("lift", "Lift a monomial under beta_L, beta_R or beta_C");
    lift->add_option("map", map, "beta_L, beta_R or beta_C")->required();
    lift->add_option("monomial", monomial, "Product of rho_* factors, or 1")->required();
    common(lift);

    std::string calculus, a_path, b_path;
    auto* compose = app.add_subcommand("compose", "Compose two calculus elements given as JSON orders");
    compose->add_option("--calculus", calculus, "b, conic, sc or acc")->required();
    compose->add_option("A", a_path, "Left operand JSON")->required()->check(CLI::ExistingFile);
    compose->add_option("B", b_path, "Right operand JSON")->required()->check(CLI::ExistingFile);
    common(compose);

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues along the eps schedule");
    common(spectrum);
    auto* flow = app.add_subcommand("flow", "Accumulation clusters against the conic reference spectrum");
    common(flow);

    std::string regime;
    auto* heat = app.add_subcommand("heat", "Heat-kernel probe decay tables");
    heat->add_option("--regime", regime, "interior_F0101, scaled_F1010 or scaling_identity");
    common(heat);

    auto* verify = app.add_subcommand("verify-tables", "Check every golden table");
    common(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify_flag || *verify)
            return run(opt, false, [](acclab_context* c, acclab_result** r) { return acclab_verify_tables(c, r); });
        if (*faces)
            return run(opt, false, [&](acclab_context* c, acclab_result** r) { return acclab_faces(c, kind.c_str(), r); });
        if (*lift)
            return run(opt, false, [&](acclab_context* c, acclab_result** r) {
                return acclab_lift(c, map.c_str(), monomial.c_str(), r);
            });
        if (*compose) {
            const std::string a = read_file(a_path), b = read_file(b_path);
            return run(opt, false, [&](acclab_context* c, acclab_result** r) {
                return acclab_compose(c, calculus.c_str(), a.c_str(), b.c_str(), r);
            });
        }
        if (*spectrum) return run(opt, true, [](acclab_context* c, acclab_result** r) { return acclab_spectrum(c, r); });
        if (*flow) return run(opt, true, [](acclab_context* c, acclab_result** r) { return acclab_flow(c, r); });
        if (*heat)
            return run(opt, true, [&](acclab_context* c, acclab_result** r) {
                return acclab_heat(c, regime.empty() ? nullptr : regime.c_str(), r);
            });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cout << app.help();
    return 0;
}

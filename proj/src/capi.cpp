#include "acclab/acclab.h"

#include "calculus_orders.hpp"
#include "commands.hpp"
#include "corner_blowup.hpp"
#include "phg_index.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

struct acclab_context {
    std::optional<acclab::ExperimentConfig> config;
    std::optional<double> tolerance;
    int jobs = 1;
};

struct acclab_result {
    acclab::CommandResult r;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

acclab_status fail(acclab_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

// Maps library exceptions onto status codes; the most specific type wins.
template <class F>
acclab_status guarded(F&& body) {
    g_last_error.clear();
    try {
        return body();
    } catch (const acclab::ConfigError& e) {
        return fail(ACCLAB_ERR_CONFIG, e.what());
    } catch (const acclab::GeometryError& e) {
        return fail(ACCLAB_ERR_GEOMETRY, e.what());
    } catch (const acclab::BlowupError& e) {
        return fail(ACCLAB_ERR_GEOMETRY, e.what());
    } catch (const acclab::CalculusError& e) {
        return fail(ACCLAB_ERR_CALCULUS, e.what());
    } catch (const acclab::IndexError& e) {
        return fail(ACCLAB_ERR_CALCULUS, e.what());
    } catch (const acclab::SpectralError& e) {
        return fail(ACCLAB_ERR_SOLVER, std::string("spectral: ") + e.what());
    } catch (const acclab::HeatError& e) {
        return fail(ACCLAB_ERR_SOLVER, std::string("heat: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(ACCLAB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(ACCLAB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(ACCLAB_ERR_INTERNAL, "unknown error");
    }
}

acclab_status emit(acclab::CommandResult r, acclab_result** out) {
    auto res = std::make_unique<acclab_result>();
    res->json = r.summary.dump(2) + "\n";
    res->r = std::move(r);
    *out = res.release();
    return ACCLAB_OK;
}

acclab::ExperimentConfig effective_config(const acclab_context* ctx) {
    acclab::ExperimentConfig cfg = ctx->config ? *ctx->config : acclab::ExperimentConfig{};
    if (ctx->tolerance) cfg.tolerance = *ctx->tolerance;
    return cfg;
}

bool bad(const void* p) { return p == nullptr; }

} // namespace

extern "C" {

const char* acclab_version(void) { return "1.0.0"; }

const char* acclab_last_error(void) { return g_last_error.c_str(); }

acclab_status acclab_context_create(acclab_context** out) {
    if (bad(out)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "out is NULL");
    return guarded([&] {
        *out = new acclab_context();
        return ACCLAB_OK;
    });
}

void acclab_context_destroy(acclab_context* ctx) { delete ctx; }

acclab_status acclab_context_load_config(acclab_context* ctx, const char* path) {
    if (bad(ctx) || bad(path)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "context or path is NULL");
    return guarded([&] {
        ctx->config = acclab::load_config(path);
        return ACCLAB_OK;
    });
}

acclab_status acclab_context_set_jobs(acclab_context* ctx, int jobs) {
    if (bad(ctx)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "context is NULL");
    if (jobs < 1) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "jobs must be >= 1");
    ctx->jobs = jobs;
    return ACCLAB_OK;
}

acclab_status acclab_context_set_tolerance(acclab_context* ctx, double tolerance) {
    if (bad(ctx)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "context is NULL");
    if (!(tolerance > 0)) return fail(ACCLAB_ERR_CONFIG, "tolerance must be > 0");
    ctx->tolerance = tolerance;
    return ACCLAB_OK;
}

const char* acclab_context_out_dir(const acclab_context* ctx) {
    if (!ctx || !ctx->config) return ".";
    return ctx->config->out_dir.c_str();
}

acclab_status acclab_faces(acclab_context* ctx, const char* space_kind, acclab_result** out) {
    if (bad(ctx) || bad(space_kind) || bad(out)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] { return emit(acclab::cmd_faces(space_kind), out); });
}

acclab_status acclab_lift(acclab_context* ctx, const char* map, const char* monomial, acclab_result** out) {
    if (bad(ctx) || bad(map) || bad(monomial) || bad(out)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] { return emit(acclab::cmd_lift(map, monomial), out); });
}

acclab_status acclab_compose(acclab_context* ctx, const char* calculus, const char* a_json, const char* b_json,
                             acclab_result** out) {
    if (bad(ctx) || bad(calculus) || bad(a_json) || bad(b_json) || bad(out))
        return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] { return emit(acclab::cmd_compose(calculus, a_json, b_json), out); });
}

acclab_status acclab_spectrum(acclab_context* ctx, acclab_result** out) {
    if (bad(ctx) || bad(out)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] { return emit(acclab::cmd_spectrum(effective_config(ctx), ctx->jobs), out); });
}

acclab_status acclab_flow(acclab_context* ctx, acclab_result** out) {
    if (bad(ctx) || bad(out)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] { return emit(acclab::cmd_flow(effective_config(ctx), ctx->jobs), out); });
}

acclab_status acclab_heat(acclab_context* ctx, const char* regime, acclab_result** out) {
    if (bad(ctx) || bad(out)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] {
        return emit(acclab::cmd_heat(effective_config(ctx), ctx->jobs, regime ? regime : ""), out);
    });
}

acclab_status acclab_verify_tables(acclab_context* ctx, acclab_result** out) {
    if (bad(ctx) || bad(out)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] { return emit(acclab::cmd_verify_tables(), out); });
}

int acclab_result_exit_code(const acclab_result* r) { return r ? r->r.status : 2; }

const char* acclab_result_text(const acclab_result* r) { return r ? r->r.text.c_str() : ""; }

const char* acclab_result_json(const acclab_result* r) { return r ? r->json.c_str() : ""; }

size_t acclab_result_artifact_count(const acclab_result* r) { return r ? r->r.artifacts.size() : 0; }

const char* acclab_result_artifact_name(const acclab_result* r, size_t i) {
    if (!r || i >= r->r.artifacts.size()) return nullptr;
    return r->r.artifacts[i].name.c_str();
}

const char* acclab_result_artifact_data(const acclab_result* r, size_t i, size_t* size) {
    if (!r || i >= r->r.artifacts.size()) return nullptr;
    if (size) *size = r->r.artifacts[i].content.size();
    return r->r.artifacts[i].content.data();
}

acclab_status acclab_result_write(const acclab_result* r, const char* dir) {
    if (bad(r) || bad(dir)) return fail(ACCLAB_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) return fail(ACCLAB_ERR_IO, "cannot create " + std::string(dir) + ": " + ec.message());
        for (const auto& a : r->r.artifacts) {
            const fs::path p = fs::path(dir) / a.name;
            std::ofstream f(p, std::ios::binary | std::ios::trunc);
            f.write(a.content.data(), std::streamsize(a.content.size()));
            if (!f) return fail(ACCLAB_ERR_IO, "cannot write " + p.string());
        }
        return ACCLAB_OK;
    });
}

void acclab_result_destroy(acclab_result* r) { delete r; }

} // extern "C"

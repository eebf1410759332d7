#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "acclab/acclab.h"

#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Ctx {
    acclab_context* p = nullptr;
    Ctx() { REQUIRE(acclab_context_create(&p) == ACCLAB_OK); }
    ~Ctx() { acclab_context_destroy(p); }
};

struct Res {
    acclab_result* p = nullptr;
    ~Res() { acclab_result_destroy(p); }
};

} // namespace

TEST_CASE("faces and lift through the C API") {
    Ctx ctx;
    Res r;
    REQUIRE(acclab_faces(ctx.p, "conic_heat", &r.p) == ACCLAB_OK);
    CHECK(acclab_result_exit_code(r.p) == 0);
    CHECK(std::string(acclab_result_text(r.p)).find("F_112") != std::string::npos);
    CHECK(std::string(acclab_result_json(r.p)).find("\"golden_match\": true") != std::string::npos);
    REQUIRE(acclab_result_artifact_count(r.p) == 1);
    CHECK(std::string(acclab_result_artifact_name(r.p, 0)) == "faces_conic_heat.json");
    size_t size = 0;
    CHECK(acclab_result_artifact_data(r.p, 0, &size) != nullptr);
    CHECK(size > 0);
    CHECK(acclab_result_artifact_name(r.p, 5) == nullptr);

    Res l;
    REQUIRE(acclab_lift(ctx.p, "beta_R", "rho_d2", &l.p) == ACCLAB_OK);
    CHECK(std::string(acclab_result_text(l.p)).rfind("rho_d3·rho_d02\n", 0) == 0);
}

TEST_CASE("errors map to status codes with a message") {
    Ctx ctx;
    Res r;
    CHECK(acclab_faces(ctx.p, "klein_bottle", &r.p) == ACCLAB_ERR_GEOMETRY);
    CHECK(std::string(acclab_last_error()).find("klein_bottle") != std::string::npos);
    CHECK(r.p == nullptr);
    CHECK(acclab_faces(nullptr, "b_heat", &r.p) == ACCLAB_ERR_INVALID_ARGUMENT);
    CHECK(acclab_context_set_jobs(ctx.p, 0) == ACCLAB_ERR_INVALID_ARGUMENT);
    CHECK(acclab_context_set_tolerance(ctx.p, -1) == ACCLAB_ERR_CONFIG);
    CHECK(acclab_context_load_config(ctx.p, "/nonexistent/acclab.ini") == ACCLAB_ERR_CONFIG);

    const char* k0 = R"({"calculus":"conic","faces":{"F_001":"inf","F_010":[[1,1,0]],"F_100":[[1,1,0]],)"
                     R"("F_112":[[2,1,0]],"F_d2":[[-3,2,0,-1,2]]},"k":0,"n":3})";
    const char* a = R"({"calculus":"conic","faces":{"F_001":"inf","F_010":[[1,1,0]],"F_100":[[1,1,0]],)"
                    R"("F_112":[[2,1,0]],"F_d2":[[1,2,0,-1,2]]},"k":-2,"n":3})";
    CHECK(acclab_compose(ctx.p, "conic", k0, a, &r.p) == ACCLAB_ERR_CALCULUS);
    CHECK(std::string(acclab_last_error()).find("-k_a > 0 violated") != std::string::npos);
    REQUIRE(acclab_compose(ctx.p, "conic", a, a, &r.p) == ACCLAB_OK);
    CHECK(std::string(acclab_last_error()).empty());
}

TEST_CASE("config-driven commands write artifacts") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "acclab_capi_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path ini = dir / "quick.ini";
    std::ofstream(ini) << "[model]\nmode_count = 2\n[schedule]\neps = 0.2, 0.1, 0.05, 0.025\n"
                          "[solver]\nN = 128\nper_mode = 2\ncluster_count = 2\nextrapolation_points = 3\n"
                          "[outputs]\ndir = "
                       << (dir / "out").string() << "\n";
    Ctx ctx;
    REQUIRE(acclab_context_load_config(ctx.p, ini.string().c_str()) == ACCLAB_OK);
    CHECK(std::string(acclab_context_out_dir(ctx.p)) == (dir / "out").string());
    REQUIRE(acclab_context_set_tolerance(ctx.p, 0.05) == ACCLAB_OK);
    Res r;
    REQUIRE(acclab_flow(ctx.p, &r.p) == ACCLAB_OK);
    CHECK(acclab_result_exit_code(r.p) == 0);
    REQUIRE(acclab_result_write(r.p, acclab_context_out_dir(ctx.p)) == ACCLAB_OK);
    CHECK(fs::exists(dir / "out" / "flow.csv"));
    CHECK(fs::exists(dir / "out" / "flow.json"));

    std::ofstream(ini) << "[schedule]\neps =\n";
    CHECK(acclab_context_load_config(ctx.p, ini.string().c_str()) == ACCLAB_ERR_CONFIG);
    CHECK(std::string(acclab_last_error()).find("empty") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("verify-tables through the C API") {
    Ctx ctx;
    Res r;
    REQUIRE(acclab_verify_tables(ctx.p, &r.p) == ACCLAB_OK);
    const std::string text = acclab_result_text(r.p);
    const bool any_fail = text.find("FAIL ") != std::string::npos;
    CHECK(acclab_result_exit_code(r.p) == (any_fail ? 1 : 0));
    CHECK(text.find("sc triple lifts") != std::string::npos);
    CHECK(std::strlen(acclab_version()) > 0);
}

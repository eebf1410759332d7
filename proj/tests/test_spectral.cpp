#include "doctest.h"
#include "spectral.hpp"
#include "test_rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <numbers>

using namespace acclab;

namespace {

constexpr double kPi = std::numbers::pi;

SLGrid uniform(int N) {
    SLGrid g;
    g.N = N;
    g.spacing = SLGrid::Spacing::uniform;
    return g;
}

SLGrid grid_for(const RadialOperator& op, int N) {
    SLGrid g = uniform(N);
    g.a = op.a;
    g.b = op.b;
    return g;
}

// Independent oracle: dense second-order finite differences on the untransformed
// operator -(p u')' + q u = lambda w u with u(b) = 0 and p(0) = 0 at a capped tip,
// nodes at cell centres x_i = (i + 1/2) h.
std::vector<double> dense_fd_lowest(const RadialOperator& op, int M, int count) {
    const double h = (op.b - op.a) / M;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
    Eigen::VectorXd w(M);
    for (int i = 0; i < M; ++i) {
        const double x = op.a + (i + 0.5) * h;
        const double pl = i == 0 ? op.p(op.a) : op.p(x - 0.5 * h);
        const double pr = op.p(x + 0.5 * h);
        w[i] = op.w(x);
        A(i, i) = (pl + (i == M - 1 ? 2 * pr : pr)) / (h * h) + op.q(x);
        if (i > 0) A(i, i - 1) = -pl / (h * h);
        if (i + 1 < M) A(i, i + 1) = -pr / (h * h);
        if (i == 0) A(i, i) -= pl / (h * h);  // zero-flux tip: no left neighbour
    }
    Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd S = s.asDiagonal() * A * s.asDiagonal();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(es.eigenvalues()[k]);
    return out;
}

} // namespace

TEST_CASE("Bessel zeros") {
    CHECK(bessel_zero(0.5, 1) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(bessel_zero(1.5, 1) == doctest::Approx(4.493409457909064).epsilon(1e-13));
    CHECK(bessel_zero(0.0, 1) == doctest::Approx(2.404825557695773).epsilon(1e-13));
    CHECK_THROWS_AS(bessel_zero(-1.0, 1), SpectralError);
    CHECK_THROWS_AS(bessel_zero(1.0, 0), SpectralError);
}

TEST_CASE("flat ball radial modes give k^2 pi^2 and Bessel zeros") {
    // c = 1: the capped family is the flat unit ball for every eps.
    auto fam = WarpFamily::make(3, 1.0, Profile::capped, 2);
    for (double eps : {0.0, 0.1}) {
        auto op0 = radial_operator(fam, 0.0, eps);
        auto r0 = solve_mode_richardson(op0, grid_for(op0, 1024), 4);
        for (int k = 0; k < 4; ++k) {
            const double exact = (k + 1) * (k + 1) * kPi * kPi;
            CHECK(std::abs(r0.lambda[k] - exact) < std::max(3 * r0.err[k], 1e-9 * exact));
            CHECK(std::abs(r0.lambda[k] - exact) < 1e-4 * exact);
        }
        auto op1 = radial_operator(fam, 2.0, eps);
        auto r1 = solve_mode_richardson(op1, grid_for(op1, 1024), 2);
        const double j = bessel_zero(1.5, 1);
        CHECK(r1.lambda[0] == doctest::Approx(j * j).epsilon(1e-4));
    }
}

TEST_CASE("eigenvectors are mass-orthonormal") {
    for (auto prof : {Profile::capped, Profile::neck}) {
        auto fam = WarpFamily::make(3, 0.6, prof, 2);
        auto op = radial_operator(fam, 2.0, 0.1);
        auto s = solve_mode(op, grid_for(op, 400), 12);
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                double g = 0;
                for (std::size_t m = 0; m < s.x.size(); ++m) g += s.mass[m] * s.v[i][m] * s.v[j][m];
                CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).scale(1).epsilon(1e-10));
            }
        for (int k = 1; k < 12; ++k) CHECK(s.lambda[k] > s.lambda[k - 1]);
    }
    auto fam = WarpFamily::make(3, 0.6, Profile::capped, 2);
    auto op = radial_operator(fam, 0.0, 0.1);
    CHECK_THROWS_AS(solve_mode(op, grid_for(op, 40), 11), SpectralError);
    CHECK_THROWS_AS(solve_mode(op, grid_for(op, 40), 0), SpectralError);
}

TEST_CASE("capped eps > 0 agrees with a dense finite-difference oracle") {
    auto fam = WarpFamily::make(3, 0.5, Profile::capped, 2);
    for (double mu : {0.0, 2.0, 6.0}) {
        auto op = radial_operator(fam, mu, 0.05);
        auto ours = solve_mode_richardson(op, grid_for(op, 1024), 3);
        auto fd = dense_fd_lowest(op, 1200, 3);
        for (int k = 0; k < 3; ++k) CHECK(ours.lambda[k] == doctest::Approx(fd[k]).epsilon(2e-3));
    }
    // Flat-core capped model with c = 1 stays within 5% of pi^2 at eps = 0.05.
    auto flat = WarpFamily::make(3, 1.0, Profile::capped, 0);
    auto op = radial_operator(flat, 0.0, 0.05);
    CHECK(solve_mode(op, grid_for(op, 1024), 1).lambda[0] == doctest::Approx(kPi * kPi).epsilon(0.05));
}

TEST_CASE("Richardson estimates converge at second order") {
    auto fam = WarpFamily::make(3, 0.5, Profile::neck, 2);
    auto op = radial_operator(fam, 2.0, 0.1);
    std::vector<double> lam;
    for (int N : {256, 512, 1024}) lam.push_back(solve_mode(op, grid_for(op, N), 3).lambda[2]);
    const double ratio = (lam[1] - lam[0]) / (lam[2] - lam[1]);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
    CHECK_THROWS_AS(solve_mode_richardson(op, grid_for(op, 16), 4, 1e-8), SpectralError);
}

TEST_CASE("zonal two-dimensional oracle decouples into modes") {
    // Dense finite volumes in (x, theta) on the n = 3 neck, axisymmetric functions,
    // Dirichlet at x = +-1. Its spectrum is the union of the per-mode spectra.
    auto fam = WarpFamily::make(3, 1.0, Profile::neck, 3);
    const double eps = 0.3;
    const int Nx = 48, Nt = 24;
    const double hx = 2.0 / Nx, ht = kPi / Nt;
    const int n = (Nx - 1) * Nt;
    auto id = [&](int i, int j) { return (i - 1) * Nt + j; };
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd M(n);
    auto f = [&](double x) { return warp(fam, x, eps).f; };
    for (int i = 1; i < Nx; ++i)
        for (int j = 0; j < Nt; ++j) {
            const double x = -1 + i * hx, th = (j + 0.5) * ht, st = std::sin(th);
            M[id(i, j)] = f(x) * f(x) * st * hx * ht;
            for (int side : {-1, 1}) {
                const double xe = x + 0.5 * side * hx, c = f(xe) * f(xe) * st * ht / hx;
                K(id(i, j), id(i, j)) += c;
                const int ii = i + side;
                if (ii >= 1 && ii < Nx) K(id(i, j), id(ii, j)) -= c;
            }
            if (j + 1 < Nt) {
                const double c = std::sin(th + 0.5 * ht) * hx / ht;
                K(id(i, j), id(i, j)) += c;
                K(id(i, j + 1), id(i, j + 1)) += c;
                K(id(i, j), id(i, j + 1)) -= c;
                K(id(i, j + 1), id(i, j)) -= c;
            }
        }
    Eigen::VectorXd s = M.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd S = s.asDiagonal() * K * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);

    std::vector<double> modes;
    for (int l = 0; l <= 3; ++l) {
        auto op = radial_operator(fam, l * (l + 1.0), eps);
        auto sol = solve_mode(op, grid_for(op, 1024), 4);
        modes.insert(modes.end(), sol.lambda.begin(), sol.lambda.end());
    }
    std::sort(modes.begin(), modes.end());
    for (int k = 0; k < 6; ++k) CHECK(es.eigenvalues()[k] == doctest::Approx(modes[k]).epsilon(2e-2));
}

TEST_CASE("minimax bound is never below the discrete eigenvalue") {
    testing::Rng rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const auto prof = trial % 2 ? Profile::neck : Profile::capped;
        auto fam = WarpFamily::make(3, rng.uniform(0.4, 1.5), prof, 2);
        const double eps = trial % 3 == 0 ? 0.0 : rng.uniform(0.05, 0.3);
        const double mu = double(rng.range(0, 2) * (rng.range(0, 2) + 1));
        auto op = radial_operator(fam, mu, eps);
        auto g = grid_for(op, 200);
        const int dim = int(rng.range(1, 5));
        std::vector<TrialFunction> trials;
        const double a = op.a, b = op.b;
        for (int j = 0; j < dim; ++j) {
            const double shift = rng.uniform(-0.5, 0.5);
            trials.push_back({[=](double x) {
                const double t = (x - a) / (b - a);
                const double base = a < 0 ? t * (1 - t) : (1 - t) * std::pow(std::max(x, 0.0), op.gamma);
                return base * (std::pow(t, j) + shift);
            }});
        }
        auto bounds = rayleigh_minimax_bound(op, g, trials);
        auto exact = solve_mode(op, g, dim);
        for (int k = 0; k < dim; ++k) CHECK(bounds[k] >= exact.lambda[k] * (1 - 1e-10));
    }
    auto fam = WarpFamily::make(3, 1.0, Profile::capped, 1);
    auto op = radial_operator(fam, 0.0, 0.1);
    CHECK_THROWS_AS(rayleigh_minimax_bound(op, grid_for(op, 100), {{[](double) { return 1.0; }}}), SpectralError);
    auto one = [](double x) { return 1 - x; };
    CHECK_THROWS_AS(rayleigh_minimax_bound(op, grid_for(op, 100), {{one}, {one}}), SpectralError);
}

TEST_CASE("assembled spectra carry spherical-harmonic multiplicities") {
    SpectrumOptions opt;
    opt.N = 512;
    opt.per_mode = 3;
    auto cap = WarpFamily::make(3, 1.0, Profile::capped, 3);
    auto r = assemble_spectrum(cap, 0.1, opt);
    for (const auto& e : r.entries) CHECK(e.mult == 2 * e.ell + 1);
    for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i].lambda >= r.entries[i - 1].lambda);
    auto neck = WarpFamily::make(3, 1.0, Profile::neck, 3);
    for (const auto& e : assemble_spectrum(neck, 0.0, opt).entries) CHECK(e.mult == 2 * (2 * e.ell + 1));
    for (const auto& e : assemble_spectrum(neck, 0.1, opt).entries) CHECK(e.mult == 2 * e.ell + 1);
    auto ref = conic_reference_spectrum(neck, 2);
    CHECK(ref.entries.front().lambda == doctest::Approx(kPi * kPi));
    CHECK(ref.entries.front().mult == 2);
}

TEST_CASE("spectral flow accumulates on the Bessel reference list") {
    FlowOptions opt;
    opt.spectrum.N = 1024;
    opt.cluster_count = 6;
    auto fam = WarpFamily::make(3, 1.0, Profile::capped, 4);
    auto flow = spectral_flow(fam, default_schedule(), opt);
    CHECK(flow.computed_in_reference);
    CHECK(flow.reference_in_computed);
    CHECK(flow.multiplicities_match);
    CHECK(flow.verdict == "both inclusions hold, multiplicities match");
    CHECK_THROWS_AS(spectral_flow(fam, {0.1, 0.2, 0.05, 0.01}, opt), SpectralError);
    CHECK_THROWS_AS(spectral_flow(fam, {0.1, 0.05}, opt), SpectralError);
}

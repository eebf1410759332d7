#include "doctest.h"
#include "model_geometry.hpp"
#include "test_rng.hpp"

#include <array>
#include <cmath>
#include <numbers>

using namespace acclab;

namespace {

// Composite 3-point Gauss on [a, b].
template <class F>
double integrate(F f, double a, double b, int panels = 400) {
    const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}, gw[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    const double h = (b - a) / panels;
    double s = 0;
    for (int p = 0; p < panels; ++p)
        for (int g = 0; g < 3; ++g) s += 0.5 * h * gw[g] * f(a + h * (p + 0.5 + 0.5 * gx[g]));
    return s;
}

} // namespace

TEST_CASE("indicial roots of the cone") {
    auto r3 = indicial_roots(3, 0.0, 1.0);
    CHECK(r3.gamma_plus == doctest::Approx(0.0));
    CHECK(r3.gamma_minus == doctest::Approx(-1.0));
    auto r4 = indicial_roots(4, 0.0, 1.0);
    CHECK(r4.gamma_plus == doctest::Approx(0.0));
    CHECK(r4.gamma_minus == doctest::Approx(-2.0));
    // mu = l(l+1) on the unit 2-sphere, c = 1: gamma_+ = l.
    CHECK(indicial_roots(3, 6.0, 1.0).gamma_plus == doctest::Approx(2.0));
    CHECK(indicial_roots(3, 2.0, 1.0).nu == doctest::Approx(1.5));
    CHECK_THROWS_AS(indicial_roots(2, 0.0, 1.0), GeometryError);
    CHECK_THROWS_AS(indicial_roots(3, -1.0, 1.0), GeometryError);

    testing::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = int(rng.range(3, 7));
        const double mu = rng.uniform(0, 50), c = rng.uniform(0.2, 3);
        const auto r = indicial_roots(n, mu, c);
        for (double g : {r.gamma_plus, r.gamma_minus})
            CHECK(g * g + (n - 2) * g - mu / (c * c) == doctest::Approx(0.0).epsilon(1e-10).scale(1 + mu / (c * c)));
        CHECK(friedrichs_gate(n, r.gamma_plus));
        if (mu > 0) CHECK_FALSE(friedrichs_gate(n, r.gamma_minus));
    }
}

TEST_CASE("sphere harmonic dimensions and volumes") {
    for (int l = 0; l < 8; ++l) CHECK(sphere_harmonic_dim(2, l) == 2 * l + 1);
    CHECK(sphere_harmonic_dim(1, 0) == 1);
    CHECK(sphere_harmonic_dim(1, 3) == 2);
    CHECK(sphere_harmonic_dim(3, 2) == 9);
    CHECK(sphere_volume(2) == doctest::Approx(4 * std::numbers::pi));
    CHECK(sphere_volume(1) == doctest::Approx(2 * std::numbers::pi));
    CHECK(sphere_volume(3) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
    auto cs = CrossSection::round_sphere(2, 3);
    REQUIRE(cs.modes.size() == 4);
    CHECK(cs.modes[3].mu == 12.0);
    CHECK(cs.modes[3].multiplicity == 7);
    CHECK_THROWS_AS(CrossSection::explicit_list({{2.0, 1, 0}, {1.0, 1, 0}}), GeometryError);
}

TEST_CASE("cap profile is C2 and matches the cone and the flat core") {
    testing::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const double c = rng.uniform(0.3, 2.0), rb = rng.uniform(1.2, 4.0);
        CapProfile F(c, 0.5, rb);
        const double d = 1e-9;
        for (double r : {0.5, rb}) {
            CHECK(F.value(r - d) == doctest::Approx(F.value(r + d)).epsilon(1e-7));
            CHECK(F.d1(r - d) == doctest::Approx(F.d1(r + d)).epsilon(1e-7));
            CHECK(F.d2(r - d) == doctest::Approx(F.d2(r + d)).scale(1).epsilon(1e-6));
        }
        CHECK(F.value(0.25) == 0.25);
        CHECK(F.value(rb + 1) == doctest::Approx(c * (rb + 1)));
        // Derivatives against central differences inside the blend.
        const double r = 0.5 + (rb - 0.5) * rng.uniform(0.1, 0.9), h = 1e-4;
        CHECK(F.d1(r) == doctest::Approx((F.value(r + h) - F.value(r - h)) / (2 * h)).epsilon(1e-6));
        CHECK(F.d2(r) == doctest::Approx((F.d1(r + h) - F.d1(r - h)) / (2 * h)).epsilon(1e-6).scale(1));
    }
    CHECK_THROWS_AS(CapProfile(-1.0), GeometryError);
    CHECK_THROWS_AS(CapProfile(1.0, 2.0, 1.0), GeometryError);
}

TEST_CASE("warp profiles and metrics") {
    auto neck = WarpFamily::make(3, 0.7, Profile::neck, 2);
    for (double x : {-1.0, -0.3, 0.0, 0.4, 1.0}) {
        const double eps = 0.1;
        CHECK(warp(neck, x, eps).f == doctest::Approx(std::sqrt(eps * eps + 0.49 * x * x)));
        CHECK(metric_eval(neck, x, eps).angular == doctest::Approx(eps * eps + 0.49 * x * x));
        CHECK(warp(neck, x, 0.0).f == doctest::Approx(0.7 * std::abs(x)));
    }
    CHECK_THROWS_AS(metric_eval(neck, 1.5, 0.1), GeometryError);
    CHECK(metric_eval_z(neck, 2.0).angular == doctest::Approx(1 + 0.49 * 4));

    auto cap = WarpFamily::make(3, 0.5, Profile::capped, 2);
    CHECK_THROWS_AS(metric_eval(cap, -0.1, 0.1), GeometryError);
    testing::Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        // Scaling identity of the capped family: f_eps(x) = eps F(x / eps).
        const double eps = rng.uniform(0.01, 0.5), x = rng.uniform(0, 1);
        CHECK(warp(cap, x, eps).f == doctest::Approx(eps * cap.cap().value(x / eps)));
        CHECK(metric_eval(cap, x, eps).angular ==
              doctest::Approx(eps * eps * metric_eval_z(cap, x / eps).angular));
        // Scale L: f(x; L) = L f(x / L).
        WarpFamily big = cap;
        big.scale = rng.uniform(1, 10);
        const double X = big.scale * x;
        CHECK(warp(big, X, eps).f == doctest::Approx(big.scale * warp(cap, x, eps).f));
        CHECK(warp(big, X, eps).df == doctest::Approx(warp(cap, x, eps).df));
    }
    CHECK_THROWS_AS(WarpFamily::make(2, 1.0, Profile::capped, 2), GeometryError);
    CHECK_THROWS_AS(WarpFamily::make(3, 0.0, Profile::capped, 2), GeometryError);
    CHECK_THROWS_AS(warp(cap, 0.5, -0.1), GeometryError);
}

TEST_CASE("weight function is continuous and piecewise") {
    WeightFunction w{0.1, 1.0};
    CHECK(weight_eval(w, 0.05, 0.1) == 0.1);
    CHECK(weight_eval(w, 0.5, 0.1) == 0.5);
    CHECK(weight_eval(w, -0.5, 0.1) == 0.5);
    CHECK(weight_eval(w, 2.0, 0.1) == 1.0);
    for (double at : {0.1, 1.0}) {
        CHECK(weight_eval(w, at - 1e-12, 0.1) == doctest::Approx(weight_eval(w, at + 1e-12, 0.1)));
    }
}

TEST_CASE("radial operator is symmetric in the weighted inner product") {
    // Functions vanishing at both ends, derivatives in closed form.
    auto u = [](double x) { return std::array<double, 3>{1 - x * x, -2 * x, -2.0}; };
    auto v = [](double x) {
        const double s = std::sin(std::numbers::pi * (x + 1) / 2), k = std::numbers::pi / 2;
        return std::array<double, 3>{s * (1 + x), k * std::cos(k * (x + 1)) * (1 + x) + s, -k * k * s * (1 + x) +
                                                                                          2 * k * std::cos(k * (x + 1))};
    };
    for (double eps : {0.05, 0.3}) {
        auto fam = WarpFamily::make(3, 0.8, Profile::neck, 2);
        fam.potential = 0.5;
        auto op = radial_operator(fam, 6.0, eps);
        CHECK(op.inner_bc == InnerBC::none);
        CHECK(op.a == -1.0);
        auto lhs = integrate([&](double x) {
            auto a = u(x);
            return op.apply(x, a[0], a[1], a[2]) * v(x)[0] * op.w(x);
        }, -1, 1);
        auto rhs = integrate([&](double x) {
            auto b = v(x);
            return u(x)[0] * op.apply(x, b[0], b[1], b[2]) * op.w(x);
        }, -1, 1);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("exact cone eigenfunctions solve the eps = 0 operator") {
    // u = x^{-(n-2)/2} J_nu(j x) is an eigenfunction with eigenvalue j^2.
    for (int n : {3, 4}) {
        auto fam = WarpFamily::make(n, 0.6, Profile::capped, 3);
        for (const auto& m : fam.cross_section.modes) {
            auto op = radial_operator(fam, m.mu, 0.0);
            CHECK(op.inner_bc == InnerBC::friedrichs_cone);
            const double nu = indicial_roots(n, m.mu, fam.c).nu, j = 3.7;
            auto u = [&](double x) { return std::pow(x, -0.5 * (n - 2)) * std::cyl_bessel_j(nu, j * x); };
            double prev = 0;
            for (double h : {1e-2, 5e-3}) {
                double worst = 0;
                for (double x : {0.2, 0.5, 0.9}) {
                    const double du = (u(x + h) - u(x - h)) / (2 * h), ddu = (u(x + h) - 2 * u(x) + u(x - h)) / (h * h);
                    worst = std::max(worst, std::abs(op.apply(x, u(x), du, ddu) - j * j * u(x)));
                }
                if (prev > 0) CHECK(prev / worst == doctest::Approx(4.0).epsilon(0.1));
                prev = worst;
            }
        }
    }
}

TEST_CASE("transformed coefficients reproduce the operator") {
    // x^{-gamma} L(x^gamma v) = [-(P v')' + V v] / W for smooth v.
    testing::Rng rng(23);
    for (auto prof : {Profile::capped, Profile::neck}) {
        auto fam = WarpFamily::make(3, 0.6, prof, 3);
        for (int trial = 0; trial < 40; ++trial) {
            const double eps = trial % 2 ? 0.0 : rng.uniform(0.05, 0.3);
            const double mu = double(rng.range(0, 3));
            const auto op = radial_operator(fam, mu * (mu + 1), eps);
            const double a = rng.uniform(-1, 1), b = rng.uniform(0.5, 2);
            auto v = [&](double x) { return 1 + a * x + std::cos(b * x); };
            auto dv = [&](double x) { return a - b * std::sin(b * x); };
            auto ddv = [&](double x) { return -b * b * std::cos(b * x); };
            const double x = rng.uniform(0.2, 0.9), g = op.gamma;
            const double u = std::pow(x, g) * v(x);
            const double du = g * std::pow(x, g - 1) * v(x) + std::pow(x, g) * dv(x);
            const double ddu = g * (g - 1) * std::pow(x, g - 2) * v(x) + 2 * g * std::pow(x, g - 1) * dv(x) +
                               std::pow(x, g) * ddv(x);
            const double lhs = op.apply(x, u, du, ddu) / std::pow(x, g);
            const double h = 1e-5, dP = (op.P(x + h) - op.P(x - h)) / (2 * h);
            const double rhs = (-(dP * dv(x) + op.P(x) * ddv(x)) + op.V(x) * v(x)) / op.W(x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
        }
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "simz/errors.hpp"
#include "simz/two_port.hpp"

using namespace simz;

namespace {
double dist(cxd a, cxd b) { return std::abs(a - b); }
}  // namespace

TEST_CASE("quadrature phase gives the pure cross two-port") {
    TwoPortZ z = two_port_z(kPi / 2, 1.0);
    CHECK(dist(z.z11, cxd(0, 0)) < 1e-15);
    CHECK(dist(z.z22, cxd(0, 0)) < 1e-15);
    CHECK(dist(z.z12, kJ) < 1e-15);
    CHECK(dist(z.z21, kJ) < 1e-15);
}

TEST_CASE("pi/4 phase values") {
    TwoPortZ z = two_port_z(kPi / 4, 1.0);
    double r2 = std::sqrt(2.0);
    CHECK(dist(z.z11, kJ) < 1e-15);
    CHECK(dist(z.z12, kJ * r2) < 1e-14);
    CHECK(dist(z.z21, kJ * r2) < 1e-14);
    CHECK(dist(z.z22, kJ) < 1e-15);
}

TEST_CASE("conversion to scattering parameters recovers the pure phase shift") {
    // independent check route: the two-port must scatter as s21 = e^{j phase}
    for (double z0 : {1.0, 50.0}) {
        for (int i = 1; i < 40; ++i) {
            double phase = i * 2 * kPi / 40;
            if (pi_distance(phase) < 0.05) continue;
            TwoPortS s = z_to_s(two_port_z(phase, z0), z0);
            CHECK(std::abs(s.s11) < 1e-12);
            CHECK(std::abs(s.s22) < 1e-12);
            CHECK(dist(s.s21, std::exp(kJ * phase)) < 1e-12);
            CHECK(dist(s.s12, std::exp(kJ * phase)) < 1e-12);
        }
    }
}

TEST_CASE("tangent closed forms") {
    TwoPortZ t = two_port_z_tangent(kPi / 2, 1.0);
    CHECK(dist(t.z11, -kJ) < 1e-15);
    CHECK(dist(t.z12, cxd(0, 0)) < 1e-15);
    t = two_port_z_tangent(kPi / 4, 1.0);
    CHECK(dist(t.z11, -2.0 * kJ) < 1e-14);
    CHECK(dist(t.z12, -kJ * std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("tangent matches central differences") {
    double h = 1e-6, phase = 1.0, z0 = 1.0;
    TwoPortZ zp = two_port_z(phase + h, z0), zm = two_port_z(phase - h, z0);
    TwoPortZ t = two_port_z_tangent(phase, z0);
    auto fd = [&](cxd p, cxd m) { return (p - m) / (2 * h); };
    CHECK(dist(t.z11, fd(zp.z11, zm.z11)) / std::abs(t.z11) < 1e-6);
    CHECK(dist(t.z12, fd(zp.z12, zm.z12)) / std::abs(t.z12) < 1e-6);
    CHECK(dist(t.z22, fd(zp.z22, zm.z22)) / std::abs(t.z22) < 1e-6);
}

TEST_CASE("guard band rejects phases at multiples of pi") {
    CHECK_THROWS_AS(two_port_z(0.0, 1.0), GuardBandViolation);
    CHECK_THROWS_AS(two_port_z(5e-4, 1.0), GuardBandViolation);
    CHECK_THROWS_AS(two_port_z(kPi, 1.0), GuardBandViolation);
    CHECK_THROWS_AS(two_port_z(kPi - 5e-4, 1.0), GuardBandViolation);
    CHECK_THROWS_AS(two_port_z(2 * kPi, 1.0), GuardBandViolation);
    CHECK_THROWS_AS(two_port_z_tangent(kPi, 1.0), GuardBandViolation);
    CHECK_NOTHROW(two_port_z(2e-3, 1.0));
}

TEST_CASE("structure properties over random phases") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    int tested = 0;
    while (tested < 200) {
        double phase = u(rng);
        if (pi_distance(phase) <= 2e-3) continue;
        ++tested;
        TwoPortZ z = two_port_z(phase, 50.0);
        CHECK(dist(z.z11, z.z22) == 0.0);
        CHECK(dist(z.z12, z.z21) == 0.0);
        CHECK(z.z11.real() == 0.0);
        CHECK(z.z12.real() == 0.0);
        TwoPortS s = z_to_s(z, 50.0);
        CHECK(std::abs(std::abs(s.s21) - 1.0) < 1e-12);  // lossless
    }
}

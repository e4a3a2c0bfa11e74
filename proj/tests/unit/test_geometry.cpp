#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rotmin/errors.hpp"
#include "rotmin/geometry.hpp"

using namespace rotmin;

namespace {

std::vector<ProfileState> sample_states(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ProfileState> out;
    while (static_cast<int>(out.size()) < count) {
        const double r = 0.95 * std::sqrt(u(rng));
        const double phi = std::numbers::pi * u(rng);
        ProfileState s{r * std::cos(phi), r * std::sin(phi), 2.0 * std::numbers::pi * u(rng)};
        if (s.f2 < 0.02) continue;
        if (std::abs(s.f2 * std::cos(s.theta) - s.f1 * std::sin(s.theta)) > 0.95) continue;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("rotation params factories") {
    const auto a = RotationParams::from_nl(5, 1);
    CHECK(a.k() == 3);
    CHECK(a.l() == 1);
    CHECK(a.n() == 5);
    CHECK(RotationParams::from_nk(5, 3) == a);
    CHECK(RotationParams::from_kl(3, 1) == a);
    CHECK(a.equilibrium_radius() == doctest::Approx(std::sqrt(0.2)).epsilon(1e-15));
    CHECK_THROWS_AS(RotationParams::from_kl(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RotationParams::from_nl(3, 2), std::invalid_argument);
}

TEST_CASE("f, g, h at a hand-computed state") {
    // theta = 0: g = f2, h = sqrt(1 - f2^2), f = sqrt(1 - f1^2 - f2^2).
    const ProfileState s{0.3, 0.4, 0.0};
    const Fgh v = fgh(s);
    CHECK(v.f == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    CHECK(v.g == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(v.h == doctest::Approx(std::sqrt(0.84)).epsilon(1e-15));
}

TEST_CASE("domain violations raise DomainError") {
    const auto p = RotationParams::from_nl(5, 1);
    CHECK_THROWS_AS(fgh({0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(fgh({0.8, 0.6, 0.0}), DomainError);
    CHECK_THROWS_AS(theta_prime({0.0, -0.1, 0.0}, p), DomainError);
    CHECK_THROWS_AS(curvature_bundle({NAN, 0.2, 0.0}, p), DomainError);
}

TEST_CASE("Clifford equilibrium is a fixed point of theta'") {
    for (auto [n, l] : {std::pair{5, 1}, {5, 2}, {9, 4}}) {
        const auto p = RotationParams::from_nl(n, l);
        CHECK(std::abs(theta_prime({0.0, p.equilibrium_radius(), 0.0}, p)) < 1e-14);
        CHECK(std::abs(theta_prime({0.37, p.equilibrium_radius(), 0.0}, p)) < 1e-14);
    }
}

TEST_CASE("trace identity and treadmill radius at 1000 random states") {
    for (auto p : {RotationParams::from_nl(5, 1), RotationParams::from_kl(2, 2), RotationParams::from_kl(1, 6)}) {
        double trace = 0.0, radius = 0.0;
        for (const auto& s : sample_states(1000, 7)) {
            const auto b = curvature_bundle(s, p);
            const double sum = p.k() * b.lambda0 + p.l() * b.lambda_mid + b.lambda_last;
            const double scale = std::max({1.0, std::abs(p.k() * b.lambda0), std::abs(p.l() * b.lambda_mid),
                                           std::abs(b.lambda_last)});
            trace = std::max(trace, std::abs(sum - b.nH) / scale);
            radius = std::max(radius, std::abs(b.xi1 * b.xi1 + b.g * b.g - s.f1 * s.f1 - s.f2 * s.f2));
        }
        CHECK(trace < 1e-12);
        CHECK(radius < 1e-12);
    }
}

TEST_CASE("theta' solves nH = 0") {
    const auto p = RotationParams::from_kl(2, 3);
    for (const auto& s : sample_states(500, 11)) {
        const double K = theta_prime(s, p);
        const double scale = std::max(1.0, std::abs(K));
        CHECK(std::abs(mean_curvature_trace(s, p, K)) / scale < 1e-12);
        CHECK(std::abs(curvature_bundle(s, p).nH) / scale < 1e-12);
    }
}

TEST_CASE("l = 1 nH agrees with the planar form (n g + K + kappa)/h - K (f f')^2 / h^3") {
    const auto p = RotationParams::from_nl(5, 1);
    for (const auto& s : sample_states(1000, 3)) {
        const double K = 0.7 * std::sin(7.0 * s.theta) + 2.0;  // arbitrary curvature
        const auto [f, g, h] = fgh(s);
        const double fp = -(s.f1 * std::cos(s.theta) + s.f2 * std::sin(s.theta)) / f;
        const double kappa = -std::cos(s.theta) / s.f2;
        const double planar = (5.0 * g + K + kappa) / h - K * (f * fp) * (f * fp) / (h * h * h);
        CHECK(std::abs(planar - mean_curvature_trace(s, p, K)) < 1e-12 * std::max(1.0, std::abs(planar)));
    }
}

TEST_CASE("|A|^2 matches the closed form for n = 5, l = 1") {
    const auto p = RotationParams::from_nl(5, 1);
    for (const auto& s : sample_states(1000, 5)) {
        const double f1 = s.f1, f2 = s.f2, c = std::cos(s.theta), sn = std::sin(s.theta);
        const double num = -20.0 * f1 * f1 * f2 * f2 * sn * sn +
                           5.0 * f1 * f2 * (4.0 * f2 * f2 - 1.0) * std::sin(2.0 * s.theta) -
                           2.0 * (10.0 * std::pow(f2, 4) - 5.0 * f2 * f2 + 1.0) * c * c;
        const double den = f2 * f2 * (-f1 * sn + f2 * c - 1.0) * (-f1 * sn + f2 * c + 1.0);
        const double oracle = num / den;
        const double got = curvature_bundle(s, p).shape_norm_sq;
        CHECK(std::abs(got - oracle) <= 1e-11 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("f' and f'' match finite differences along an exact circular arc") {
    // A circle of curvature K through s realises theta' = K exactly, so f along
    // it can be differentiated numerically without any integrator.
    constexpr double h = 1e-5;
    for (const auto& s : sample_states(300, 9)) {
        if (std::hypot(s.f1, s.f2) > 0.9) continue;
        const double K = 1.3 * std::cos(3.0 * s.theta) - 0.4;
        auto at = [&](double t) {
            // chord of the arc written without cancellation
            const double chord = 2.0 * std::sin(0.5 * K * t) / K;
            const ProfileState q{s.f1 + chord * std::cos(s.theta + 0.5 * K * t),
                                 s.f2 + chord * std::sin(s.theta + 0.5 * K * t), s.theta + K * t};
            return fgh(q).f;
        };
        const auto d = f_derivatives(s, K);
        const double f0 = at(0.0), fp = at(h), fm = at(-h);
        CHECK(std::abs((fp - fm) / (2 * h) - d.fprime) < 1e-5);
        CHECK(std::abs((fp - 2 * f0 + fm) / (h * h) - d.fsecond) < 1e-5 * std::max(1.0, std::abs(d.fsecond)));
        CHECK(d.one_plus_fp2 == doctest::Approx(1.0 + d.fprime * d.fprime).epsilon(1e-12));
    }
}

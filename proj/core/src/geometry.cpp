#include "rotmin/geometry.hpp"

#include <cmath>
#include <string>

#include "rotmin/errors.hpp"

namespace rotmin {

namespace {

void check_state(const ProfileState& s) {
    if (!std::isfinite(s.f1) || !std::isfinite(s.f2) || !std::isfinite(s.theta))
        throw DomainError("profile state is not finite");
    if (s.f2 <= kDomainMargin)
        throw DomainError("profile state touches the rotation axis (f2 = " +
                          std::to_string(s.f2) + ")");
    if (s.f1 * s.f1 + s.f2 * s.f2 >= 1.0 - kDomainMargin)
        throw DomainError("profile state left the open unit disk");
}

}  // namespace

RotationParams RotationParams::from_kl(int k, int l) {
    if (k < 1 || l < 1)
        throw std::invalid_argument("rotation factors need k >= 1 and l >= 1");
    return RotationParams(k, l);
}

RotationParams RotationParams::from_nl(int n, int l) { return from_kl(n - l - 1, l); }

RotationParams RotationParams::from_nk(int n, int k) { return from_kl(k, n - k - 1); }

double RotationParams::equilibrium_radius() const noexcept {
    return std::sqrt(static_cast<double>(l_) / static_cast<double>(n()));
}

Fgh fgh(const ProfileState& s) {
    check_state(s);
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    const double f = std::sqrt(1.0 - s.f1 * s.f1 - s.f2 * s.f2);
    const double g = s.f2 * c - s.f1 * sn;
    if (std::abs(g) >= 1.0) throw DomainError("support function |g| >= 1");
    return {f, g, std::sqrt(1.0 - g * g)};
}

double theta_prime(const ProfileState& s, const RotationParams& p) {
    check_state(s);
    const double n = p.n();
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    const double g = s.f2 * c - s.f1 * sn;
    const double numer = ((p.l() - n * s.f2 * s.f2) * c + s.f1 * s.f2 * n * sn) * (1.0 - g * g);
    const double denom = s.f2 * (1.0 - s.f1 * s.f1 - s.f2 * s.f2);
    if (!(denom > 0.0)) throw DomainError("theta' denominator is not positive");
    return numer / denom;
}

double mean_curvature_trace(const ProfileState& s, const RotationParams& p, double K) {
    const auto [f, g, h] = fgh(s);
    const double xi1 = s.f1 * std::cos(s.theta) + s.f2 * std::sin(s.theta);
    const double kappa1 = -std::cos(s.theta) / s.f2;
    // (f f')^2 = xi1^2
    return (p.n() * g + p.l() * kappa1 + K) / h - K * xi1 * xi1 / (h * h * h);
}

CurvatureBundle curvature_bundle(const ProfileState& s, const RotationParams& p) {
    const auto [f, g, h] = fgh(s);
    const double K = theta_prime(s, p);
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    const double xi1 = s.f1 * c + s.f2 * sn;
    const double kappa1 = -c / s.f2;
    const double h3 = h * h * h;

    CurvatureBundle b{};
    b.f = f;
    b.g = g;
    b.h = h;
    b.xi1 = xi1;
    b.K = K;
    b.kappa1 = kappa1;
    b.lambda0 = g / h;
    b.lambda_mid = (g + kappa1) / h;
    b.lambda_last = (g + K) / h - K * xi1 * xi1 / h3;
    b.shape_norm_sq = p.k() * b.lambda0 * b.lambda0 + p.l() * b.lambda_mid * b.lambda_mid +
                      b.lambda_last * b.lambda_last;
    b.nH = (p.n() * g + p.l() * kappa1 + K) / h - K * xi1 * xi1 / h3;
    return b;
}

FDerivatives f_derivatives(const ProfileState& s, double K) {
    const auto [f, g, h] = fgh(s);
    const double xi1 = s.f1 * std::cos(s.theta) + s.f2 * std::sin(s.theta);
    const double f2sq = f * f;
    return {-xi1 / f, -((1.0 - g * g) + g * K * f2sq) / (f2sq * f), (h * h) / f2sq};
}

}  // namespace rotmin

#include "rotmin/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "rotmin/errors.hpp"
#include "rotmin/parallel.hpp"
#include "rotmin/report.hpp"
#include "rotmin/spectrum.hpp"

namespace rotmin {

namespace {

CheckResult make(std::string name, double measured, double threshold) {
    return {std::move(name), measured, threshold, std::isfinite(measured) && measured < threshold};
}

// Random states well inside the domain: |p| <= 0.95, f2 >= 0.02, |g| <= 0.95.
std::vector<ProfileState> random_states(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ProfileState> out;
    while (static_cast<int>(out.size()) < count) {
        const double r = 0.95 * std::sqrt(unit(rng));
        const double phi = std::numbers::pi * unit(rng);
        const ProfileState s{r * std::cos(phi), r * std::sin(phi), 2.0 * std::numbers::pi * unit(rng)};
        if (s.f2 < 0.02) continue;
        if (std::abs(s.f2 * std::cos(s.theta) - s.f1 * std::sin(s.theta)) > 0.95) continue;
        out.push_back(s);
    }
    return out;
}

ProfileState at(const Trajectory& t, std::size_t i) {
    const auto y = t.state(i);
    return {y[0], y[1], y[2]};
}

double reflection_error(const PeriodicProfile& p) {
    // Backward flight from u = 0, written as a forward flight in s = -u.
    const OdeSystem forward = profile_system(p.params);
    OdeSystem backward{3, [&forward](double s, std::span<const double> y, std::span<double> dy) {
                           forward.rhs(-s, y, dy);
                           for (double& v : dy) v = -v;
                       }};
    const double half = 0.5 * p.period;
    const std::vector<double> y0{0.0, p.a0, 0.0};
    const Trajectory back = integrate(backward, 0.0, y0, half, p.integrator);
    double worst = 0.0;
    for (int m = 1; m <= 20; ++m) {
        const double u = half * m / 20.0;
        const auto yf = p.half_trajectory.evaluate(std::min(u, p.half_trajectory.back_u()));
        const auto yb = back.evaluate(u);
        worst = std::max({worst, std::abs(yb[0] + yf[0]), std::abs(yb[1] - yf[1]),
                          std::abs(yb[2] + yf[2])});
    }
    return worst;
}

// Central differences of f from short fresh flights around trajectory nodes,
// so that interpolation error does not enter the second difference.
std::pair<double, double> f_derivative_errors(const PeriodicProfile& p) {
    constexpr double h = 1e-5;
    const OdeSystem sys = profile_system(p.params);
    OdeSystem backward{3, [&sys](double s, std::span<const double> y, std::span<double> dy) {
                           sys.rhs(-s, y, dy);
                           for (double& v : dy) v = -v;
                       }};
    IntegratorConfig fine = p.integrator;
    fine.rel_tol = 1e-14;
    fine.abs_tol = 1e-16;
    const Trajectory& t = p.half_trajectory;
    const std::size_t stride = std::max<std::size_t>(1, t.size() / 25);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 1; i + 1 < t.size(); i += stride) {
        const auto y = t.state(i);
        const ProfileState s = at(t, i);
        const Trajectory ft = integrate(sys, 0.0, y, h, fine);
        const double fp = fgh(at(ft, ft.size() - 1)).f;
        const Trajectory bt = integrate(backward, 0.0, y, h, fine);
        const double fm = fgh(at(bt, bt.size() - 1)).f;
        const double f0 = fgh(s).f;
        const FDerivatives d = f_derivatives(s, theta_prime(s, p.params));
        e1 = std::max(e1, std::abs((fp - fm) / (2.0 * h) - d.fprime));
        e2 = std::max(e2, std::abs((fp - 2.0 * f0 + fm) / (h * h) - d.fsecond));
    }
    return {e1, e2};
}

}  // namespace

std::vector<CheckResult> run_checks(const PeriodicProfile& profile, const CheckOptions& options) {
    std::vector<CheckResult> out;
    const auto& params = profile.params;
    std::mt19937_64 rng(options.seed);

    {
        const auto states = random_states(rng, options.random_states);
        double trace = 0.0, radius = 0.0;
        for (const auto& s : states) {
            const CurvatureBundle b = curvature_bundle(s, params);
            const double sum = params.k() * b.lambda0 + params.l() * b.lambda_mid + b.lambda_last;
            const double scale = std::max({1.0, std::abs(params.k() * b.lambda0),
                                           std::abs(params.l() * b.lambda_mid), std::abs(b.lambda_last)});
            trace = std::max(trace, std::abs(sum - b.nH) / scale);
            radius = std::max(radius, std::abs(b.xi1 * b.xi1 + b.g * b.g - (s.f1 * s.f1 + s.f2 * s.f2)));
        }
        out.push_back(make("trace_identity", trace, 1e-12));
        out.push_back(make("treadmill_radius_identity", radius, 1e-12));
    }

    out.push_back(make("shooting_residual_f1", profile.residual_f1, 1e-7));
    out.push_back(make("shooting_residual_theta", profile.residual_theta, 1e-7));
    out.push_back(make("minimality_residual", profile.minimality_residual, 1e-8));

    try {
        out.push_back(make("reflection_symmetry", reflection_error(profile), 1e-8));
    } catch (const Error&) {
        out.push_back(make("reflection_symmetry", std::numeric_limits<double>::infinity(), 1e-8));
    }

    try {
        const Trajectory full = full_period_flight(profile);
        const auto end = full.back_state();
        const double closure = std::max({std::abs(end[0]), std::abs(end[1] - profile.a0),
                                         std::abs(end[2] - 2.0 * std::numbers::pi)});
        out.push_back(make("full_period_closure", closure, 1e-6));
    } catch (const Error&) {
        out.push_back(make("full_period_closure", std::numeric_limits<double>::infinity(), 1e-6));
    }

    {
        const auto [e1, e2] = f_derivative_errors(profile);
        out.push_back(make("fd_fprime", e1, 1e-5));
        out.push_back(make("fd_fsecond", e2, 1e-5));
    }

    for (OperatorKind kind : {OperatorKind::laplace, OperatorKind::jacobi}) {
        const SpectrumOptions range = default_spectrum_options(kind);
        std::uniform_real_distribution<double> lam(range.lambda_min, range.lambda_max);
        std::uniform_int_distribution<int> level(0, 2);
        std::vector<std::pair<ModeIndex, double>> picks;
        for (int s = 0; s < options.abel_samples; ++s) {
            const int i = level(rng), j = level(rng);
            picks.emplace_back(ModeIndex::make(i, j, params), lam(rng));
        }
        std::vector<double> residual(picks.size());
        parallel_for(picks.size(), options.jobs, [&](std::size_t s) {
            residual[s] = discriminant(profile, picks[s].first, kind, picks[s].second, profile.integrator)
                              .monodromy.abel_residual();
        });
        out.push_back(make(std::string("abel_identity_") + to_string(kind),
                           *std::max_element(residual.begin(), residual.end()), 1e-6));
    }

    for (auto which : {AnalyticEigenfunction::constant, AnalyticEigenfunction::f1_mode00,
                       AnalyticEigenfunction::f_mode10, AnalyticEigenfunction::f2_mode01})
        out.push_back(make(std::string("eigenfunction_") + to_string(which),
                           analytic_eigenfunction_residual(profile, which), 1e-6));

    {
        const double d = discriminant(profile, ModeIndex::make(0, 0, params), OperatorKind::laplace, 0.0,
                                      profile.integrator)
                             .delta0;
        out.push_back(make("delta00_at_zero", std::abs(d), 1e-6));
    }
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

std::string format_checks(const std::vector<CheckResult>& results) {
    std::string out;
    char buf[256];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%-28s %-16s < %-10s %s\n", r.name.c_str(),
                      format_number(r.measured).c_str(), format_number(r.threshold).c_str(),
                      r.passed ? "PASS" : "FAIL");
        out += buf;
    }
    return out;
}

}  // namespace rotmin

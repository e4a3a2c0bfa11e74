#include "rotmin/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rotmin/errors.hpp"

namespace rotmin {

namespace {

constexpr double kShootTol = 1e-9;
constexpr int kMaxShootIterations = 200;
constexpr int kMaxSubdivisions = 64;

void check_a0(const RotationParams& params, double a0) {
    if (!(a0 > 0.0) || !(a0 < 1.0))
        throw std::invalid_argument("a0 must lie in (0, 1), got " + std::to_string(a0));
    (void)params;
}

struct Sample {
    double a;
    std::optional<double> residual;
};

Sample sample(const RotationParams& params, double a, const IntegratorConfig& cfg, int& evals) {
    ++evals;
    try {
        return {a, shooting_residual(params, a, cfg)};
    } catch (const OutOfRegime&) {
        return {a, std::nullopt};
    }
}

bool brackets(const Sample& lo, const Sample& hi) {
    return lo.residual && hi.residual && ((*lo.residual < 0.0) != (*hi.residual < 0.0));
}

}  // namespace

OdeSystem profile_system(const RotationParams& params) {
    OdeSystem sys;
    sys.dimension = 3;
    sys.rhs = [params](double, std::span<const double> y, std::span<double> dy) {
        const ProfileState s{y[0], y[1], y[2]};
        dy[0] = std::cos(s.theta);
        dy[1] = std::sin(s.theta);
        dy[2] = theta_prime(s, params);
    };
    return sys;
}

ShootingProblem ShootingProblem::with_default_bracket(const RotationParams& params,
                                                      const IntegratorConfig& integrator) {
    const double a_eq = params.equilibrium_radius();
    return {params, 0.05 * a_eq, 0.95 * a_eq, integrator};
}

HalfFlight half_flight(const RotationParams& params, double a0, const IntegratorConfig& config) {
    check_a0(params, a0);
    const std::vector<double> y0{0.0, a0, 0.0};
    EventHit hit = integrate_until(
        profile_system(params), 0.0, y0,
        [](std::span<const double> y) { return y[2] - std::numbers::pi; },
        EventDirection::rising, kMaxHalfFlight, config);
    HalfFlight out;
    out.t_half = hit.u_event;
    out.end_state = {hit.state_event[0], hit.state_event[1], hit.state_event[2]};
    out.trajectory = std::move(hit.trajectory);
    return out;
}

double shooting_residual(const RotationParams& params, double a0, const IntegratorConfig& config) {
    try {
        return half_flight(params, a0, config).end_state.f1;
    } catch (const EventNotFound& e) {
        throw OutOfRegime(std::string("a0 = ") + std::to_string(a0) + " out of regime: " + e.what());
    } catch (const DomainError& e) {
        throw OutOfRegime(std::string("a0 = ") + std::to_string(a0) + " out of regime: " + e.what());
    } catch (const StepLimitExceeded& e) {
        throw OutOfRegime(std::string("a0 = ") + std::to_string(a0) + " out of regime: " + e.what());
    }
}

PeriodicProfile profile_from_a0(const RotationParams& params, double a0,
                                const IntegratorConfig& config) {
    HalfFlight flight = half_flight(params, a0, config);
    PeriodicProfile p{params, a0, 0.0, {}};
    p.a0 = a0;
    p.period = 2.0 * flight.t_half;
    p.residual_f1 = std::abs(flight.end_state.f1);
    p.residual_f2 = std::abs(flight.end_state.f2 - a0);
    p.residual_theta = std::abs(flight.end_state.theta - std::numbers::pi);
    double worst = 0.0;
    for (std::size_t i = 0; i < flight.trajectory.size(); ++i) {
        const auto y = flight.trajectory.state(i);
        worst = std::max(worst, std::abs(curvature_bundle({y[0], y[1], y[2]}, params).nH));
    }
    p.minimality_residual = worst;
    p.half_trajectory = std::move(flight.trajectory);
    p.integrator = config;
    return p;
}

PeriodicProfile solve_periodic(const ShootingProblem& problem) {
    const auto& params = problem.params;
    const auto& cfg = problem.integrator;
    if (!(problem.a_low > 0.0) || !(problem.a_low < problem.a_high) || !(problem.a_high < 1.0))
        throw std::invalid_argument("shooting bracket must satisfy 0 < a_low < a_high < 1");

    int evals = 0;
    Sample lo = sample(params, problem.a_low, cfg, evals);
    Sample hi = sample(params, problem.a_high, cfg, evals);

    if (!brackets(lo, hi)) {
        bool found = false;
        for (int cells = 2; cells <= kMaxSubdivisions && !found; cells *= 2) {
            std::vector<Sample> grid;
            grid.reserve(static_cast<std::size_t>(cells) + 1);
            grid.push_back(lo);
            for (int c = 1; c < cells; ++c) {
                const double a = problem.a_low + (problem.a_high - problem.a_low) * c / cells;
                grid.push_back(sample(params, a, cfg, evals));
            }
            grid.push_back(hi);
            for (std::size_t c = 0; c + 1 < grid.size(); ++c) {
                if (brackets(grid[c], grid[c + 1])) {
                    lo = grid[c];
                    hi = grid[c + 1];
                    found = true;
                    break;
                }
            }
        }
        if (!found)
            throw NoSignChange("shooting residual has no sign change in [" +
                               std::to_string(problem.a_low) + ", " +
                               std::to_string(problem.a_high) + "]");
    }

    double a_lo = lo.a, r_lo = *lo.residual;
    double a_hi = hi.a, r_hi = *hi.residual;
    double best_a = std::abs(r_lo) < std::abs(r_hi) ? a_lo : a_hi;
    double best_r = std::min(std::abs(r_lo), std::abs(r_hi));

    // Bisection down to a narrow bracket, then secant steps kept inside it.
    const double switch_width = 1e-4 * (a_hi - a_lo);
    for (int it = 0; it < kMaxShootIterations; ++it) {
        if (best_r < kShootTol) break;
        double a_new;
        if (a_hi - a_lo > switch_width) {
            a_new = 0.5 * (a_lo + a_hi);
        } else {
            a_new = a_hi - r_hi * (a_hi - a_lo) / (r_hi - r_lo);
            const double margin = 1e-3 * (a_hi - a_lo);
            if (!(a_new > a_lo + margin && a_new < a_hi - margin)) a_new = 0.5 * (a_lo + a_hi);
        }
        if (a_new <= a_lo || a_new >= a_hi) break;  // bracket at machine resolution
        ++evals;
        const double r = shooting_residual(params, a_new, cfg);
        if (std::abs(r) < best_r) {
            best_r = std::abs(r);
            best_a = a_new;
        }
        if ((r < 0.0) == (r_lo < 0.0)) {
            a_lo = a_new;
            r_lo = r;
        } else {
            a_hi = a_new;
            r_hi = r;
        }
        if (it == kMaxShootIterations - 1 && best_r >= kShootTol)
            throw NonConvergence("shooting did not reach |f1(T/2)| < 1e-9 in 200 iterations");
    }
    if (best_r >= kShootTol && a_hi - a_lo > 1e-14)
        throw NonConvergence("shooting stalled with |f1(T/2)| = " + std::to_string(best_r));

    PeriodicProfile p = profile_from_a0(params, best_a, cfg);
    p.shooting_evaluations = evals;
    return p;
}

Trajectory full_period_flight(const PeriodicProfile& profile) {
    const std::vector<double> y0{0.0, profile.a0, 0.0};
    return integrate(profile_system(profile.params), 0.0, y0, profile.period, profile.integrator);
}

std::vector<SweepEntry> table_sweep(int l, int n_from, int n_to, const IntegratorConfig& config) {
    if (l < 1 || n_from < l + 2 || n_to < n_from || n_to > 200)
        throw std::invalid_argument("table sweep needs l >= 1 and l + 2 <= n_from <= n_to <= 200");

    std::vector<SweepEntry> out;
    std::optional<double> previous;
    for (int n = n_from; n <= n_to; ++n) {
        const RotationParams params = RotationParams::from_nl(n, l);
        SweepEntry entry;
        entry.n = n;
        std::string continued_failure;
        if (previous) {
            // a0 scales roughly like 1/sqrt(n) along the family.
            const double center = *previous * std::sqrt(static_cast<double>(n - 1) / n);
            const double a_cap = 0.95 * params.equilibrium_radius();
            ShootingProblem problem{params, 0.9 * center, std::min(1.1 * center, a_cap), config};
            try {
                if (problem.a_low < problem.a_high) entry.profile = solve_periodic(problem);
            } catch (const Error& e) {
                continued_failure = e.what();
            }
        }
        if (!entry.profile) {
            try {
                entry.profile = solve_periodic(ShootingProblem::with_default_bracket(params, config));
            } catch (const Error& e) {
                entry.failure = e.what();
                if (!continued_failure.empty()) entry.failure += " (continuation: " + continued_failure + ")";
            }
        }
        if (entry.profile) previous = entry.profile->a0;
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace rotmin

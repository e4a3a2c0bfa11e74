#pragma once

// Closed minimal profile curves by shooting on the starting radius a0.
//
// The flight starts at (f1, f2, theta) = (0, a0, 0). By the reflection
// symmetry f1(-t) = -f1(t), f2(-t) = f2(t), theta(-t) = -theta(t), the
// curve closes with period T as soon as the first rising crossing of
// theta = pi at t = T/2 happens on the f2-axis, i.e. f1(T/2) = 0.

#include <optional>
#include <string>
#include <vector>

#include "rotmin/geometry.hpp"
#include "rotmin/ivp.hpp"

namespace rotmin {

/// Flights longer than this without reaching theta = pi are out of regime.
inline constexpr double kMaxHalfFlight = 50.0;

/// f2(T/2) - a0 above this marks a profile whose f2-closure is suspect.
inline constexpr double kF2ClosureFlag = 1e-6;

/// (f1, f2, theta) with f1' = cos(theta), f2' = sin(theta), theta' = K.
OdeSystem profile_system(const RotationParams& params);

struct ShootingProblem {
    RotationParams params;
    double a_low;
    double a_high;
    IntegratorConfig integrator{};

    /// Bracket (0.05, 0.95) * sqrt(l/n) around the oscillating branch.
    static ShootingProblem with_default_bracket(const RotationParams& params,
                                                const IntegratorConfig& integrator = {});
};

struct HalfFlight {
    double t_half = 0.0;
    ProfileState end_state;
    Trajectory trajectory;
};

/// Flies from (0, a0, 0) to the first rising crossing of theta = pi.
/// Throws EventNotFound or DomainError outside the oscillating regime.
HalfFlight half_flight(const RotationParams& params, double a0,
                       const IntegratorConfig& config = {});

/// Signed f1(T/2). Any failure of the flight is reported as OutOfRegime.
double shooting_residual(const RotationParams& params, double a0,
                         const IntegratorConfig& config = {});

struct PeriodicProfile {
    RotationParams params;
    double a0 = 0.0;
    double period = 0.0;
    Trajectory half_trajectory;  ///< on [0, T/2]
    double residual_f1 = 0.0;    ///< |f1(T/2)|
    double residual_f2 = 0.0;    ///< |f2(T/2) - a0|, reported only
    double residual_theta = 0.0; ///< |theta(T/2) - pi|
    double minimality_residual = 0.0;  ///< max |nH| over the half trajectory
    int shooting_evaluations = 0;
    IntegratorConfig integrator{};

    bool f2_closure_flagged() const { return residual_f2 > kF2ClosureFlag; }
    ProfileState initial_state() const { return {0.0, a0, 0.0}; }
};

/// Builds the diagnostics of the flight started at a0 without shooting.
PeriodicProfile profile_from_a0(const RotationParams& params, double a0,
                                const IntegratorConfig& config = {});

/// Bisection followed by safeguarded secant steps on the shooting residual,
/// until |f1(T/2)| < 1e-9. When the bracket endpoints do not differ in sign
/// the bracket is subdivided (up to 64 cells) before giving up with
/// NoSignChange. NonConvergence after 200 iterations.
PeriodicProfile solve_periodic(const ShootingProblem& problem);

/// Integrates the profile over one full period [0, T] from its initial state.
Trajectory full_period_flight(const PeriodicProfile& profile);

struct SweepEntry {
    int n = 0;
    std::optional<PeriodicProfile> profile;
    std::string failure;  ///< empty on success
};

/// One shooting solve per n in [n_from, n_to] at fixed l, continuing the
/// bracket from the previous converged a0. Failures are recorded, not thrown.
std::vector<SweepEntry> table_sweep(int l, int n_from, int n_to,
                                    const IntegratorConfig& config = {});

}  // namespace rotmin

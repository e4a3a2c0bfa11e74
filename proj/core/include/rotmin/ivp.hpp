#pragma once

// Adaptive Dormand-Prince 5(4) integrator with the 4th-order continuous
// extension and scalar event location. Used for the profile flights and for
// the extended (profile + Floquet pair) systems of the spectrum module.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rotmin {

struct OdeSystem {
    std::size_t dimension = 0;
    /// dydu <- rhs(u, y). May throw DomainError; the integrator shrinks the
    /// step on a failed trial stage and rethrows if the failure persists.
    std::function<void(double u, std::span<const double> y, std::span<double> dydu)> rhs;
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 1e-2;
    long max_steps = 1'000'000;

    /// Throws std::invalid_argument on non-positive tolerances or step.
    void validate() const;
};

/// Accepted nodes of one integration plus the dense-output polynomial of
/// every step between consecutive nodes.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::size_t dimension) : dim_(dimension) {}

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return u_.size(); }
    bool empty() const noexcept { return u_.empty(); }
    static constexpr int interpolation_order() noexcept { return 4; }

    double u(std::size_t i) const { return u_[i]; }
    std::span<const double> state(std::size_t i) const {
        return {states_.data() + i * dim_, dim_};
    }
    std::span<const double> derivative(std::size_t i) const {
        return {derivs_.data() + i * dim_, dim_};
    }
    double front_u() const { return u_.front(); }
    double back_u() const { return u_.back(); }
    std::span<const double> back_state() const { return state(size() - 1); }

    /// Dense evaluation; exact at the nodes. Throws std::out_of_range
    /// outside [front_u(), back_u()].
    void evaluate(double u, std::span<double> out) const;
    std::vector<double> evaluate(double u) const;

    /// Index of the node starting the segment that contains u.
    std::size_t segment_index(double u) const;

    // Builder interface used by the integrator.
    void push_first(double u, std::span<const double> y, std::span<const double> dy);
    /// Appends a node reached by one step; `coeffs` holds the five dense
    /// coefficient vectors of that step, concatenated.
    void push_step(double u, std::span<const double> y, std::span<const double> dy,
                   std::span<const double> coeffs);
    /// Drops the last node and its step polynomial (no-op on a single node).
    void pop_back();

private:
    std::size_t dim_ = 0;
    std::vector<double> u_;
    std::vector<double> states_;
    std::vector<double> derivs_;
    std::vector<double> coeffs_;  // (size() - 1) * 5 * dim_
};

/// Integrates from u0 to u1 > u0. Errors: StepLimitExceeded,
/// NonFiniteDerivative, DomainError (from rhs).
Trajectory integrate(const OdeSystem& system, double u0, std::span<const double> state0, double u1,
                     const IntegratorConfig& config = {});

enum class EventDirection { rising, falling, any };

using EventFunction = std::function<double(std::span<const double> state)>;

struct EventHit {
    double u_event = 0.0;
    std::vector<double> state_event;
    Trajectory trajectory;  ///< ends exactly at u_event
};

/// Integrates until the first crossing of event(state) = 0 in the requested
/// direction inside (u0, u_max]. The crossing is located on the dense output
/// and then polished with genuine steps until |event| < 1e-12 (or no further
/// progress is possible). Throws EventNotFound when u_max is reached.
EventHit integrate_until(const OdeSystem& system, double u0, std::span<const double> state0,
                         const EventFunction& event, EventDirection direction, double u_max,
                         const IntegratorConfig& config = {});

}  // namespace rotmin

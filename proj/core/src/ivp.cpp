#include "rotmin/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "rotmin/errors.hpp"

namespace rotmin {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("integrator tolerances must be positive");
    if (!(max_step > 0.0)) throw std::invalid_argument("integrator max_step must be positive");
    if (max_steps <= 0) throw std::invalid_argument("integrator max_steps must be positive");
}

// ---------------------------------------------------------------------------
// Trajectory

void Trajectory::push_first(double u, std::span<const double> y, std::span<const double> dy) {
    u_.assign(1, u);
    states_.assign(y.begin(), y.end());
    derivs_.assign(dy.begin(), dy.end());
    coeffs_.clear();
}

void Trajectory::push_step(double u, std::span<const double> y, std::span<const double> dy,
                           std::span<const double> coeffs) {
    u_.push_back(u);
    states_.insert(states_.end(), y.begin(), y.end());
    derivs_.insert(derivs_.end(), dy.begin(), dy.end());
    coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
}

void Trajectory::pop_back() {
    if (u_.size() < 2) return;
    u_.pop_back();
    states_.resize(states_.size() - dim_);
    derivs_.resize(derivs_.size() - dim_);
    coeffs_.resize(coeffs_.size() - 5 * dim_);
}

std::size_t Trajectory::segment_index(double u) const {
    if (u_.empty() || u < u_.front() || u > u_.back())
        throw std::out_of_range("dense evaluation outside the integrated interval");
    auto it = std::upper_bound(u_.begin(), u_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - u_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, u_.size() >= 2 ? u_.size() - 2 : 0);
}

void Trajectory::evaluate(double u, std::span<double> out) const {
    const std::size_t i = segment_index(u);
    if (u == u_[i] || u_.size() == 1) {
        std::copy_n(states_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_, out.begin());
        return;
    }
    if (u == u_[i + 1]) {
        std::copy_n(states_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_), dim_,
                    out.begin());
        return;
    }
    const double s = (u - u_[i]) / (u_[i + 1] - u_[i]);
    const double s1 = 1.0 - s;
    const double* r = coeffs_.data() + i * 5 * dim_;
    for (std::size_t j = 0; j < dim_; ++j) {
        const double r1 = r[j], r2 = r[dim_ + j], r3 = r[2 * dim_ + j], r4 = r[3 * dim_ + j],
                     r5 = r[4 * dim_ + j];
        out[j] = r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
    }
}

std::vector<double> Trajectory::evaluate(double u) const {
    std::vector<double> out(dim_);
    evaluate(u, out);
    return out;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

enum class StepOutcome { ok, domain_failed, nonfinite_failed };

class Stepper {
public:
    Stepper(const OdeSystem& sys, const IntegratorConfig& cfg)
        : sys_(sys), cfg_(cfg), n_(sys.dimension), work_(n_ * 6), coeffs_(n_ * 5) {}

    void eval(double u, std::span<const double> y, std::span<double> dy) const {
        sys_.rhs(u, y, dy);
        for (double v : dy)
            if (!std::isfinite(v))
                throw NonFiniteDerivative(
                    "right-hand side returned a non-finite value at u = " + std::to_string(u), u);
    }

    /// One trial step of size h from (u, y) with k1 = f(u, y). On success y1
    /// holds the 5th-order solution, k7 = f(u + h, y1) and err the scaled
    /// error norm; the step polynomial is available through coeffs().
    StepOutcome trial(double u, std::span<const double> y, std::span<const double> k1, double h,
                      std::span<double> y1, std::span<double> k7, double& err) {
        const std::size_t n = n_;
        double* w = work_.data();
        std::span<double> k2(w, n), k3(w + n, n), k4(w + 2 * n, n), k5(w + 3 * n, n),
            k6(w + 4 * n, n), yt(w + 5 * n, n);
        try {
            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
            eval(u + c2 * h, yt, k2);
            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            eval(u + c3 * h, yt, k3);
            for (std::size_t i = 0; i < n; ++i)
                yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            eval(u + c4 * h, yt, k4);
            for (std::size_t i = 0; i < n; ++i)
                yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            eval(u + c5 * h, yt, k5);
            for (std::size_t i = 0; i < n; ++i)
                yt[i] = y[i] +
                        h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            eval(u + h, yt, k6);
            for (std::size_t i = 0; i < n; ++i)
                y1[i] = y[i] +
                        h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            eval(u + h, y1, k7);
        } catch (const DomainError& e) {
            last_failure_ = e.what();
            return StepOutcome::domain_failed;
        } catch (const NonFiniteDerivative& e) {
            last_failure_ = e.what();
            return StepOutcome::nonfinite_failed;
        }

        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * k7[i]);
            const double sk =
                cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            acc += (e / sk) * (e / sk);
        }
        err = std::sqrt(acc / static_cast<double>(n));

        for (std::size_t i = 0; i < n; ++i) {
            const double ydiff = y1[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            coeffs_[i] = y[i];
            coeffs_[n + i] = ydiff;
            coeffs_[2 * n + i] = bspl;
            coeffs_[3 * n + i] = ydiff - h * k7[i] - bspl;
            coeffs_[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                      d6 * k6[i] + d7 * k7[i]);
        }
        return StepOutcome::ok;
    }

    std::span<const double> coeffs() const { return coeffs_; }
    const std::string& last_failure() const { return last_failure_; }

private:
    const OdeSystem& sys_;
    const IntegratorConfig& cfg_;
    std::size_t n_;
    std::vector<double> work_;
    std::vector<double> coeffs_;
    std::string last_failure_;
};

/// Invoked after every accepted step (already pushed onto the trajectory).
/// Returning true ends the integration.
using AcceptHook = std::function<bool(Stepper&, Trajectory&, double ua,
                                      std::span<const double> ya, std::span<const double> k1a)>;

void check_inputs(const OdeSystem& system, double u0, std::span<const double> state0, double u1,
                  const IntegratorConfig& config) {
    config.validate();
    if (system.dimension == 0 || !system.rhs)
        throw std::invalid_argument("ODE system needs a positive dimension and a right-hand side");
    if (state0.size() != system.dimension)
        throw std::invalid_argument("initial state length differs from the system dimension");
    if (!(u1 > u0)) throw std::invalid_argument("integration interval must satisfy u1 > u0");
    for (double v : state0)
        if (!std::isfinite(v)) throw std::invalid_argument("initial state is not finite");
}

Trajectory run(const OdeSystem& system, double u0, std::span<const double> state0, double u1,
               const IntegratorConfig& config, const AcceptHook& hook) {
    check_inputs(system, u0, state0, u1, config);
    Stepper stepper(system, config);
    const std::size_t n = system.dimension;

    std::vector<double> y(state0.begin(), state0.end()), k1(n), y1(n), k7(n);
    stepper.eval(u0, y, k1);

    Trajectory traj(n);
    traj.push_first(u0, y, k1);

    double h = std::min(config.max_step, 0.01 * (u1 - u0));
    double u = u0;
    double err_prev = 1e-4;
    long attempts = 0;
    bool last_rejected = false;

    while (u < u1) {
        if (++attempts > config.max_steps)
            throw StepLimitExceeded("integrator exceeded " + std::to_string(config.max_steps) +
                                    " steps at u = " + std::to_string(u));
        bool final_step = false;
        if (u + 1.0001 * h >= u1) {
            h = u1 - u;
            final_step = true;
        }
        const double h_min =
            16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u));
        double err = 0.0;
        const StepOutcome outcome = stepper.trial(u, y, k1, h, y1, k7, err);
        if (outcome != StepOutcome::ok || !std::isfinite(err)) {
            // A failed stage may be an overshoot of a too-large trial step;
            // only a failure that survives step reduction is genuine.
            if (h <= 1e3 * h_min) {
                if (outcome == StepOutcome::domain_failed)
                    throw DomainError(stepper.last_failure() + " (at u = " + std::to_string(u) + ")");
                throw NonFiniteDerivative(stepper.last_failure().empty()
                                              ? "non-finite error estimate at u = " + std::to_string(u)
                                              : stepper.last_failure(),
                                          u);
            }
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        if (err <= 1.0) {
            const double u_next = final_step ? u1 : u + h;
            traj.push_step(u_next, y1, k7, stepper.coeffs());
            if (hook && hook(stepper, traj, u, y, k1)) return traj;
            u = u_next;
            y.swap(y1);
            k1.swap(k7);
            // PI step-size control, beta = 0.04
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.04);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            err_prev = std::max(err, 1e-4);
            h = std::min(h * fac, config.max_step);
            last_rejected = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
            if (h < h_min)
                throw StepLimitExceeded("step size underflow at u = " + std::to_string(u));
        }
    }
    return traj;
}

bool crosses(double g0, double g1, EventDirection dir) {
    switch (dir) {
        case EventDirection::rising: return g0 < 0.0 && g1 >= 0.0;
        case EventDirection::falling: return g0 > 0.0 && g1 <= 0.0;
        case EventDirection::any: return (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
    }
    return false;
}

}  // namespace

Trajectory integrate(const OdeSystem& system, double u0, std::span<const double> state0, double u1,
                     const IntegratorConfig& config) {
    return run(system, u0, state0, u1, config, {});
}

EventHit integrate_until(const OdeSystem& system, double u0, std::span<const double> state0,
                         const EventFunction& event, EventDirection direction, double u_max,
                         const IntegratorConfig& config) {
    if (!event) throw std::invalid_argument("integrate_until needs an event function");
    constexpr double kEventTol = 1e-12;
    const std::size_t n = system.dimension;

    // A start on the event surface must move off it before a crossing
    // counts, so re-running from an event point does not fire at once.
    std::optional<double> g_prev;
    if (const double g0 = event(state0); std::abs(g0) > kEventTol) g_prev = g0;

    EventHit hit;
    bool found = false;

    AcceptHook hook = [&](Stepper& stepper, Trajectory& traj, double ua,
                          std::span<const double> ya, std::span<const double> k1a) -> bool {
        const double ub = traj.back_u();
        const double g_end = event(traj.back_state());
        if (!g_prev) {
            if (std::abs(g_end) > kEventTol) g_prev = g_end;
            return false;
        }
        if (!crosses(*g_prev, g_end, direction)) {
            g_prev = g_end;
            return false;
        }

        // Bracket on the step polynomial.
        std::vector<double> tmp(n);
        double lo = ua, hi = ub, g_lo = *g_prev;
        for (int it = 0; it < 200; ++it) {
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi)))
                break;
            const double mid = 0.5 * (lo + hi);
            traj.evaluate(mid, tmp);
            const double gm = event(tmp);
            if (gm != 0.0 && (gm < 0.0) == (g_lo < 0.0)) {
                lo = mid;
                g_lo = gm;
            } else {
                hi = mid;
            }
        }

        // Polish with genuine steps from the start of the accepted step:
        // secant iteration on the step length.
        std::vector<double> ys(n), ks(n);
        double err = 0.0;
        auto step_to = [&](double ut) {
            if (stepper.trial(ua, ya, k1a, ut - ua, ys, ks, err) != StepOutcome::ok)
                throw DomainError("event polishing step left the domain");
            return event(ys);
        };
        double ua_s = 0.5 * (lo + hi);
        double ga_s = step_to(ua_s);
        double best_u = ua_s, best_g = ga_s;
        std::vector<double> best_y = ys, best_k = ks;
        std::vector<double> best_c(stepper.coeffs().begin(), stepper.coeffs().end());
        double ub_s = std::min(ub, ua_s + std::max(1e-9 * (ub - ua), 1e-13));
        double gb_s = ub_s > ua_s ? step_to(ub_s) : ga_s;
        auto keep_if_better = [&](double uu, double gg) {
            if (std::abs(gg) < std::abs(best_g)) {
                best_u = uu;
                best_g = gg;
                best_y = ys;
                best_k = ks;
                best_c.assign(stepper.coeffs().begin(), stepper.coeffs().end());
            }
        };
        keep_if_better(ub_s, gb_s);
        for (int it = 0; it < 12 && std::abs(best_g) > kEventTol; ++it) {
            if (gb_s == ga_s) break;
            const double u_new = ub_s - gb_s * (ub_s - ua_s) / (gb_s - ga_s);
            if (!std::isfinite(u_new) || u_new <= ua || u_new > ub) break;
            ua_s = ub_s;
            ga_s = gb_s;
            ub_s = u_new;
            gb_s = step_to(ub_s);
            keep_if_better(ub_s, gb_s);
        }

        traj.pop_back();
        traj.push_step(best_u, best_y, best_k, best_c);
        hit.u_event = best_u;
        hit.state_event = std::move(best_y);
        found = true;
        return true;
    };

    hit.trajectory = run(system, u0, state0, u_max, config, hook);
    if (!found)
        throw EventNotFound("event not reached before u = " + std::to_string(u_max));
    return hit;
}

}  // namespace rotmin

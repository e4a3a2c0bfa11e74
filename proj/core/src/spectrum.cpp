#include "rotmin/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rotmin/errors.hpp"
#include "rotmin/parallel.hpp"

namespace rotmin {

namespace {

constexpr int kExtendedDim = 8;
// Samples this close to zero are roots in their own right (e.g. the
// constant eigenfunction makes delta0 vanish identically).
constexpr double kExactZero = 1e-12;
constexpr double kTangentialProbe = 0.05;
constexpr double kTangentialCandidate = 1e-3;
constexpr double kTangentialAccept = 1e-8;
constexpr double kDuplicateRoot = 1e-6;
constexpr double kRescaleThreshold = 1e100;

std::int64_t binomial(std::int64_t n, std::int64_t r) {
    if (r < 0 || n < 0 || r > n) return 0;
    r = std::min(r, n - r);
    std::int64_t out = 1;
    for (std::int64_t t = 1; t <= r; ++t) out = out * (n - r + t) / t;
    return out;
}

ProfileState as_state(std::span<const double> y) { return {y[0], y[1], y[2]}; }

OdeSystem extended_system(const PeriodicProfile& profile, const ModeIndex& mode, OperatorKind kind,
                          double lambda) {
    OdeSystem sys;
    sys.dimension = kExtendedDim;
    sys.rhs = [params = profile.params, mode, kind, lambda](double, std::span<const double> y,
                                                            std::span<double> dy) {
        const ProfileState s = as_state(y);
        const auto [P, Q] = coefficients(mode, kind, lambda, s, params);
        dy[0] = std::cos(s.theta);
        dy[1] = std::sin(s.theta);
        dy[2] = theta_prime(s, params);
        dy[3] = y[4];
        dy[4] = -P * y[4] - Q * y[3];
        dy[5] = y[6];
        dy[6] = -P * y[6] - Q * y[5];
        dy[7] = P;
    };
    return sys;
}

double max_abs_z(std::span<const double> y) {
    return std::max({std::abs(y[3]), std::abs(y[4]), std::abs(y[5]), std::abs(y[6])});
}

Discriminant finish(std::span<const double> y, std::int64_t scale_log2) {
    MonodromyMatrix m;
    m.z1T = y[3];
    m.dz1T = y[4];
    m.z2T = y[5];
    m.dz2T = y[6];
    m.scale_log2 = scale_log2;
    m.wronskianT = m.z1T * m.dz2T - m.z2T * m.dz1T;
    m.log_abel_prediction = -y[7];
    m.abel_prediction = std::exp(-y[7]);

    Discriminant d;
    d.monodromy = m;
    if (scale_log2 == 0) {
        d.delta0 = 1.0 + m.wronskianT - m.trace();
    } else {
        const int e = static_cast<int>(scale_log2);
        // The stored pair is O(1) while the true W is O(1) too, so the
        // stored W = W / 2^(2e) has lost all digits; use exp(-int P) instead.
        d.delta0 = std::ldexp(1.0 + m.abel_prediction, -e) - m.trace();
    }
    return d;
}

/// Slow path: integrate in short chunks and rescale the Floquet pair
/// whenever it grows past kRescaleThreshold.
Discriminant chunked_flight(const OdeSystem& sys, std::vector<double> y, double period,
                            const IntegratorConfig& config) {
    constexpr int kChunks = 256;
    std::int64_t scale = 0;
    for (int c = 0; c < kChunks; ++c) {
        const double ua = period * c / kChunks;
        const double ub = c + 1 == kChunks ? period : period * (c + 1) / kChunks;
        Trajectory t = integrate(sys, ua, y, ub, config);
        auto end = t.back_state();
        y.assign(end.begin(), end.end());
        const double big = max_abs_z(y);
        if (big > kRescaleThreshold) {
            const int e = std::ilogb(big);
            for (int i = 3; i <= 6; ++i) y[static_cast<std::size_t>(i)] = std::ldexp(y[static_cast<std::size_t>(i)], -e);
            scale += e;
        }
    }
    return finish(y, scale);
}

struct SampleSet {
    std::vector<double> lambda;
    std::vector<double> delta;
};

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("lambda step must be positive");
    if (!(hi >= lo)) throw std::invalid_argument("lambda range must satisfy min <= max");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t m = 0; m < count; ++m) out[m] = lo + static_cast<double>(m) * step;
    if (hi - out.back() > 1e-9 * std::max(1.0, std::abs(hi))) out.push_back(hi);
    return out;
}

std::vector<double> evaluate_deltas(const PeriodicProfile& profile, const ModeIndex& mode,
                                    OperatorKind kind, const std::vector<double>& lambdas,
                                    const IntegratorConfig& config, int jobs) {
    std::vector<double> out(lambdas.size());
    parallel_for(lambdas.size(), jobs, [&](std::size_t m) {
        out[m] = discriminant(profile, mode, kind, lambdas[m], config).delta0;
    });
    return out;
}

void merge_samples(SampleSet& set, const std::vector<double>& lambdas,
                   const std::vector<double>& deltas) {
    std::vector<std::pair<double, double>> all;
    all.reserve(set.lambda.size() + lambdas.size());
    for (std::size_t m = 0; m < set.lambda.size(); ++m) all.emplace_back(set.lambda[m], set.delta[m]);
    for (std::size_t m = 0; m < lambdas.size(); ++m) all.emplace_back(lambdas[m], deltas[m]);
    std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first < b.first; });
    set.lambda.clear();
    set.delta.clear();
    for (auto& [l, d] : all) {
        if (!set.lambda.empty() && l - set.lambda.back() < 1e-12) continue;
        set.lambda.push_back(l);
        set.delta.push_back(d);
    }
}

bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

EigenRecord make_record(const ModeIndex& mode, double lambda, const Discriminant& d) {
    EigenRecord r;
    r.lambda = lambda;
    r.mode = mode;
    r.kernel_dim = std::clamp(d.monodromy.kernel_dimension(), 1, 2);
    r.ode_multiplicity = r.kernel_dim;
    r.total_multiplicity = r.kernel_dim * mode.mult_k * mode.mult_l;
    r.delta_at_root = d.delta0;
    return r;
}

}  // namespace

const char* to_string(OperatorKind kind) {
    return kind == OperatorKind::laplace ? "laplace" : "jacobi";
}

const char* to_string(AnalyticEigenfunction which) {
    switch (which) {
        case AnalyticEigenfunction::constant: return "constant";
        case AnalyticEigenfunction::f1_mode00: return "f1_mode00";
        case AnalyticEigenfunction::f_mode10: return "f_mode10";
        case AnalyticEigenfunction::f2_mode01: return "f2_mode01";
    }
    return "?";
}

SphereEigen sphere_eigen(int level, int dim) {
    if (level < 0 || dim < 1) throw std::invalid_argument("sphere_eigen needs level >= 0, dim >= 1");
    const double value = static_cast<double>(level) * (dim + level - 1);
    if (level == 0) return {value, 1};
    if (level == 1) return {value, dim + 1};
    return {value, binomial(dim + level, level) - binomial(dim + level - 2, level - 2)};
}

ModeIndex ModeIndex::make(int i, int j, const RotationParams& params) {
    const SphereEigen ek = sphere_eigen(i, params.k());
    const SphereEigen el = sphere_eigen(j, params.l());
    return {i, j, ek.value, el.value, ek.multiplicity, el.multiplicity};
}

Coefficients coefficients(const ModeIndex& mode, OperatorKind kind, double lambda,
                          const ProfileState& state, const RotationParams& params) {
    const CurvatureBundle b = curvature_bundle(state, params);
    const FDerivatives d = f_derivatives(state, b.K);
    const double f2 = state.f2;
    const double P = params.k() * d.fprime / b.f + params.l() * std::sin(state.theta) / f2 -
                     d.fprime * d.fsecond / d.one_plus_fp2;
    double inner = lambda - mode.alpha / (b.f * b.f) - mode.beta / (f2 * f2);
    if (kind == OperatorKind::jacobi) inner += params.n() + b.shape_norm_sq;
    return {P, d.one_plus_fp2 * inner};
}

double MonodromyMatrix::abel_residual_absolute() const {
    if (scale_log2 == 0) return std::abs(wronskianT - abel_prediction);
    // W carries the factor 2^(2 scale); compare in log space.
    if (wronskianT <= 0.0) return std::numeric_limits<double>::infinity();
    const double log_w = std::log(wronskianT) + 2.0 * static_cast<double>(scale_log2) * std::numbers::ln2;
    return std::abs(std::expm1(log_w - log_abel_prediction)) * abel_prediction;
}

double MonodromyMatrix::abel_residual() const {
    if (scale_log2 != 0) return std::numeric_limits<double>::infinity();
    const double cancel = std::abs(z1T * dz2T) + std::abs(z2T * dz1T);
    return abel_residual_absolute() / std::max(1.0, cancel);
}

int MonodromyMatrix::kernel_dimension(double rel_tol) const {
    if (scale_log2 != 0) return 0;
    const double a = z1T - 1.0, b = z2T, c = dz1T, d = dz2T - 1.0;
    const auto singular = [](double p, double q, double r, double s) {
        const double S = p * p + q * q + r * r + s * s;
        const double D = p * s - q * r;
        const double root = std::sqrt(std::max(0.0, S * S - 4.0 * D * D));
        const double smax = std::sqrt(0.5 * (S + root));
        const double smin = smax > 0.0 ? std::abs(D) / smax : 0.0;
        return std::array<double, 2>{smax, smin};
    };
    const double norm_m = singular(z1T, z2T, dz1T, dz2T)[0];
    const auto sv = singular(a, b, c, d);
    const double threshold = rel_tol * norm_m;
    int count = 0;
    for (double s : sv)
        if (s < threshold) ++count;
    return count;
}

Discriminant discriminant(const PeriodicProfile& profile, const ModeIndex& mode, OperatorKind kind,
                          double lambda, const IntegratorConfig& config) {
    if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");
    const OdeSystem sys = extended_system(profile, mode, kind, lambda);
    std::vector<double> y0{0.0, profile.a0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0};
    try {
        Trajectory t = integrate(sys, 0.0, y0, profile.period, config);
        const auto end = t.back_state();
        if (max_abs_z(end) <= kRescaleThreshold) return finish(end, 0);
    } catch (const NonFiniteDerivative&) {
        // overflow of the Floquet pair; retried below with rescaling
    } catch (const StepLimitExceeded&) {
    }
    return chunked_flight(sys, std::move(y0), profile.period, config);
}

DiscriminantCurve sample_discriminant(const PeriodicProfile& profile, const ModeIndex& mode,
                                      OperatorKind kind, double lambda_min, double lambda_max,
                                      double step, const IntegratorConfig& config, int jobs) {
    const std::vector<double> lambdas = grid(lambda_min, lambda_max, step);
    DiscriminantCurve curve{mode, kind, {}};
    curve.samples.resize(lambdas.size());
    parallel_for(lambdas.size(), jobs, [&](std::size_t m) {
        const Discriminant d = discriminant(profile, mode, kind, lambdas[m], config);
        curve.samples[m] = {lambdas[m], d.delta0, d.monodromy};
    });
    return curve;
}

std::vector<EigenRecord> scan_and_refine(const PeriodicProfile& profile, const ModeIndex& mode,
                                         OperatorKind kind, double lambda_min, double lambda_max,
                                         const ScanOptions& options,
                                         const IntegratorConfig& config) {
    const double fine = options.step / 5.0;
    SampleSet set;
    set.lambda = grid(lambda_min, lambda_max, options.step);
    set.delta = evaluate_deltas(profile, mode, kind, set.lambda, config, options.jobs);

    // Continuity sanity: an interval jumping far more than both neighbours
    // is re-sampled at step / 5.
    {
        std::vector<double> extra;
        const auto& L = set.lambda;
        const auto& D = set.delta;
        for (std::size_t m = 1; m + 2 < L.size(); ++m) {
            const double jump = std::abs(D[m + 1] - D[m]);
            const double local = std::max(std::abs(D[m] - D[m - 1]), std::abs(D[m + 2] - D[m + 1]));
            if (jump > 10.0 * local && jump > 1e-9)
                for (int q = 1; q < 5; ++q) extra.push_back(L[m] + (L[m + 1] - L[m]) * q / 5.0);
        }
        if (!extra.empty())
            merge_samples(set, extra, evaluate_deltas(profile, mode, kind, extra, config, options.jobs));
    }

    // Shallow minima of |delta0| without a sign change: re-sample finely.
    std::vector<std::pair<double, double>> touch_windows;
    {
        std::vector<double> extra;
        const auto& L = set.lambda;
        const auto& D = set.delta;
        for (std::size_t m = 1; m + 1 < L.size(); ++m) {
            const double a = std::abs(D[m]);
            if (a >= kTangentialProbe || a <= kExactZero) continue;
            if (a > std::abs(D[m - 1]) || a > std::abs(D[m + 1])) continue;
            if (opposite(D[m - 1], D[m]) || opposite(D[m], D[m + 1])) continue;
            touch_windows.emplace_back(L[m - 1], L[m + 1]);
            for (double x = L[m - 1] + fine; x < L[m + 1] - 1e-12; x += fine)
                if (std::abs(x - L[m]) > 1e-12) extra.push_back(x);
        }
        if (!extra.empty())
            merge_samples(set, extra, evaluate_deltas(profile, mode, kind, extra, config, options.jobs));
    }

    const auto& L = set.lambda;
    const auto& D = set.delta;

    struct Task {
        enum Kind { exact, bisect, golden } kind;
        double a, b;
        double da, db;
    };
    std::vector<Task> tasks;
    for (std::size_t m = 0; m < L.size(); ++m) {
        if (std::abs(D[m]) <= kExactZero) tasks.push_back({Task::exact, L[m], L[m], D[m], D[m]});
        if (m + 1 < L.size() && std::abs(D[m]) > kExactZero && std::abs(D[m + 1]) > kExactZero &&
            opposite(D[m], D[m + 1]))
            tasks.push_back({Task::bisect, L[m], L[m + 1], D[m], D[m + 1]});
    }
    for (const auto& [wa, wb] : touch_windows) {
        // Still touching after re-sampling: locate the minimum of |delta0|.
        std::size_t best = L.size();
        bool crossing = false;
        for (std::size_t m = 0; m < L.size(); ++m) {
            if (L[m] < wa - 1e-12 || L[m] > wb + 1e-12) continue;
            if (m + 1 < L.size() && L[m + 1] <= wb + 1e-12 && opposite(D[m], D[m + 1])) crossing = true;
            if (std::abs(D[m]) <= kExactZero) crossing = true;
            if (best == L.size() || std::abs(D[m]) < std::abs(D[best])) best = m;
        }
        if (crossing || best == L.size() || std::abs(D[best]) >= kTangentialCandidate) continue;
        const double a = best > 0 ? std::max(wa, L[best - 1]) : L[best];
        const double b = best + 1 < L.size() ? std::min(wb, L[best + 1]) : L[best];
        tasks.push_back({Task::golden, a, b, D[best], D[best]});
    }

    std::vector<std::optional<EigenRecord>> found(tasks.size());
    parallel_for(tasks.size(), options.jobs, [&](std::size_t t) {
        const Task& task = tasks[t];
        auto delta_at = [&](double lam) {
            return discriminant(profile, mode, kind, lam, config).delta0;
        };
        try {
            if (task.kind == Task::exact) {
                found[t] = make_record(mode, task.a,
                                       discriminant(profile, mode, kind, task.a, config));
                return;
            }
            if (task.kind == Task::bisect) {
                double a = task.a, b = task.b, da = task.da, db = task.db;
                double root = std::numeric_limits<double>::quiet_NaN();
                while (b - a > options.bisect_width) {
                    const double mid = 0.5 * (a + b);
                    const double dm = delta_at(mid);
                    if (dm == 0.0) {
                        root = mid;
                        break;
                    }
                    if (opposite(da, dm)) {
                        b = mid;
                        db = dm;
                    } else {
                        a = mid;
                        da = dm;
                    }
                }
                if (std::isnan(root)) root = a - da * (b - a) / (db - da);
                found[t] = make_record(mode, root, discriminant(profile, mode, kind, root, config));
                return;
            }
            // Golden-section search for the minimum of |delta0| on [a, b].
            constexpr double invphi = 0.6180339887498949;
            double a = task.a, b = task.b;
            double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
            double f1 = std::abs(delta_at(x1)), f2 = std::abs(delta_at(x2));
            for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - invphi * (b - a);
                    f1 = std::abs(delta_at(x1));
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + invphi * (b - a);
                    f2 = std::abs(delta_at(x2));
                }
            }
            const double xm = f1 < f2 ? x1 : x2;
            const Discriminant d = discriminant(profile, mode, kind, xm, config);
            if (std::abs(d.delta0) < kTangentialAccept) {
                EigenRecord r = make_record(mode, xm, d);
                r.tangential = true;
                found[t] = r;
            }
        } catch (const Error& e) {
            EigenRecord r;
            r.lambda = 0.5 * (task.a + task.b);
            r.mode = mode;
            r.total_multiplicity = 0;
            r.flagged = true;
            r.note = e.what();
            found[t] = r;
        }
    });

    std::vector<EigenRecord> roots;
    for (auto& f : found)
        if (f) roots.push_back(std::move(*f));
    std::stable_sort(roots.begin(), roots.end(),
                     [](const EigenRecord& a, const EigenRecord& b) { return a.lambda < b.lambda; });
    std::vector<EigenRecord> unique;
    for (auto& r : roots) {
        if (!unique.empty() && r.lambda - unique.back().lambda < kDuplicateRoot &&
            r.flagged == unique.back().flagged) {
            if (unique.back().tangential && !r.tangential) unique.back() = r;
            continue;
        }
        unique.push_back(std::move(r));
    }
    return unique;
}

SpectrumOptions default_spectrum_options(OperatorKind kind) {
    SpectrumOptions o;
    if (kind == OperatorKind::jacobi) {
        o.lambda_min = -60.0;
        o.lambda_max = 1.0;
    } else {
        o.lambda_min = 0.0;
        o.lambda_max = 12.0;
    }
    return o;
}

void group_records(SpectrumReport& report, std::vector<EigenRecord> records) {
    std::vector<EigenRecord> counted;
    for (auto& r : records) {
        if (r.flagged)
            report.flagged.push_back(r);
        else
            counted.push_back(r);
    }
    // Fixed total order first (mode, then lambda) so grouping never depends
    // on completion order.
    std::sort(counted.begin(), counted.end(), [](const EigenRecord& a, const EigenRecord& b) {
        if (a.mode.i != b.mode.i) return a.mode.i < b.mode.i;
        if (a.mode.j != b.mode.j) return a.mode.j < b.mode.j;
        return a.lambda < b.lambda;
    });
    std::stable_sort(counted.begin(), counted.end(),
                     [](const EigenRecord& a, const EigenRecord& b) { return a.lambda < b.lambda; });

    report.groups.clear();
    for (auto& r : counted) {
        if (report.groups.empty() || r.lambda - report.groups.back().members.back().lambda >= kGroupTol)
            report.groups.push_back({});
        report.groups.back().members.push_back(r);
    }
    report.stability_index = 0;
    report.nullity = 0;
    for (auto& g : report.groups) {
        std::sort(g.members.begin(), g.members.end(), [](const EigenRecord& a, const EigenRecord& b) {
            if (a.mode.i != b.mode.i) return a.mode.i < b.mode.i;
            if (a.mode.j != b.mode.j) return a.mode.j < b.mode.j;
            return a.lambda < b.lambda;
        });
        double sum = 0.0;
        g.multiplicity = 0;
        for (auto& m : g.members) {
            sum += m.lambda;
            g.multiplicity += m.total_multiplicity;
        }
        g.lambda = sum / static_cast<double>(g.members.size());
        if (report.kind == OperatorKind::jacobi) {
            for (auto& m : g.members) {
                if (m.lambda < -kZeroBand)
                    report.stability_index += m.total_multiplicity;
                else if (std::abs(m.lambda) <= kZeroBand)
                    report.nullity += m.total_multiplicity;
            }
        }
    }
}

SpectrumReport assemble_spectrum(const PeriodicProfile& profile, OperatorKind kind,
                                 const SpectrumOptions& options, const IntegratorConfig& config) {
    SpectrumReport report;
    report.kind = kind;
    report.lambda_min = options.lambda_min;
    report.lambda_max = options.lambda_max;

    std::vector<EigenRecord> records;
    auto dominated = [&](int i, int j) {
        for (const auto& p : report.pruned_frontier)
            if (p.i <= i && p.j <= j) return true;
        return false;
    };

    bool finished = false;
    for (int level = 0; level <= options.max_level; ++level) {
        bool scanned_any = false;
        for (int i = level; i >= 0; --i) {
            const int j = level - i;
            const ModeIndex mode = ModeIndex::make(i, j, profile.params);
            if (dominated(i, j)) {
                report.skipped_modes.push_back(mode);
                continue;
            }
            scanned_any = true;
            ModeOutcome outcome{mode, scan_and_refine(profile, mode, kind, options.lambda_min,
                                                      options.lambda_max, options.scan, config),
                                false};
            const bool any_root = std::any_of(outcome.roots.begin(), outcome.roots.end(),
                                              [](const EigenRecord& r) { return !r.flagged; });
            const bool any_flag = std::any_of(outcome.roots.begin(), outcome.roots.end(),
                                              [](const EigenRecord& r) { return r.flagged; });
            outcome.pruned = !any_root && !any_flag;
            if (outcome.pruned) report.pruned_frontier.push_back(mode);
            records.insert(records.end(), outcome.roots.begin(), outcome.roots.end());
            report.modes.push_back(std::move(outcome));
        }
        if (!scanned_any) {
            finished = true;
            break;
        }
    }
    if (!finished)
        throw NonConvergence("mode enumeration did not terminate below level " +
                             std::to_string(options.max_level));
    group_records(report, std::move(records));
    return report;
}

PruningAudit audit_pruned_mode(const PeriodicProfile& profile, const ModeIndex& mode,
                               OperatorKind kind, double lambda_min, double lambda_max,
                               const ScanOptions& options, const IntegratorConfig& config) {
    PruningAudit audit;
    audit.mode = mode;
    ScanOptions fine = options;
    fine.step = options.step / 5.0;
    audit.roots = scan_and_refine(profile, mode, kind, lambda_min, lambda_max, fine, config);

    constexpr int kWitnesses = 10;
    audit.witness_lambdas.resize(kWitnesses);
    audit.witness_deltas.resize(kWitnesses);
    for (int w = 0; w < kWitnesses; ++w)
        audit.witness_lambdas[static_cast<std::size_t>(w)] =
            lambda_min + (lambda_max - lambda_min) * w / (kWitnesses - 1);
    parallel_for(kWitnesses, options.jobs, [&](std::size_t w) {
        audit.witness_deltas[w] =
            discriminant(profile, mode, kind, audit.witness_lambdas[w], config).delta0;
    });
    audit.min_abs_delta = std::numeric_limits<double>::infinity();
    audit.max_delta = -std::numeric_limits<double>::infinity();
    for (double d : audit.witness_deltas) {
        audit.min_abs_delta = std::min(audit.min_abs_delta, std::abs(d));
        audit.max_delta = std::max(audit.max_delta, d);
    }
    audit.confirmed = audit.roots.empty();
    return audit;
}

double analytic_eigenfunction_residual(const PeriodicProfile& profile,
                                       AnalyticEigenfunction which) {
    const auto& params = profile.params;
    const double n = params.n();
    ModeIndex mode = ModeIndex::make(0, 0, params);
    double lambda = n;
    switch (which) {
        case AnalyticEigenfunction::constant: lambda = 0.0; break;
        case AnalyticEigenfunction::f1_mode00: break;
        case AnalyticEigenfunction::f_mode10: mode = ModeIndex::make(1, 0, params); break;
        case AnalyticEigenfunction::f2_mode01: mode = ModeIndex::make(0, 1, params); break;
    }

    double worst = 0.0;
    const Trajectory& t = profile.half_trajectory;
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
        const ProfileState s = as_state(t.state(idx));
        const auto [P, Q] = coefficients(mode, OperatorKind::laplace, lambda, s, params);
        const double K = theta_prime(s, params);
        const double c = std::cos(s.theta), sn = std::sin(s.theta);
        double z = 1.0, dz = 0.0, ddz = 0.0;
        switch (which) {
            case AnalyticEigenfunction::constant: break;
            case AnalyticEigenfunction::f1_mode00:
                z = s.f1;
                dz = c;
                ddz = -K * sn;
                break;
            case AnalyticEigenfunction::f_mode10: {
                const FDerivatives d = f_derivatives(s, K);
                z = fgh(s).f;
                dz = d.fprime;
                ddz = d.fsecond;
                break;
            }
            case AnalyticEigenfunction::f2_mode01:
                z = s.f2;
                dz = sn;
                ddz = K * c;
                break;
        }
        worst = std::max(worst, std::abs(ddz + P * dz + Q * z));
    }
    return worst;
}

}  // namespace rotmin

#pragma once

// Spectra of the Laplace and Jacobi operators of a rotational minimal
// hypersurface, mode by mode.
//
// Separating variables over S^k x S^l reduces both operators to the family
// of T-periodic problems
//
//     z'' + P(u) z' + Q(u; lambda) z = 0,
//
// one per pair of sphere harmonic levels (i, j). A value lambda is an
// eigenvalue of mode (i, j) iff the monodromy matrix M of the canonical
// solution pair has the eigenvalue 1, i.e. iff
//
//     delta0(lambda) = 1 + det M - tr M = det(M - I) = 0.

#include <cstdint>
#include <string>
#include <vector>

#include "rotmin/geometry.hpp"
#include "rotmin/ivp.hpp"
#include "rotmin/profile.hpp"

namespace rotmin {

enum class OperatorKind { laplace, jacobi };

const char* to_string(OperatorKind kind);

struct SphereEigen {
    double value;
    std::int64_t multiplicity;
};

/// Eigenvalue level * (dim + level - 1) of the Laplacian on the unit
/// dim-sphere and the dimension of its eigenspace.
SphereEigen sphere_eigen(int level, int dim);

/// Harmonic level i on S^k and j on S^l together with their eigenvalues.
struct ModeIndex {
    int i = 0;
    int j = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::int64_t mult_k = 1;
    std::int64_t mult_l = 1;

    static ModeIndex make(int i, int j, const RotationParams& params);
    friend bool operator==(const ModeIndex& a, const ModeIndex& b) {
        return a.i == b.i && a.j == b.j;
    }
};

struct Coefficients {
    double P;
    double Q;
};

/// Normalized coefficients of mode (i, j) at one profile state.
Coefficients coefficients(const ModeIndex& mode, OperatorKind kind, double lambda,
                          const ProfileState& state, const RotationParams& params);

/// Values at u = T of the canonical pair z1 (z1(0) = 1, z1'(0) = 0) and
/// z2 (z2(0) = 0, z2'(0) = 1). When the solutions had to be rescaled to
/// stay finite, the true values are the stored ones times 2^scale_log2.
struct MonodromyMatrix {
    double z1T = 1.0;
    double z2T = 0.0;
    double dz1T = 0.0;
    double dz2T = 1.0;
    double wronskianT = 1.0;       ///< z1T dz2T - z2T dz1T, scaled by 2^(2 scale_log2)
    double abel_prediction = 1.0;  ///< exp(-integral of P over the period)
    double log_abel_prediction = 0.0;
    std::int64_t scale_log2 = 0;

    double trace() const { return z1T + dz2T; }
    /// |W(T) - exp(-int P)|.
    double abel_residual_absolute() const;
    /// |W(T) - exp(-int P)| / max(1, |z1T dz2T| + |z2T dz1T|): the Abel
    /// residual measured against the size of the products W cancels from.
    /// Equals the absolute residual while the Floquet pair stays O(1).
    double abel_residual() const;
    /// Number of singular values of M - I below rel_tol * |M|_2 (0 once
    /// rescaled: such flights are far from any periodic solution).
    int kernel_dimension(double rel_tol = 1e-5) const;
};

struct Discriminant {
    double delta0 = 0.0;  ///< true value divided by 2^monodromy.scale_log2
    MonodromyMatrix monodromy;
};

/// Flies (f1, f2, theta, z1, z1', z2, z2', int P) over one period from
/// (0, a0, 0, 1, 0, 0, 1, 0) and evaluates delta0 = 1 + W(T) - (z1(T) + z2'(T)).
Discriminant discriminant(const PeriodicProfile& profile, const ModeIndex& mode, OperatorKind kind,
                          double lambda, const IntegratorConfig& config = {});

struct DiscriminantSample {
    double lambda;
    double delta0;
    MonodromyMatrix monodromy;
};

/// delta0 sampled on lambda_min + m * step, m = 0, 1, ... up to lambda_max.
struct DiscriminantCurve {
    ModeIndex mode;
    OperatorKind kind = OperatorKind::laplace;
    std::vector<DiscriminantSample> samples;
};

DiscriminantCurve sample_discriminant(const PeriodicProfile& profile, const ModeIndex& mode,
                                      OperatorKind kind, double lambda_min, double lambda_max,
                                      double step, const IntegratorConfig& config = {},
                                      int jobs = 1);

struct EigenRecord {
    double lambda = 0.0;
    ModeIndex mode;
    int kernel_dim = 1;       ///< periodic solutions at this root (1 or 2)
    int ode_multiplicity = 1; ///< equals kernel_dim
    std::int64_t total_multiplicity = 1;  ///< kernel_dim * mult_k * mult_l
    double delta_at_root = 0.0;
    bool tangential = false;  ///< found as a touching zero, not a sign change
    bool flagged = false;     ///< refinement failed; not counted
    std::string note;
};

struct ScanOptions {
    double step = 0.025;
    double bisect_width = 1e-7;
    int jobs = 1;
};

/// Roots of delta0 in [lambda_min, lambda_max] for one mode: sign changes
/// on the grid are bisected; shallow minima of |delta0| are re-sampled at
/// step / 5 and golden-section refined to catch touching (double) roots;
/// adjacent samples that jump far more than their neighbours are re-sampled.
std::vector<EigenRecord> scan_and_refine(const PeriodicProfile& profile, const ModeIndex& mode,
                                         OperatorKind kind, double lambda_min, double lambda_max,
                                         const ScanOptions& options = {},
                                         const IntegratorConfig& config = {});

/// Groups closer than this are one eigenvalue across modes.
inline constexpr double kGroupTol = 1e-3;
/// Band around zero that counts towards the nullity.
inline constexpr double kZeroBand = 1e-4;

struct EigenGroup {
    double lambda = 0.0;  ///< mean of the members
    std::vector<EigenRecord> members;
    std::int64_t multiplicity = 0;
};

struct ModeOutcome {
    ModeIndex mode;
    std::vector<EigenRecord> roots;
    bool pruned = false;  ///< no root in range: dominates all (i' >= i, j' >= j)
};

struct SpectrumOptions {
    double lambda_min = 0.0;
    double lambda_max = 12.0;
    ScanOptions scan{};
    int max_level = 64;  ///< safety bound on i + j
};

struct SpectrumReport {
    OperatorKind kind = OperatorKind::laplace;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::vector<EigenGroup> groups;
    std::vector<EigenRecord> flagged;
    std::vector<ModeOutcome> modes;  ///< every scanned mode, in scan order
    std::vector<ModeIndex> pruned_frontier;
    std::vector<ModeIndex> skipped_modes;
    std::int64_t stability_index = 0;
    std::int64_t nullity = 0;
};

SpectrumOptions default_spectrum_options(OperatorKind kind);

/// Scans modes by increasing i + j, skipping every mode dominated by a mode
/// without roots in range, and groups roots across modes.
SpectrumReport assemble_spectrum(const PeriodicProfile& profile, OperatorKind kind,
                                 const SpectrumOptions& options,
                                 const IntegratorConfig& config = {});

/// Groups records (any order) by kGroupTol; stability index and nullity are
/// filled only for the Jacobi operator.
void group_records(SpectrumReport& report, std::vector<EigenRecord> records);

struct PruningAudit {
    ModeIndex mode;
    std::vector<EigenRecord> roots;  ///< expected empty
    double min_abs_delta = 0.0;
    double max_delta = 0.0;          ///< sign witness: < 0 everywhere means no root
    std::vector<double> witness_lambdas;
    std::vector<double> witness_deltas;
    bool confirmed = false;
};

/// Re-scans a pruned mode on a grid five times finer and samples ten
/// witness points; confirmed when no root is found.
PruningAudit audit_pruned_mode(const PeriodicProfile& profile, const ModeIndex& mode,
                               OperatorKind kind, double lambda_min, double lambda_max,
                               const ScanOptions& options = {},
                               const IntegratorConfig& config = {});

enum class AnalyticEigenfunction { constant, f1_mode00, f_mode10, f2_mode01 };

const char* to_string(AnalyticEigenfunction which);

/// max over the half trajectory of |z'' + P z' + Q z| for a known
/// eigenfunction of the Laplace problem (constant at 0, the others at n).
double analytic_eigenfunction_residual(const PeriodicProfile& profile,
                                       AnalyticEigenfunction which);

}  // namespace rotmin

#pragma once

// Closed-form geometry of a profile curve (f1(u), f2(u)) parametrized by
// arc length with tangent angle theta, and of the hypersurface
//
//     (sqrt(1 - f1^2 - f2^2) y, f2 z, f1),   y in S^k, z in S^l,
//
// inside S^{n+1}, n = k + l + 1. Everything here is pure and allocation free.

namespace rotmin {

/// Dimensions of the two sphere factors. Always construct through the
/// factories, which enforce k >= 1, l >= 1 and n = k + l + 1.
class RotationParams {
public:
    static RotationParams from_kl(int k, int l);
    static RotationParams from_nl(int n, int l);
    static RotationParams from_nk(int n, int k);

    int k() const noexcept { return k_; }
    int l() const noexcept { return l_; }
    int n() const noexcept { return k_ + l_ + 1; }

    /// Radius sqrt(l/n) of the Clifford equilibrium f2 = const, theta = 0.
    double equilibrium_radius() const noexcept;

    friend bool operator==(const RotationParams&, const RotationParams&) = default;

private:
    RotationParams(int k, int l) : k_(k), l_(l) {}
    int k_;
    int l_;
};

/// One point of the profile curve: f1' = cos(theta), f2' = sin(theta).
struct ProfileState {
    double f1 = 0.0;
    double f2 = 0.0;
    double theta = 0.0;
};

/// States closer than this to the unit circle (in f1^2 + f2^2) or to the axis
/// (in f2) are rejected with DomainError.
inline constexpr double kDomainMargin = 1e-12;

struct Fgh {
    double f;  ///< sqrt(1 - f1^2 - f2^2), radius of the S^k factor
    double g;  ///< support function f2 cos(theta) - f1 sin(theta)
    double h;  ///< sqrt(1 - g^2)
};

Fgh fgh(const ProfileState& s);

/// theta' = K, the minimality equation solved for the curvature of the profile.
double theta_prime(const ProfileState& s, const RotationParams& p);

struct CurvatureBundle {
    double f;
    double g;
    double h;
    double xi1;          ///< tangential coordinate f1 cos(theta) + f2 sin(theta)
    double K;            ///< profile curvature theta'
    double kappa1;       ///< -cos(theta) / f2, the S^l directions of the rotated profile
    double lambda0;      ///< principal curvature with multiplicity k
    double lambda_mid;   ///< principal curvature with multiplicity l
    double lambda_last;  ///< principal curvature along the profile
    double shape_norm_sq;
    double nH;           ///< trace of the shape operator
};

CurvatureBundle curvature_bundle(const ProfileState& s, const RotationParams& p);

/// nH for an arbitrary profile curvature K (not necessarily the minimal one).
double mean_curvature_trace(const ProfileState& s, const RotationParams& p, double K);

struct FDerivatives {
    double fprime;        ///< -xi1 / f
    double fsecond;       ///< -((1 - g^2) + g K f^2) / f^3
    double one_plus_fp2;  ///< h^2 / f^2
};

/// Derivatives of f = sqrt(1 - f1^2 - f2^2) along the profile, given theta' = K.
FDerivatives f_derivatives(const ProfileState& s, double K);

}  // namespace rotmin

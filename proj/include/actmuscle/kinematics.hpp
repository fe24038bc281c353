#pragma once

#include <cmath>
#include <string>

#include "actmuscle/errors.hpp"
#include "actmuscle/tensor.hpp"

namespace actmuscle {

/// Perturbation added to the acosh argument of the transverse shear invariant
/// when it falls onto its singular point theta = 1.
inline constexpr double kAcoshRegularization = 1e-9;

/// Deformation gradient together with all derived kinematic quantities.
struct DeformationState {
  Tensor2 F;
  double J = 1.0;
  Tensor2 C;
  Tensor2 Cbar;
  Vec3 m{0.0, 0.0, 1.0};
  Tensor2 M;
  double lambda = 1.0;  // fiber stretch sqrt(C:M)
};

namespace detail {

inline void check_fiber(const Vec3& m) {
  if (!(std::abs(norm(m) - 1.0) <= 1e-12))
    throw InputError("fiber direction must be a unit vector (|m| = " + std::to_string(norm(m)) + ")");
}

inline DeformationState complete_state(const Tensor2& F, const Tensor2& C, double J, const Vec3& m) {
  DeformationState s;
  s.F = F;
  s.J = J;
  s.C = C;
  s.Cbar = std::pow(J, -2.0 / 3.0) * C;
  s.m = m;
  s.M = dyad(m, m);
  s.lambda = std::sqrt(ddot(C, s.M));
  return s;
}

}  // namespace detail

inline DeformationState build_state(const Tensor2& F, const Vec3& m = {0.0, 0.0, 1.0}) {
  if (!is_finite(F)) throw InputError("deformation gradient has non-finite entries");
  const double J = det(F);
  if (!(J > 0.0))
    throw SingularDeformationError("deformation gradient has non-positive determinant " + std::to_string(J));
  detail::check_fiber(m);
  return detail::complete_state(F, sym(transpose(F) * F), J, m);
}

/// State from a right Cauchy-Green tensor; F is taken as the right stretch U = sqrt(C).
/// Every constitutive quantity depends on C only, so this is what the finite
/// difference tangents perturb.
inline DeformationState state_from_cauchy_green(const Tensor2& C, const Vec3& m = {0.0, 0.0, 1.0}) {
  const double detC = det(C);
  if (!(detC > 0.0))
    throw SingularDeformationError("right Cauchy-Green tensor is not positive definite");
  detail::check_fiber(m);
  const Tensor2 Cs = sym(C);
  return detail::complete_state(sqrt_spd(Cs), Cs, std::sqrt(detC), m);
}

struct ModifiedInvariants {
  double I1 = 3.0;
  double I4 = 1.0;
  double I5 = 1.0;
};

inline ModifiedInvariants modified_invariants(const DeformationState& s) {
  return {trace(s.Cbar), ddot(s.Cbar, s.M), ddot(s.Cbar * s.Cbar, s.M)};
}

struct StrainInvariants {
  double B1 = 0.0;  // along-fiber shear
  double B2 = 0.0;  // transverse shear
  double theta = 1.0;  // acosh argument after regularization
};

/// Along-fiber and transverse shear invariants of the isochoric deformation.
inline StrainInvariants strain_invariants(double I1, double I4, double I5) {
  double ratio = I5 / (I4 * I4) - 1.0;
  if (ratio < -1e-6)
    throw DomainError("inconsistent invariants: I5/I4^2 - 1 = " + std::to_string(ratio));
  ratio = std::max(ratio, 0.0);
  double theta = (I1 * I4 - I5) / (2.0 * std::sqrt(I4));
  if (theta < 1.0 - 1e-6)
    throw DomainError("inconsistent invariants: acosh argument " + std::to_string(theta));
  theta = std::max(theta, 1.0 + kAcoshRegularization);
  return {std::sqrt(ratio), std::acosh(theta), theta};
}

inline StrainInvariants strain_invariants(const ModifiedInvariants& inv) {
  return strain_invariants(inv.I1, inv.I4, inv.I5);
}

}  // namespace actmuscle

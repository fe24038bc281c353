#pragma once

// Generalized-invariant muscle models sharing one passive energy:
//   WKM   - activation added to the fiber invariant, explicit Lambert-W level
//   GIANT - multiplicative active strain, implicit level (Newton)
//   COMBI - WKM energy with the level chosen so that the energy is potential

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "actmuscle/activation.hpp"
#include "actmuscle/activation_input.hpp"
#include "actmuscle/errors.hpp"
#include "actmuscle/kinematics.hpp"
#include "actmuscle/special_functions.hpp"
#include "actmuscle/tensor.hpp"

namespace actmuscle {

struct EhretParams {
  double alpha = 2.3796;   // -
  double beta = 0.5161;    // -
  double gamma = 27.1072;  // kPa
  double omega0 = 0.6388;  // -
  double kappa = 1000.0;   // -
  ForceStretchParams fs{1.1806, 0.5680};
  std::optional<TwitchParams> twitch;  // time course from motor-unit twitches
  double P_opt = 64.6809;  // kPa, used when no twitch parameters are given
  double c = 34.4017;      // -
  double t0 = 0.0;         // s

  /// Tetanic peak active nominal stress.
  double peak_active_stress() const { return twitch ? twitch->p_opt() : P_opt; }

  /// P_opt f_t for the activation input, including the scaling factor.
  double active_level(const ActivationInput& act) const {
    if (act.scale == 0.0) return 0.0;
    double v;
    if (act.tetanic) {
      v = peak_active_stress();
    } else if (twitch) {
      v = twitch->p_opt_ft(act.time);
    } else {
      v = P_opt * f_t_tanh(act.time, c, t0);
    }
    return act.scale * v;
  }

  Tensor2 L(const Tensor2& M) const { return (omega0 / 3.0) * Tensor2::identity() + (1.0 - omega0) * M; }

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0.0)) throw InputError(std::string("parameter ") + name + " must be positive");
    };
    pos(alpha, "alpha");
    pos(beta, "beta");
    pos(gamma, "gamma");
    pos(kappa, "kappa");
    pos(c, "c");
    if (!(omega0 >= 0.0 && omega0 <= 1.0)) throw InputError("parameter omega0 must lie in [0, 1]");
    if (!(std::isfinite(P_opt) && P_opt >= 0.0)) throw InputError("parameter P_opt must be non-negative");
    if (!std::isfinite(t0)) throw InputError("parameter t0 must be finite");
    fs.validate();
    if (twitch) twitch->validate();
  }
};

/// Tabulated parameters with the motor-unit twitch time course (three unit types).
inline EhretParams twitch_defaults() {
  EhretParams p;
  p.twitch = TwitchParams{{2.5, 4.4, 76.8}, {0.02, 0.011, 0.011}, {0.004, 0.004, 0.004}, {0.05, 0.29, 0.66}, 0.4619, 0.0};
  return p;
}

struct ActivationResult {
  double omega_a = 0.0;
  double P_act = 0.0;  // kPa
  int iterations = 0;
  double residual = 0.0;
  double domega_dlambda = 0.0;
  double chi = 0.0;  // Lambert-W argument (WKM)
};

// ---------------------------------------------------------------------------
// Passive generalized invariants under incompressible uniaxial fiber loading.

inline double uniaxial_I(double lambda, double omega0) {
  return lambda * lambda * (2.0 * omega0 / 3.0 * (1.0 / (lambda * lambda * lambda) - 1.0) + 1.0);
}
inline double uniaxial_I_prime(double lambda, double omega0) {
  return 2.0 * lambda * (1.0 - omega0 / 3.0 * (1.0 / (lambda * lambda * lambda) + 2.0));
}
inline double uniaxial_J(double lambda, double omega0) {
  return (2.0 * omega0 / 3.0 * (lambda * lambda * lambda - 1.0) + 1.0) / (lambda * lambda);
}
inline double uniaxial_J_prime(double lambda, double omega0) {
  return 2.0 * omega0 / 3.0 - 2.0 * (1.0 - 2.0 * omega0 / 3.0) / (lambda * lambda * lambda);
}

namespace detail {

/// gamma/2 [ e^{a(I-1)} dI/dC + e^{b(J-1)} dJ/dC ] + volumetric part for C
/// with generalized invariants I = C:A, J = cof(C):L.
inline Tensor2 ehret_stress(const Tensor2& C, const Tensor2& A, const Tensor2& L, const EhretParams& p,
                            bool with_volumetric) {
  const double detC = det(C);
  const Tensor2 Ci = inverse(C);
  const double I = ddot(C, A);
  const double Jt = detC * ddot(Ci, L);
  const double eI = std::exp(p.alpha * (I - 1.0));
  const double eJ = std::exp(p.beta * (Jt - 1.0));
  Tensor2 S = eI * A - (eJ * detC) * (Ci * L * Ci) + (Jt * eJ) * Ci;
  if (with_volumetric) S -= std::pow(detC, -p.kappa) * Ci;
  return sym(0.5 * p.gamma * S);
}

inline double ehret_energy(const Tensor2& C, const Tensor2& A, const Tensor2& L, const EhretParams& p) {
  const double I = ddot(C, A);
  const double Jt = ddot(cofactor(C), L);
  return 0.25 * p.gamma * ((std::exp(p.alpha * (I - 1.0)) - 1.0) / p.alpha + (std::exp(p.beta * (Jt - 1.0)) - 1.0) / p.beta);
}

inline double ehret_volumetric_energy(double detC, const EhretParams& p) {
  return 0.25 * p.gamma / p.kappa * (std::pow(detC, -p.kappa) - 1.0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// WKM

inline ActivationResult wkm_activation(double lambda, const ActivationInput& act, const EhretParams& p) {
  ActivationResult r;
  r.P_act = p.active_level(act) * f_xi(lambda, p.fs);
  if (r.P_act == 0.0) return r;
  const double a = p.alpha;
  const double Ip = uniaxial_I(lambda, p.omega0);
  const double Ipd = uniaxial_I_prime(lambda, p.omega0);
  const double h = 0.5 * a * lambda * Ipd;
  r.chi = r.P_act * 2.0 * a * lambda / p.gamma * std::exp(0.5 * a * (2.0 - 2.0 * Ip + lambda * Ipd)) + h * std::exp(h);
  if (r.chi < -1.0 / std::numbers::e - 1e-15)
    throw ActivationSolveError("WKM activation: Lambert-W argument " + std::to_string(r.chi) + " below -1/e");
  const double w = lambert_w0(r.chi);
  r.omega_a = w / (a * lambda * lambda) - Ipd / (2.0 * lambda);
  r.residual = std::abs(w * std::exp(w) - r.chi);
  return r;
}

inline Tensor2 wkm_second_pk(const DeformationState& st, double omega_a, const EhretParams& p) {
  const Tensor2 L = p.L(st.M);
  return detail::ehret_stress(st.C, L + omega_a * st.M, L, p, true);
}

inline double wkm_strain_energy(const DeformationState& st, double omega_a, const EhretParams& p) {
  const Tensor2 L = p.L(st.M);
  return detail::ehret_energy(st.C, L + omega_a * st.M, L, p) + detail::ehret_volumetric_energy(det(st.C), p);
}

// ---------------------------------------------------------------------------
// GIANT

/// Active deformation gradient (1 - w) M + (1 - w)^{-1/2} (I - M); volume preserving.
inline Tensor2 active_deformation_gradient(double omega_a, const Tensor2& M) {
  if (!(omega_a < 1.0)) throw SingularDeformationError("active deformation gradient singular for omega_a >= 1");
  const double eta = 1.0 - omega_a;
  return eta * M + (1.0 / std::sqrt(eta)) * (Tensor2::identity() - M);
}

inline Tensor2 active_deformation_gradient_derivative(double omega_a, const Tensor2& M) {
  const double eta = 1.0 - omega_a;
  return -1.0 * M + (0.5 * std::pow(eta, -1.5)) * (Tensor2::identity() - M);
}

/// Elastic generalized invariants under incompressible uniaxial fiber loading
/// with their partial derivatives.
struct GiantUniaxialInvariants {
  double Ie, Je, dIe_dw, dJe_dw;
};

inline GiantUniaxialInvariants giant_uniaxial_invariants(double lambda, double omega_a, double omega0) {
  const double eta = 1.0 - omega_a;
  const double k = 1.0 - 2.0 * omega0 / 3.0;
  const double l2 = lambda * lambda;
  GiantUniaxialInvariants g;
  g.Ie = 2.0 * omega0 * eta / (3.0 * lambda) + k * l2 / (eta * eta);
  g.Je = 2.0 * omega0 * lambda / (3.0 * eta) + k * eta * eta / l2;
  g.dIe_dw = -2.0 * omega0 / (3.0 * lambda) + 2.0 * k * l2 / (eta * eta * eta);
  g.dJe_dw = 2.0 * omega0 * lambda / (3.0 * eta * eta) - 2.0 * k * eta / l2;
  return g;
}

namespace detail {

inline ActivationResult giant_solve(double lambda, double level, const EhretParams& p) {
  ActivationResult r;
  r.P_act = level * f_xi(lambda, p.fs);
  const double work = level * integral_f_xi(lambda, p.fs);
  if (work == 0.0) return r;
  if (work < 0.0) throw InputError("GIANT activation requires non-negative active stress");
  const double a = p.alpha, b = p.beta;
  auto energy = [&](const GiantUniaxialInvariants& g) {
    return std::exp(a * (g.Ie - 1.0)) / a + std::exp(b * (g.Je - 1.0)) / b;
  };
  const double rhs = energy(giant_uniaxial_invariants(lambda, 0.0, p.omega0)) + 4.0 / p.gamma * work;
  const double log_rhs = std::log(rhs);

  // Safeguarded Newton on log(energy) - log(rhs): negative at 0, unbounded as
  // w -> 1. The log keeps the residual well scaled when the root is close to 1.
  double lo = 0.0, hi = 1.0, w = 0.0, h = -1.0;
  constexpr int kMaxIter = 200;
  int it = 0;
  for (; it < kMaxIter; ++it) {
    const auto inv = giant_uniaxial_invariants(lambda, w, p.omega0);
    const double e = energy(inv);
    h = std::isfinite(e) ? std::log(e) - log_rhs : std::numeric_limits<double>::infinity();
    if (h < 0.0) lo = w; else hi = w;
    if (std::abs(h) <= 1e-15) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double de = std::exp(a * (inv.Ie - 1.0)) * inv.dIe_dw + std::exp(b * (inv.Je - 1.0)) * inv.dJe_dw;
    double next = std::isfinite(h) ? w - h * e / de : 0.5 * (lo + hi);
    if (!(de > 0.0) || !std::isfinite(next) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == w) break;
    w = next;
  }
  r.omega_a = w;
  r.iterations = it + 1;
  r.residual = std::abs(h);  // relative energy mismatch
  const bool bracketed = hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi;
  if (!(r.residual <= 1e-10) && !bracketed)
    throw ActivationSolveError("GIANT activation: Newton did not converge, relative residual " +
                               std::to_string(r.residual));
  if (!(w < 1.0)) throw ActivationSolveError("GIANT activation: unphysical level omega_a >= 1");
  return r;
}

}  // namespace detail

/// Activation level from the implicit uniaxial energy balance; the stretch
/// derivative is taken by central differences with h = 1e-6 lambda.
inline ActivationResult giant_activation(double lambda, const ActivationInput& act, const EhretParams& p) {
  const double level = p.active_level(act);
  ActivationResult r = detail::giant_solve(lambda, level, p);
  if (level != 0.0) {
    const double h = 1e-6 * lambda;
    r.domega_dlambda = (detail::giant_solve(lambda + h, level, p).omega_a - detail::giant_solve(lambda - h, level, p).omega_a) / (2.0 * h);
  }
  return r;
}

/// Second Piola-Kirchhoff stress for a given activation level and its stretch derivative.
inline Tensor2 giant_second_pk(const DeformationState& st, double omega_a, double domega_dlambda, const EhretParams& p) {
  const Tensor2 Fa = active_deformation_gradient(omega_a, st.M);
  const Tensor2 Fai = inverse(Fa);
  const Tensor2 Ce = sym(Fai * st.C * Fai);
  const Tensor2 L = p.L(st.M);
  const Tensor2 Se = detail::ehret_stress(Ce, L, L, p, false);
  const Tensor2 S1 = Fai * Se * Fai;
  Tensor2 S = S1;
  if (domega_dlambda != 0.0) {
    const Tensor2 dFa = active_deformation_gradient_derivative(omega_a, st.M);
    S -= (ddot(S1, st.C * Fai * dFa) * domega_dlambda / st.lambda) * st.M;
  }
  S -= (0.5 * p.gamma * std::pow(det(st.C), -p.kappa)) * inverse(st.C);
  return sym(S);
}

inline Tensor2 giant_second_pk(const DeformationState& st, const ActivationInput& act, const EhretParams& p) {
  const auto a = giant_activation(st.lambda, act, p);
  return giant_second_pk(st, a.omega_a, a.domega_dlambda, p);
}

inline double giant_strain_energy(const DeformationState& st, double omega_a, const EhretParams& p) {
  const Tensor2 Fai = inverse(active_deformation_gradient(omega_a, st.M));
  const Tensor2 Ce = sym(Fai * st.C * Fai);
  const Tensor2 L = p.L(st.M);
  return detail::ehret_energy(Ce, L, L, p) + detail::ehret_volumetric_energy(det(st.C), p);
}

// ---------------------------------------------------------------------------
// COMBI

inline ActivationResult combi_activation(double lambda, const ActivationInput& act, const EhretParams& p) {
  ActivationResult r;
  const double level = p.active_level(act);
  r.P_act = level * f_xi(lambda, p.fs);
  const double integral = integral_f_xi(lambda, p.fs);
  if (level == 0.0 || integral == 0.0) return r;
  const double a = p.alpha;
  const double Ip = uniaxial_I(lambda, p.omega0);
  const double Ipd = uniaxial_I_prime(lambda, p.omega0);
  const double pre = 4.0 * a / p.gamma * std::exp(a * (1.0 - Ip)) * level;
  const double phi = 1.0 + pre * integral;
  if (!(phi >= 1.0)) throw InputError("COMBI activation: negative active stress gives phi < 1");
  const double dphi = pre * (f_xi(lambda, p.fs) - a * Ipd * integral);
  const double lphi = std::log(phi);
  const double l2 = lambda * lambda;
  r.omega_a = lphi / (a * l2);
  r.domega_dlambda = (dphi / phi - 2.0 * lphi / lambda) / (a * l2);
  return r;
}

inline Tensor2 combi_second_pk(const DeformationState& st, double omega_a, double domega_dlambda, const EhretParams& p) {
  Tensor2 S = wkm_second_pk(st, omega_a, p);
  if (domega_dlambda != 0.0) {
    const double I = ddot(st.C, p.L(st.M) + omega_a * st.M);
    S += (0.25 * p.gamma * std::exp(p.alpha * (I - 1.0)) * st.lambda * domega_dlambda) * st.M;
  }
  return S;
}

inline Tensor2 combi_second_pk(const DeformationState& st, const ActivationInput& act, const EhretParams& p) {
  const auto a = combi_activation(st.lambda, act, p);
  return combi_second_pk(st, a.omega_a, a.domega_dlambda, p);
}

}  // namespace actmuscle

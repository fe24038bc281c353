#pragma once

// Active-stress model: transversely isotropic shear invariants, a fiber
// stress with active and passive parts, a logarithmic volumetric term and an
// isotropic Neo-Hooke matrix.

#include <cmath>

#include "actmuscle/activation.hpp"
#include "actmuscle/activation_input.hpp"
#include "actmuscle/errors.hpp"
#include "actmuscle/kinematics.hpp"
#include "actmuscle/tensor.hpp"

namespace actmuscle {

struct BleParams {
  double G1 = 0.1;            // kPa, along-fiber shear
  double G2 = 0.05;           // kPa, cross-fiber shear
  double P1 = 3.6055;         // -
  double P2 = 4.4883;         // -
  double kappa = 1.0e4;       // kPa, bulk modulus
  double sigma_max = 1.145;   // kPa
  double lambda_opt = 1.2264;
  double lambda_star = 1.4;
  double alpha_a = 69.5471;   // -
  double c = 34.4017;         // -
  double mu = 10.0;           // kPa
  double t0 = 0.0;            // s

  PassiveFiberParams passive_fiber() const { return {P1, P2, lambda_star}; }

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0.0)) throw InputError(std::string("BLE parameter ") + name + " must be positive");
    };
    pos(G1, "G1");
    pos(G2, "G2");
    pos(P1, "P1");
    pos(P2, "P2");
    pos(kappa, "kappa");
    pos(sigma_max, "sigma_max");
    pos(lambda_opt, "lambda_opt");
    pos(c, "c");
    if (!(std::isfinite(alpha_a) && alpha_a >= 0.0)) throw InputError("BLE parameter alpha_a must be non-negative");
    if (!(std::isfinite(mu) && mu >= 0.0)) throw InputError("BLE parameter mu must be non-negative");
    if (!(lambda_star > 1.0)) throw InputError("BLE parameter lambda_star must exceed 1");
    if (!std::isfinite(t0)) throw InputError("BLE parameter t0 must be finite");
  }
};

struct FiberStress {
  double active = 0.0;   // kPa
  double passive = 0.0;  // kPa
  double total = 0.0;    // kPa
};

/// Active amplitude alpha_a f_t for the given activation input.
inline double ble_activation_amplitude(const ActivationInput& act, const BleParams& p) {
  if (act.scale == 0.0) return 0.0;
  const double ft = act.tetanic ? 1.0 : f_t_tanh(act.time, p.c, p.t0);
  return act.scale * p.alpha_a * ft;
}

inline FiberStress ble_fiber_stress(double lambda_bar, const ActivationInput& act, const BleParams& p) {
  FiberStress s;
  s.active = p.sigma_max * (lambda_bar / p.lambda_opt) * ble_activation_amplitude(act, p) * f_active(lambda_bar, p.lambda_opt);
  s.passive = p.sigma_max * lambda_bar * f_passive(lambda_bar, p.passive_fiber());
  s.total = s.active + s.passive;
  return s;
}

inline double ble_strain_energy(const DeformationState& st, const ActivationInput& act, const BleParams& p) {
  const auto inv = modified_invariants(st);
  const auto si = strain_invariants(inv);
  const double lb = std::sqrt(inv.I4);
  const double fib = p.sigma_max * (ble_activation_amplitude(act, p) / p.lambda_opt * f_active_integral(lb, p.lambda_opt) +
                                    f_passive_integral(lb, p.passive_fiber()));
  const double lnJ = std::log(st.J);
  return p.G1 * si.B1 * si.B1 + p.G2 * si.B2 * si.B2 + fib + 0.5 * p.kappa * lnJ * lnJ + 0.5 * p.mu * (inv.I1 - 3.0);
}

inline Tensor2 ble_second_pk(const DeformationState& st, const ActivationInput& act, const BleParams& p) {
  const auto inv = modified_invariants(st);
  const auto si = strain_invariants(inv);  // validates the invariants, regularizes theta
  const double I1 = inv.I1, I4 = inv.I4, I5 = inv.I5;
  const double sI4 = std::sqrt(I4);
  const double theta = si.theta;
  const double A1 = (I1 * I4 - I5) / (2.0 * I4);
  const double A2 = std::acosh(theta) / (sI4 * std::sqrt(theta * theta - 1.0));
  const auto fs = ble_fiber_stress(sI4, act, p);

  const double g1 = 2.0 * p.G2 * A2 * I4 + p.mu;
  const double g4a = fs.active / I4;
  const double g4p = -4.0 * p.G1 * I5 / (I4 * I4 * I4) + 2.0 * p.G2 * A2 * (I1 - A1) + fs.passive / I4;
  const double g5 = 2.0 * p.G1 / (I4 * I4) - 2.0 * p.G2 * A2;

  const Tensor2 I = Tensor2::identity();
  const Tensor2 Sf = g1 * I + (g4a + g4p) * st.M + g5 * (st.M * st.Cbar + st.Cbar * st.M);
  const Tensor2 Cinv = inverse(st.C);
  const Tensor2 Siso = std::pow(st.J, -2.0 / 3.0) * (Sf - (ddot(st.C, Sf) / 3.0) * Cinv);
  const Tensor2 Svol = p.kappa * std::log(st.J) * Cinv;
  return sym(Siso + Svol);
}

}  // namespace actmuscle

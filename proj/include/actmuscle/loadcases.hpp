#pragma once

// The six homogeneous experiments (fiber along e3) and their fully
// incompressible nominal-stress responses.

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "actmuscle/material.hpp"

namespace actmuscle {

enum class LoadCase { UTCAF, UTCTF, SAF, PSAF, PSTF, PSTIF };

inline constexpr std::array<LoadCase, 6> kAllLoadCases{LoadCase::UTCAF, LoadCase::UTCTF, LoadCase::SAF,
                                                       LoadCase::PSAF,  LoadCase::PSTF,  LoadCase::PSTIF};

inline std::string_view case_name(LoadCase c) {
  switch (c) {
    case LoadCase::UTCAF: return "UTCAF";
    case LoadCase::UTCTF: return "UTCTF";
    case LoadCase::SAF: return "SAF";
    case LoadCase::PSAF: return "PSAF";
    case LoadCase::PSTF: return "PSTF";
    case LoadCase::PSTIF: return "PSTIF";
  }
  return "?";
}

inline LoadCase parse_case(std::string_view s) {
  for (auto c : kAllLoadCases)
    if (case_name(c) == s) return c;
  throw InputError("unknown load case '" + std::string(s) + "' (expected UTCAF, UTCTF, SAF, PSAF, PSTF or PSTIF)");
}

using Component = std::pair<std::size_t, std::size_t>;

struct LoadCaseSpec {
  LoadCase kind = LoadCase::UTCAF;
  bool active = false;

  bool shear_controlled() const { return kind == LoadCase::SAF; }
  bool active_allowed() const { return kind == LoadCase::UTCAF; }
};

/// Component of P reported as the nominal stress of the experiment (0-based).
inline Component measured_component(LoadCase c) {
  switch (c) {
    case LoadCase::UTCAF:
    case LoadCase::PSAF: return {2, 2};
    case LoadCase::SAF: return {2, 1};
    default: return {0, 0};
  }
}

/// Traction-free normal direction; the incompressibility pressure is
/// eliminated by requiring P_ff = 0. UTCTF holds the fiber direction at the
/// prescribed contraction and lets e2 move freely.
inline std::size_t free_direction(LoadCase c) {
  switch (c) {
    case LoadCase::UTCAF:
    case LoadCase::SAF:
    case LoadCase::PSAF: return 0;
    case LoadCase::UTCTF:
    case LoadCase::PSTIF: return 1;
    case LoadCase::PSTF: return 2;
  }
  return 0;
}

/// Isochoric deformation gradient of the family for stretch (or shear) `v`.
inline Tensor2 deformation_gradient(LoadCase c, double v) {
  if (c != LoadCase::SAF && !(v > 0.0)) throw InputError("stretch must be positive");
  const double s = (c == LoadCase::SAF) ? 0.0 : 1.0 / std::sqrt(v);
  switch (c) {
    case LoadCase::UTCAF: return Tensor2::diag(s, s, v);
    case LoadCase::UTCTF: return Tensor2::diag(v, s, s);
    case LoadCase::SAF: {
      Tensor2 F = Tensor2::identity();
      F(2, 1) = v;
      return F;
    }
    case LoadCase::PSAF: return Tensor2::diag(1.0 / v, 1.0, v);
    case LoadCase::PSTF: return Tensor2::diag(v, 1.0, 1.0 / v);
    case LoadCase::PSTIF: return Tensor2::diag(v, 1.0 / v, 1.0);
  }
  return Tensor2::identity();
}

namespace detail {

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

inline void check_activation(LoadCase c, const ActivationInput& act) {
  if (!act.is_passive() && c != LoadCase::UTCAF)
    throw InputError("activation is only defined for UTCAF; " + std::string(case_name(c)) + " is passive-only");
}

inline double ble_analytical(LoadCase c, const BleParams& p, double v, const ActivationInput& act) {
  const double l = v;
  auto sig = [&](double lb) { return ble_fiber_stress(lb, act, p).total; };
  switch (c) {
    case LoadCase::UTCAF:
      return sig(l) / l + p.mu * (l - 1.0 / (l * l));
    case LoadCase::UTCTF: {
      const double th = 0.5 * (std::pow(l, 1.5) + std::pow(l, -1.5));
      return 4.0 * p.G2 * std::acosh(th) * sgn(l * l * l - 1.0) / l + p.mu * l * (1.0 - 1.0 / (l * l * l));
    }
    case LoadCase::SAF:
      return 2.0 * v * p.G1 + v * p.mu;
    case LoadCase::PSAF:
      return 2.0 * p.G2 * std::log(l) / l + sig(l) / l + p.mu * l * (1.0 - std::pow(l, -4.0));
    case LoadCase::PSTF:
      return 2.0 * p.G2 * std::acosh(0.5 * (1.0 / l + l)) * sgn(l * l - 1.0) / l - sig(1.0 / l) / l +
             p.mu * l * (1.0 - std::pow(l, -4.0));
    case LoadCase::PSTIF:
      return 4.0 * p.G2 * std::acosh(0.5 * (l * l + 1.0 / (l * l))) * sgn(std::pow(l, 4.0) - 1.0) / l +
             p.mu * l * (1.0 - std::pow(l, -4.0));
  }
  return 0.0;
}

/// Passive response shared by the generalized-invariant models.
inline double ehret_passive_analytical(LoadCase c, const EhretParams& p, double v) {
  const double w = p.omega0, g = p.gamma, l = v;
  auto eI = [&](double I) { return std::exp(p.alpha * (I - 1.0)); };
  auto eJ = [&](double J) { return std::exp(p.beta * (J - 1.0)); };
  switch (c) {
    case LoadCase::UTCAF:
      return 0.25 * g * (eI(uniaxial_I(l, w)) * uniaxial_I_prime(l, w) + eJ(uniaxial_J(l, w)) * uniaxial_J_prime(l, w));
    case LoadCase::UTCTF: {
      const double I = (w / 3.0 * (l * l * l - 1.0) + 1.0) / l;
      const double J = l * (w / 3.0 * (1.0 / (l * l * l) - 1.0) + 1.0);
      return g / 6.0 * w * (1.0 - 1.0 / (l * l * l)) * (l * eI(I) + eJ(J));
    }
    case LoadCase::SAF: {
      const double I = w * v * v / 3.0 + 1.0;
      const double J = (1.0 - 2.0 * w / 3.0) * v * v + 1.0;
      return g / 6.0 * v * (w * eI(I) + (3.0 - 2.0 * w) * eJ(J));
    }
    case LoadCase::PSAF: {
      const double l4 = std::pow(l, -4.0);
      const double I = l * l * (w / 3.0 * (l4 + 1.0 / (l * l) - 2.0) + 1.0);
      const double J = (w / 3.0 * (l * l * l * l + l * l - 2.0) + 1.0) / (l * l);
      return -g / 6.0 * l * ((w * (2.0 + l4) - 3.0) * eI(I) - (w * (1.0 + 2.0 * l4) - 3.0 * l4) * eJ(J));
    }
    case LoadCase::PSTF: {
      const double l4 = std::pow(l, -4.0);
      const double I = (w / 3.0 * (l * l * l * l + l * l - 2.0) + 1.0) / (l * l);
      const double J = l * l * (w / 3.0 * (l4 + 1.0 / (l * l) - 2.0) + 1.0);
      return g / 6.0 * l * ((w * (1.0 + 2.0 * l4) - 3.0 * l4) * eI(I) - (w * (2.0 + l4) - 3.0) * eJ(J));
    }
    case LoadCase::PSTIF: {
      // in-plane shear of the cross-section: both invariants coincide
      const double I = w / 3.0 * (l * l + 1.0 / (l * l) - 2.0) + 1.0;
      return g / 6.0 * l * w * (1.0 - std::pow(l, -4.0)) * (eI(I) + eJ(I));
    }
  }
  return 0.0;
}

/// Uniaxial fiber-direction response at a given activation level.
inline double wkm_uniaxial(const EhretParams& p, double l, double omega_a) {
  const double w = p.omega0;
  const double l3 = 1.0 / (l * l * l);
  const double I = l * l * (2.0 / 3.0 * w * (l3 - 1.0) + 1.0 + omega_a);
  const double J = uniaxial_J(l, w);
  return -p.gamma / 6.0 *
         ((w * (2.0 + l3) - 3.0 * (1.0 + omega_a)) * l * std::exp(p.alpha * (I - 1.0)) -
          (w * (1.0 + 2.0 * l3) - 3.0 * l3) * std::exp(p.beta * (J - 1.0)));
}

inline double giant_uniaxial(const EhretParams& p, double l, double omega_a, double domega) {
  const double w = p.omega0, eta = 1.0 - omega_a;
  const double e3 = eta * eta * eta, l3 = l * l * l;
  const auto inv = giant_uniaxial_invariants(l, omega_a, w);
  return -p.gamma / 6.0 *
         ((w * (2.0 + e3 / l3) - 3.0) * l / e3 * std::exp(p.alpha * (inv.Ie - 1.0)) -
          (w * (2.0 + l3 / e3) - 3.0) * eta / l3 * std::exp(p.beta * (inv.Je - 1.0))) *
         (eta + domega * l);
}

}  // namespace detail

/// Fully incompressible nominal stress of the experiment in kPa.
inline double analytical_first_pk(LoadCase c, const Material& m, double v,
                                  const ActivationInput& act = ActivationInput::passive()) {
  detail::check_activation(c, act);
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ble>) {
          return detail::ble_analytical(c, x.p, v, act);
        } else {
          if (c != LoadCase::UTCAF || act.is_passive()) return detail::ehret_passive_analytical(c, x.p, v);
          if constexpr (std::is_same_v<T, Wkm>) {
            return detail::wkm_uniaxial(x.p, v, wkm_activation(v, act, x.p).omega_a);
          } else if constexpr (std::is_same_v<T, Giant>) {
            const auto a = giant_activation(v, act, x.p);
            return detail::giant_uniaxial(x.p, v, a.omega_a, a.domega_dlambda);
          } else {
            const auto a = combi_activation(v, act, x.p);
            const double w = x.p.omega0;
            const double I = v * v * (2.0 / 3.0 * w * (1.0 / (v * v * v) - 1.0) + 1.0 + a.omega_a);
            return detail::wkm_uniaxial(x.p, v, a.omega_a) +
                   0.25 * x.p.gamma * v * v * std::exp(x.p.alpha * (I - 1.0)) * a.domega_dlambda;
          }
        }
      },
      m);
}

inline double analytical_first_pk(const LoadCaseSpec& spec, const Material& m, double v) {
  return analytical_first_pk(spec.kind, m, v, spec.active ? ActivationInput::full() : ActivationInput::passive());
}

/// Incompressible limit of the 3D material stress on the family: the
/// compressible first Piola-Kirchhoff stress at the isochoric F, with a
/// Lagrange pressure q F^{-T} removed so that the free direction carries
/// no traction.
inline double incompressible_first_pk(LoadCase c, const Material& m, double v,
                                      const ActivationInput& act = ActivationInput::passive()) {
  const Tensor2 F = deformation_gradient(c, v);
  const auto st = build_state(F);
  const Tensor2 P = first_pk(m, st, act);
  const Tensor2 FinvT = transpose(inverse(F));
  const std::size_t f = free_direction(c);
  const double q = P(f, f) / FinvT(f, f);
  const auto [i, j] = measured_component(c);
  return P(i, j) - q * FinvT(i, j);
}

/// Fiber stretch at which the tetanically activated uniaxial fiber response
/// vanishes; bisection to 1e-6 on [max(lambda_min, 0.4 lambda_opt) + 1e-3, 1].
inline double stress_free_active_stretch(const Material& m, const ActivationInput& act = ActivationInput::full()) {
  double lo;
  if (const auto* b = std::get_if<Ble>(&m)) {
    lo = 0.4 * b->p.lambda_opt + 1e-3;
  } else {
    const auto& p = ehret_params(m);
    lo = std::max(p.fs.lambda_min, 0.4 * p.fs.lambda_opt) + 1e-3;
  }
  double hi = 1.0;
  auto f = [&](double l) { return analytical_first_pk(LoadCase::UTCAF, m, l, act); };
  double flo = f(lo);
  const double fhi = f(hi);
  if (std::abs(fhi) <= 1e-12) return hi;  // passive: reference state
  if (flo * fhi > 0.0) throw DomainError("stress-free stretch: no sign change on [" + std::to_string(lo) + ", 1]");
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace actmuscle

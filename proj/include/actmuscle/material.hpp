#pragma once

// Model-agnostic front end over the four constitutive models.

#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "actmuscle/ble.hpp"
#include "actmuscle/ehret_family.hpp"

namespace actmuscle {

enum class ModelKind { Ble, Wkm, Giant, Combi };

struct Ble {
  BleParams p;
};
struct Wkm {
  EhretParams p = twitch_defaults();
};
struct Giant {
  EhretParams p = twitch_defaults();
};
struct Combi {
  EhretParams p;
};

using Material = std::variant<Ble, Wkm, Giant, Combi>;

inline std::string_view model_name(ModelKind k) {
  switch (k) {
    case ModelKind::Ble: return "ble";
    case ModelKind::Wkm: return "wkm";
    case ModelKind::Giant: return "giant";
    case ModelKind::Combi: return "combi";
  }
  return "?";
}

inline ModelKind parse_model(std::string_view s) {
  if (s == "ble") return ModelKind::Ble;
  if (s == "wkm") return ModelKind::Wkm;
  if (s == "giant") return ModelKind::Giant;
  if (s == "combi") return ModelKind::Combi;
  throw InputError("unknown model '" + std::string(s) + "' (expected ble, wkm, giant or combi)");
}

inline ModelKind kind_of(const Material& m) { return static_cast<ModelKind>(m.index()); }

/// Material with default (tabulated) parameters.
inline Material make_material(ModelKind k) {
  switch (k) {
    case ModelKind::Ble: return Ble{};
    case ModelKind::Wkm: return Wkm{};
    case ModelKind::Giant: return Giant{};
    case ModelKind::Combi: return Combi{};
  }
  throw InputError("unknown model kind");
}

inline bool is_ehret_family(const Material& m) { return !std::holds_alternative<Ble>(m); }

inline const EhretParams& ehret_params(const Material& m) {
  return std::visit(
      [](const auto& x) -> const EhretParams& {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Ble>)
          throw InputError("BLE has no generalized-invariant parameters");
        else
          return x.p;
      },
      m);
}

inline void validate(const Material& m) {
  std::visit([](const auto& x) { x.p.validate(); }, m);
}

/// Volumetric penalty parameter (kappa for the generalized-invariant models,
/// bulk modulus in kPa for BLE).
inline double kappa_of(const Material& m) {
  return std::visit([](const auto& x) { return x.p.kappa; }, m);
}

inline Material with_kappa(Material m, double kappa) {
  std::visit([&](auto& x) { x.p.kappa = kappa; }, m);
  return m;
}

/// Activation level at fiber stretch lambda. For BLE only P_act (the active
/// fiber stress) is populated.
inline ActivationResult activation(const Material& m, double lambda, const ActivationInput& act) {
  return std::visit(
      [&](const auto& x) -> ActivationResult {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ble>) {
          ActivationResult r;
          r.P_act = ble_fiber_stress(lambda, act, x.p).active;
          return r;
        } else if constexpr (std::is_same_v<T, Wkm>) {
          return wkm_activation(lambda, act, x.p);
        } else if constexpr (std::is_same_v<T, Giant>) {
          return giant_activation(lambda, act, x.p);
        } else {
          return combi_activation(lambda, act, x.p);
        }
      },
      m);
}

inline Tensor2 second_pk(const Material& m, const DeformationState& st, const ActivationInput& act) {
  return std::visit(
      [&](const auto& x) -> Tensor2 {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ble>) {
          return ble_second_pk(st, act, x.p);
        } else if constexpr (std::is_same_v<T, Wkm>) {
          return wkm_second_pk(st, wkm_activation(st.lambda, act, x.p).omega_a, x.p);
        } else if constexpr (std::is_same_v<T, Giant>) {
          return giant_second_pk(st, act, x.p);
        } else {
          return combi_second_pk(st, act, x.p);
        }
      },
      m);
}

/// Strain energy. For WKM the activation level is evaluated at the current
/// stretch and then held fixed, so S is its derivative only at fixed level.
inline double strain_energy(const Material& m, const DeformationState& st, const ActivationInput& act) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ble>) {
          return ble_strain_energy(st, act, x.p);
        } else if constexpr (std::is_same_v<T, Wkm>) {
          return wkm_strain_energy(st, wkm_activation(st.lambda, act, x.p).omega_a, x.p);
        } else if constexpr (std::is_same_v<T, Giant>) {
          return giant_strain_energy(st, detail::giant_solve(st.lambda, x.p.active_level(act), x.p).omega_a, x.p);
        } else {
          return wkm_strain_energy(st, combi_activation(st.lambda, act, x.p).omega_a, x.p);
        }
      },
      m);
}

inline Tensor2 first_pk(const Material& m, const DeformationState& st, const ActivationInput& act) {
  return st.F * second_pk(m, st, act);
}

inline Tensor2 cauchy(const Material& m, const DeformationState& st, const ActivationInput& act) {
  return (st.F * second_pk(m, st, act) * transpose(st.F)) / st.J;
}

/// Material tangent 2 dS/dC by central differences of S in C, step
/// h = 1e-6 max(1, |C|). Off-diagonal perturbations move C_kl and C_lk
/// together; the result carries both minor symmetries.
inline Tensor4 tangent_fd(const Material& m, const DeformationState& st, const ActivationInput& act) {
  const double h = 1e-6 * std::max(1.0, norm(st.C));
  Tensor4 CC;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = k; l < 3; ++l) {
      Tensor2 E;
      E(k, l) = h;
      E(l, k) = h;
      const Tensor2 Sp = second_pk(m, state_from_cauchy_green(st.C + E, st.m), act);
      const Tensor2 Sm = second_pk(m, state_from_cauchy_green(st.C - E, st.m), act);
      // symmetric perturbation of size h in both entries: dS = dS/dC_kl h + dS/dC_lk h
      const double f = (k == l) ? 1.0 / h : 0.5 / h;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          const double d = (Sp(i, j) - Sm(i, j)) * f;  // = 2 dS_ij/dC_kl
          CC(i, j, k, l) = d;
          CC(i, j, l, k) = d;
        }
    }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          const double v = 0.5 * (CC(i, j, k, l) + CC(j, i, k, l));
          CC(i, j, k, l) = v;
          CC(j, i, k, l) = v;
        }
  return CC;
}

}  // namespace actmuscle

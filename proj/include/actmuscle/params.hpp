#pragma once

// Named scalar access to model parameters, used by fitting and file I/O.

#include <string>
#include <string_view>
#include <vector>

#include "actmuscle/material.hpp"

namespace actmuscle {

namespace detail {

template <class Fn>
double& ble_field(BleParams& p, std::string_view n, Fn&& missing) {
  if (n == "G1") return p.G1;
  if (n == "G2") return p.G2;
  if (n == "P1") return p.P1;
  if (n == "P2") return p.P2;
  if (n == "kappa") return p.kappa;
  if (n == "sigma_max") return p.sigma_max;
  if (n == "lambda_opt") return p.lambda_opt;
  if (n == "lambda_star") return p.lambda_star;
  if (n == "alpha_a") return p.alpha_a;
  if (n == "c") return p.c;
  if (n == "mu") return p.mu;
  if (n == "t0") return p.t0;
  return missing();
}

template <class Fn>
double& ehret_field(EhretParams& p, std::string_view n, Fn&& missing) {
  if (n == "alpha") return p.alpha;
  if (n == "beta") return p.beta;
  if (n == "gamma") return p.gamma;
  if (n == "omega0") return p.omega0;
  if (n == "kappa") return p.kappa;
  if (n == "lambda_opt") return p.fs.lambda_opt;
  if (n == "lambda_min") return p.fs.lambda_min;
  if (p.twitch) {
    if (n == "N_a") return p.twitch->N_a;
    if (n == "t0") return p.twitch->t0;
  } else {
    if (n == "P_opt") return p.P_opt;
    if (n == "c") return p.c;
    if (n == "t0") return p.t0;
  }
  return missing();
}

}  // namespace detail

/// Mutable reference to the scalar parameter `name`; throws InputError for unknown names.
inline double& param_ref(Material& m, std::string_view name) {
  auto missing = [&]() -> double& {
    throw InputError("unknown parameter '" + std::string(name) + "' for model " + std::string(model_name(kind_of(m))));
  };
  return std::visit(
      [&](auto& x) -> double& {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Ble>)
          return detail::ble_field(x.p, name, missing);
        else
          return detail::ehret_field(x.p, name, missing);
      },
      m);
}

inline double get_param(const Material& m, std::string_view name) {
  Material copy = m;
  return param_ref(copy, name);
}

inline void set_param(Material& m, std::string_view name, double v) { param_ref(m, name) = v; }

/// Scalar parameter names in canonical order.
inline std::vector<std::string> param_names(const Material& m) {
  if (std::holds_alternative<Ble>(m))
    return {"G1", "G2", "P1", "P2", "kappa", "sigma_max", "lambda_opt", "lambda_star", "alpha_a", "c", "mu", "t0"};
  std::vector<std::string> n{"alpha", "beta", "gamma", "omega0", "kappa", "lambda_opt", "lambda_min"};
  if (ehret_params(m).twitch) {
    n.push_back("N_a");  // the tanh slope c plays no role with a twitch time course
  } else {
    n.push_back("P_opt");
    n.push_back("c");
  }
  n.push_back("t0");
  return n;
}

/// Parameters identified from passive data. BLE's sigma_max is held fixed: it
/// only enters the passive response through the product with P1.
inline std::vector<std::string> passive_param_names(const Material& m) {
  if (std::holds_alternative<Ble>(m)) return {"G1", "G2", "P1", "P2", "mu"};
  return {"alpha", "beta", "gamma", "omega0"};
}

/// Parameters identified from active uniaxial data.
inline std::vector<std::string> active_param_names(const Material& m) {
  if (std::holds_alternative<Ble>(m)) return {"alpha_a", "lambda_opt"};
  return {"lambda_opt", "lambda_min", ehret_params(m).twitch ? "N_a" : "P_opt"};
}

inline std::string param_unit(std::string_view name) {
  if (name == "G1" || name == "G2" || name == "sigma_max" || name == "mu" || name == "gamma" || name == "P_opt")
    return "kPa";
  if (name == "kappa") return "-";  // kPa for BLE, see kappa_unit
  if (name == "t0") return "s";
  if (name == "N_a") return "1/mm";
  return "-";
}

inline std::string param_unit(const Material& m, std::string_view name) {
  if (name == "kappa" && std::holds_alternative<Ble>(m)) return "kPa";
  return param_unit(name);
}

}  // namespace actmuscle

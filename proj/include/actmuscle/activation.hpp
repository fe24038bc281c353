#pragma once

// Scalar force-stretch and force-time relations shared by the muscle models.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "actmuscle/errors.hpp"
#include "actmuscle/special_functions.hpp"

namespace actmuscle {

/// Optimal and minimal active fiber stretch of the Gaussian-type force-stretch curve.
struct ForceStretchParams {
  double lambda_opt = 1.0;
  double lambda_min = 0.5;

  void validate() const {
    if (!(lambda_min > 0.0 && lambda_min < lambda_opt))
      throw InputError("force-stretch relation requires 0 < lambda_min < lambda_opt");
  }
};

/// Normalized active force-stretch relation; 1 at lambda_opt, 0 below lambda_min.
inline double f_xi(double lambda, const ForceStretchParams& p) {
  if (lambda <= p.lambda_min) return 0.0;
  const double d = p.lambda_min - p.lambda_opt;
  return (lambda - p.lambda_min) / (p.lambda_opt - p.lambda_min) *
         std::exp((2.0 * p.lambda_min - lambda - p.lambda_opt) * (lambda - p.lambda_opt) / (2.0 * d * d));
}

/// Derivative of f_xi with respect to the fiber stretch.
inline double f_xi_derivative(double lambda, const ForceStretchParams& p) {
  if (lambda <= p.lambda_min) return 0.0;
  const double d2 = (p.lambda_min - p.lambda_opt) * (p.lambda_min - p.lambda_opt);
  const double g = (lambda - p.lambda_min) / (p.lambda_opt - p.lambda_min);
  const double e = std::exp((2.0 * p.lambda_min - lambda - p.lambda_opt) * (lambda - p.lambda_opt) / (2.0 * d2));
  const double de = (2.0 * p.lambda_min - 2.0 * lambda) / (2.0 * d2);
  return e * (1.0 / (p.lambda_opt - p.lambda_min) + g * de);
}

/// Integral of f_xi from lambda_min to lambda (64-point Gauss-Legendre).
inline double integral_f_xi(double lambda, const ForceStretchParams& p) {
  if (lambda <= p.lambda_min) return 0.0;
  return GaussLegendre<64>::instance().integrate([&](double x) { return f_xi(x, p); }, p.lambda_min, lambda);
}

/// Piecewise parabolic active force-stretch relation of the active-stress model.
/// Vanishes outside [0.4, 1.6] lambda_opt where the parabolas would rise again.
inline double f_active(double lambda_bar, double lambda_opt) {
  const double r = lambda_bar / lambda_opt;
  if (r <= 0.4 || r >= 1.6) return 0.0;
  if (r <= 0.6) return 9.0 * (r - 0.4) * (r - 0.4);
  if (r < 1.4) return 1.0 - 4.0 * (1.0 - r) * (1.0 - r);
  return 9.0 * (r - 1.6) * (r - 1.6);
}

/// Antiderivative of f_active with respect to lambda_bar, zero at 0.4 lambda_opt.
inline double f_active_integral(double lambda_bar, double lambda_opt) {
  // piecewise primitives in r = lambda_bar / lambda_opt, times lambda_opt
  auto low = [](double r) { return 3.0 * std::pow(r - 0.4, 3); };
  auto mid = [](double r) { return r + 4.0 / 3.0 * std::pow(1.0 - r, 3); };
  auto high = [](double r) { return 3.0 * std::pow(r - 1.6, 3); };
  const double r = std::clamp(lambda_bar / lambda_opt, 0.4, 1.6);
  double v;
  if (r <= 0.6) {
    v = low(r);
  } else if (r < 1.4) {
    v = low(0.6) + mid(r) - mid(0.6);
  } else {
    v = low(0.6) + mid(1.4) - mid(0.6) + high(r) - high(1.4);
  }
  return v * lambda_opt;
}

/// Passive fiber relation of the active-stress model: zero in compression,
/// exponential up to lambda_star, linear continuation beyond.
struct PassiveFiberParams {
  double P1 = 1.0;
  double P2 = 1.0;
  double lambda_star = 1.4;

  double P3() const { return P1 * P2 * std::exp(P2 * (lambda_star - 1.0)); }
  double P4() const { return P1 * (std::exp(P2 * (lambda_star - 1.0)) - 1.0) - lambda_star * P3(); }
};

inline double f_passive(double lambda_bar, const PassiveFiberParams& p) {
  if (lambda_bar <= 1.0) return 0.0;
  if (lambda_bar < p.lambda_star) return p.P1 * (std::exp(p.P2 * (lambda_bar - 1.0)) - 1.0);
  return p.P3() * lambda_bar + p.P4();
}

/// Antiderivative of lambda_bar * f_passive(lambda_bar) / lambda_bar = f_passive, zero at 1.
inline double f_passive_integral(double lambda_bar, const PassiveFiberParams& p) {
  if (lambda_bar <= 1.0) return 0.0;
  auto expo = [&](double l) { return p.P1 * (std::exp(p.P2 * (l - 1.0)) / p.P2 - l); };
  if (lambda_bar < p.lambda_star) return expo(lambda_bar) - expo(1.0);
  const double at_star = expo(p.lambda_star) - expo(1.0);
  auto lin = [&](double l) { return 0.5 * p.P3() * l * l + p.P4() * l; };
  return at_star + lin(lambda_bar) - lin(p.lambda_star);
}

/// Smooth time activation tanh(c (t - t0)); zero before the start time.
inline double f_t_tanh(double t, double c, double t0) {
  if (t <= t0) return 0.0;
  return std::tanh(c * (t - t0));
}

/// Motor-unit twitch trains: per-type twitch force F_i, contraction time T_i,
/// interstimulus interval I_i and fraction rho_i, scaled by the number of
/// activated units N_a.
struct TwitchParams {
  std::vector<double> F;    // mN
  std::vector<double> T;    // s
  std::vector<double> I;    // s
  std::vector<double> rho;  // -
  double N_a = 1.0;         // 1/mm
  double t0 = 0.0;          // s

  void validate() const {
    const auto n = F.size();
    if (n == 0 || T.size() != n || I.size() != n || rho.size() != n)
      throw InputError("twitch parameters F, T, I, rho must be non-empty and of equal length");
    for (std::size_t i = 0; i < n; ++i)
      if (!(F[i] > 0.0 && T[i] > 0.0 && I[i] > 0.0 && rho[i] > 0.0))
        throw InputError("twitch parameters must be positive");
    if (!(N_a > 0.0)) throw InputError("N_a must be positive");
    const double sum = std::accumulate(rho.begin(), rho.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) throw InputError("motor unit fractions rho must sum to 1");
  }

  /// Stimulation-rate gain applied to every twitch of unit type i.
  double gain(std::size_t i) const {
    const double r = T[i] / I[i];
    return (1.0 - std::exp(-2.0 * r * r * r)) / r;
  }

  /// Single twitch response F_i (s) e^(1-s), s = tau / T_i; peaks at tau = T_i.
  double single_twitch(std::size_t i, double tau) const {
    if (tau <= 0.0) return 0.0;
    const double s = tau / T[i];
    return F[i] * s * std::exp(1.0 - s);
  }

  /// Superposed, gain-weighted twitch train of unit type i.
  double unit_force(std::size_t i, double t) const {
    double sum = 0.0;
    for (double tj = t0; tj < t; tj += I[i]) sum += single_twitch(i, t - tj);
    return gain(i) * sum;
  }

  /// Time-averaged force of the fused train of unit type i.
  double unit_plateau(std::size_t i) const { return gain(i) * F[i] * std::numbers::e * T[i] / I[i]; }

  /// Tetanic peak active nominal stress N_a sum rho_i plateau_i.
  double p_opt() const {
    double s = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) s += rho[i] * unit_plateau(i);
    return N_a * s;
  }

  /// P_opt f_t at time t.
  double p_opt_ft(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) s += rho[i] * unit_force(i, t);
    return N_a * s;
  }
};

struct TwitchActivation {
  double f_t = 0.0;    // normalized, 1 on the fused plateau
  double p_opt = 0.0;  // kPa
};

inline TwitchActivation f_t_twitch(double t, const TwitchParams& p) {
  const double popt = p.p_opt();
  return {p.p_opt_ft(t) / popt, popt};
}

}  // namespace actmuscle

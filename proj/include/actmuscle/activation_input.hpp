#pragma once

namespace actmuscle {

/// Activation state handed to a material evaluation.
/// `scale` multiplies the peak active stress (P_opt resp. alpha_a); 0 gives the
/// passive response. With `tetanic` set the time function is fixed to 1.
struct ActivationInput {
  double time = 0.0;  // s
  double scale = 1.0;
  bool tetanic = false;

  static constexpr ActivationInput passive() { return {0.0, 0.0, true}; }
  static constexpr ActivationInput full() { return {0.0, 1.0, true}; }
  static constexpr ActivationInput at(double t, double scale = 1.0) { return {t, scale, false}; }

  bool is_passive() const { return scale == 0.0; }
};

}  // namespace actmuscle

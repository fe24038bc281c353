#pragma once

// Fixed-size 3x3 tensor algebra used by the kinematics and constitutive layers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace actmuscle {

using Vec3 = std::array<double, 3>;

/// Dense second-order tensor in a Cartesian basis, row-major storage.
struct Tensor2 {
  std::array<double, 9> a{};

  constexpr double& operator()(std::size_t i, std::size_t j) { return a[3 * i + j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const { return a[3 * i + j]; }

  static constexpr Tensor2 zero() { return {}; }
  static constexpr Tensor2 identity() { return diag(1.0, 1.0, 1.0); }
  static constexpr Tensor2 diag(double d0, double d1, double d2) {
    Tensor2 t;
    t(0, 0) = d0;
    t(1, 1) = d1;
    t(2, 2) = d2;
    return t;
  }

  constexpr Tensor2& operator+=(const Tensor2& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  constexpr Tensor2& operator-=(const Tensor2& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  constexpr Tensor2& operator*=(double s) {
    for (auto& v : a) v *= s;
    return *this;
  }
};

constexpr Tensor2 operator+(Tensor2 x, const Tensor2& y) { return x += y; }
constexpr Tensor2 operator-(Tensor2 x, const Tensor2& y) { return x -= y; }
constexpr Tensor2 operator-(Tensor2 x) { return x *= -1.0; }
constexpr Tensor2 operator*(Tensor2 x, double s) { return x *= s; }
constexpr Tensor2 operator*(double s, Tensor2 x) { return x *= s; }
constexpr Tensor2 operator/(Tensor2 x, double s) { return x *= 1.0 / s; }

constexpr Tensor2 operator*(const Tensor2& x, const Tensor2& y) {
  Tensor2 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

constexpr Vec3 operator*(const Tensor2& x, const Vec3& v) {
  Vec3 r{};
  for (std::size_t i = 0; i < 3; ++i) r[i] = x(i, 0) * v[0] + x(i, 1) * v[1] + x(i, 2) * v[2];
  return r;
}

constexpr Tensor2 transpose(const Tensor2& x) {
  Tensor2 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}

constexpr double trace(const Tensor2& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

constexpr double det(const Tensor2& x) {
  return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
         x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
         x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

/// Cofactor matrix, cof(A) = det(A) A^{-T}; defined for singular A as well.
constexpr Tensor2 cofactor(const Tensor2& x) {
  Tensor2 c;
  c(0, 0) = x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1);
  c(0, 1) = x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2);
  c(0, 2) = x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0);
  c(1, 0) = x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2);
  c(1, 1) = x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0);
  c(1, 2) = x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1);
  c(2, 0) = x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1);
  c(2, 1) = x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2);
  c(2, 2) = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
  return c;
}

/// Inverse via the adjugate. Caller guarantees det(x) != 0.
constexpr Tensor2 inverse(const Tensor2& x) { return transpose(cofactor(x)) / det(x); }

constexpr double ddot(const Tensor2& x, const Tensor2& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < 9; ++k) s += x.a[k] * y.a[k];
  return s;
}

constexpr Tensor2 dyad(const Vec3& u, const Vec3& v) {
  Tensor2 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = u[i] * v[j];
  return r;
}

constexpr Tensor2 sym(const Tensor2& x) { return 0.5 * (x + transpose(x)); }

inline double norm(const Tensor2& x) { return std::sqrt(ddot(x, x)); }

inline double max_abs(const Tensor2& x) {
  double m = 0.0;
  for (double v : x.a) m = std::max(m, std::abs(v));
  return m;
}

inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

inline bool is_finite(const Tensor2& x) {
  return std::all_of(x.a.begin(), x.a.end(), [](double v) { return std::isfinite(v); });
}

/// Fourth-order tensor, index (i,j,k,l) -> 27i + 9j + 3k + l.
struct Tensor4 {
  std::array<double, 81> a{};

  constexpr double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return a[27 * i + 9 * j + 3 * k + l];
  }
  constexpr double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return a[27 * i + 9 * j + 3 * k + l];
  }
};

/// (A : X)_ij = A_ijkl X_kl
constexpr Tensor2 ddot(const Tensor4& A, const Tensor2& x) {
  Tensor2 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) s += A(i, j, k, l) * x(k, l);
      r(i, j) = s;
    }
  return r;
}

struct SymmetricEigen {
  Vec3 values{};
  Tensor2 vectors;  // columns are eigenvectors
};

/// Cyclic Jacobi eigen-decomposition of a symmetric 3x3 tensor.
inline SymmetricEigen eigen_symmetric(Tensor2 s) {
  Tensor2 v = Tensor2::identity();
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
    if (off <= 1e-300 || off <= 1e-34 * ddot(s, s)) break;
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t q = p + 1; q < 3; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < 3; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }
  return {{s(0, 0), s(1, 1), s(2, 2)}, v};
}

/// Principal square root of a symmetric positive definite tensor.
inline Tensor2 sqrt_spd(const Tensor2& s) {
  const auto [values, vectors] = eigen_symmetric(s);
  const Tensor2 d = Tensor2::diag(std::sqrt(values[0]), std::sqrt(values[1]), std::sqrt(values[2]));
  return sym(vectors * d * transpose(vectors));
}

}  // namespace actmuscle

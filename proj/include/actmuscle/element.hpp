#pragma once

// One trilinear hexahedron, total Lagrangian, quasi-static Newton solve under
// prescribed nodal displacements. Used to check the incompressible closed
// forms against the compressible 3D models.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "actmuscle/format.hpp"
#include "actmuscle/loadcases.hpp"

namespace actmuscle {

struct HexElement {
  std::array<Vec3, 8> X{};  // reference nodes, mm
  Material material;
  Vec3 m{0.0, 0.0, 1.0};
  double edge = 1.0;

  /// Axis-aligned cube [0, d]^3, nodes counter-clockwise on z = 0 then z = d.
  static HexElement unit_cube(Material mat, double d = 1.0) {
    HexElement e{{}, std::move(mat), {0.0, 0.0, 1.0}, d};
    for (std::size_t a = 0; a < 8; ++a) e.X[a] = {d * kCorner[a][0], d * kCorner[a][1], d * kCorner[a][2]};
    return e;
  }

  static constexpr std::array<std::array<double, 3>, 8> kCorner{{
      {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};
};

using Displacements = Eigen::Matrix<double, 24, 1>;

namespace detail {

struct GaussPointGeometry {
  std::array<Vec3, 8> dN;  // reference gradients dN_a/dX
  double dV = 0.0;         // weight * det J0
};

inline std::array<GaussPointGeometry, 8> hex_geometry(const HexElement& e) {
  const double g = 1.0 / std::sqrt(3.0);
  std::array<GaussPointGeometry, 8> out;
  for (std::size_t q = 0; q < 8; ++q) {
    const double xi[3] = {(2.0 * HexElement::kCorner[q][0] - 1.0) * g, (2.0 * HexElement::kCorner[q][1] - 1.0) * g,
                          (2.0 * HexElement::kCorner[q][2] - 1.0) * g};
    std::array<Vec3, 8> dxi;
    for (std::size_t a = 0; a < 8; ++a) {
      double s[3];
      for (int k = 0; k < 3; ++k) s[k] = 2.0 * HexElement::kCorner[a][k] - 1.0;
      dxi[a] = {0.125 * s[0] * (1 + s[1] * xi[1]) * (1 + s[2] * xi[2]),
                0.125 * s[1] * (1 + s[0] * xi[0]) * (1 + s[2] * xi[2]),
                0.125 * s[2] * (1 + s[0] * xi[0]) * (1 + s[1] * xi[1])};
    }
    Tensor2 J0;  // dX/dxi
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) J0(i, k) += e.X[a][i] * dxi[a][k];
    const double detJ0 = det(J0);
    if (!(detJ0 > 0.0)) throw InputError("hexahedron has non-positive reference Jacobian");
    const Tensor2 J0inv = inverse(J0);
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t i = 0; i < 3; ++i)
        out[q].dN[a][i] = J0inv(0, i) * dxi[a][0] + J0inv(1, i) * dxi[a][1] + J0inv(2, i) * dxi[a][2];
    out[q].dV = detJ0;  // unit weights for the 2x2x2 rule
  }
  return out;
}

inline Tensor2 gauss_point_F(const GaussPointGeometry& gp, const Displacements& u) {
  Tensor2 F = Tensor2::identity();
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t J = 0; J < 3; ++J) F(i, J) += u(3 * a + i) * gp.dN[a][J];
  return F;
}

}  // namespace detail

struct ElementResponse {
  Eigen::Matrix<double, 24, 1> f_int;
  Eigen::Matrix<double, 24, 24> K;
  Tensor2 P_avg;      // volume-averaged first Piola-Kirchhoff stress
  Tensor2 F_avg;
  double volume = 0;  // current volume
};

/// Internal force (and optionally the consistent tangent) for nodal displacements u.
inline ElementResponse element_response(const HexElement& e, const Displacements& u, const ActivationInput& act,
                                        bool with_tangent) {
  ElementResponse r;
  r.f_int.setZero();
  r.K.setZero();
  const auto geo = detail::hex_geometry(e);
  double V0 = 0.0;
  for (const auto& gp : geo) {
    const Tensor2 F = detail::gauss_point_F(gp, u);
    if (!(det(F) > 0.0)) throw SingularDeformationError("element inversion: non-positive Jacobian at a Gauss point");
    const auto st = build_state(F, e.m);
    const Tensor2 S = second_pk(e.material, st, act);
    const Tensor2 P = F * S;
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t J = 0; J < 3; ++J) s += P(i, J) * gp.dN[a][J];
        r.f_int(3 * a + i) += s * gp.dV;
      }
    r.P_avg += gp.dV * P;
    r.F_avg += gp.dV * F;
    r.volume += gp.dV * st.J;
    V0 += gp.dV;
    if (!with_tangent) continue;

    const Tensor4 CC = tangent_fd(e.material, st, act);
    // A_iJkL = delta_ik S_JL + F_iI CC_IJKL F_kK
    Tensor4 A;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t J = 0; J < 3; ++J)
        for (std::size_t k = 0; k < 3; ++k)
          for (std::size_t L = 0; L < 3; ++L) {
            double s = (i == k) ? S(J, L) : 0.0;
            for (std::size_t I = 0; I < 3; ++I)
              for (std::size_t K = 0; K < 3; ++K) s += F(i, I) * CC(I, J, K, L) * F(k, K);
            A(i, J, k, L) = s;
          }
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t b = 0; b < 8; ++b)
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t k = 0; k < 3; ++k) {
            double s = 0.0;
            for (std::size_t J = 0; J < 3; ++J)
              for (std::size_t L = 0; L < 3; ++L) s += gp.dN[a][J] * A(i, J, k, L) * gp.dN[b][L];
            r.K(3 * a + i, 3 * b + k) += s * gp.dV;
          }
  }
  r.P_avg = r.P_avg / V0;
  r.F_avg = r.F_avg / V0;
  return r;
}

inline Eigen::Matrix<double, 24, 1> internal_force(const HexElement& e, const Displacements& u,
                                                   const ActivationInput& act = ActivationInput::passive()) {
  return element_response(e, u, act, false).f_int;
}

/// Affine nodal displacement field u_a = (F - I) X_a.
inline Displacements affine_displacements(const HexElement& e, const Tensor2& F) {
  Displacements u;
  const Tensor2 H = F - Tensor2::identity();
  for (std::size_t a = 0; a < 8; ++a) {
    const Vec3 d = H * e.X[a];
    for (std::size_t i = 0; i < 3; ++i) u(3 * a + i) = d[i];
  }
  return u;
}

// ---------------------------------------------------------------------------
// Boundary-condition programs

struct DofConstraint {
  int node = 0;
  int dir = 0;
  std::function<double(double)> value;  // prescribed displacement at pseudo-time t in [0, 1]
};

struct BcProgram {
  std::vector<DofConstraint> constraints;
  std::function<double(double)> control;             // stretch or shear at pseudo-time t
  std::function<ActivationInput(double)> activation;  // activation at pseudo-time t
  Component measured{2, 2};
  std::string label;
};

namespace detail {

inline void constrain_face(BcProgram& bc, const HexElement& e, int axis, double coord, int dir,
                           std::function<double(double)> value) {
  for (int a = 0; a < 8; ++a)
    if (std::abs(e.X[static_cast<std::size_t>(a)][static_cast<std::size_t>(axis)] - coord) < 1e-12)
      bc.constraints.push_back({a, dir, value});
}

inline void constrain_all(BcProgram& bc, int dir, std::function<double(double)> value) {
  for (int a = 0; a < 8; ++a) bc.constraints.push_back({a, dir, value});
}

}  // namespace detail

/// Dirichlet program that drives the cube through the load-case family up to
/// `target` (stretch, or shear for SAF). Passive unless `act` is given.
inline BcProgram load_case_program(LoadCase c, const HexElement& e, double target,
                                   ActivationInput act = ActivationInput::passive()) {
  const double d = e.edge;
  BcProgram bc;
  bc.label = std::string(case_name(c));
  bc.measured = measured_component(c);
  bc.activation = [act](double) { return act; };
  const auto zero = [](double) { return 0.0; };
  auto stretch = [target](double t) { return 1.0 + t * (target - 1.0); };
  auto pull = [d, stretch](double t) { return d * (stretch(t) - 1.0); };
  using detail::constrain_all;
  using detail::constrain_face;
  switch (c) {
    case LoadCase::UTCAF:
      constrain_face(bc, e, 2, 0.0, 2, zero);
      constrain_face(bc, e, 2, d, 2, pull);
      constrain_face(bc, e, 0, 0.0, 0, zero);
      constrain_face(bc, e, 1, 0.0, 1, zero);
      break;
    case LoadCase::UTCTF:
      constrain_face(bc, e, 0, 0.0, 0, zero);
      constrain_face(bc, e, 0, d, 0, pull);
      constrain_face(bc, e, 2, 0.0, 2, zero);
      constrain_face(bc, e, 2, d, 2, [d, stretch](double t) { return d * (1.0 / std::sqrt(stretch(t)) - 1.0); });
      constrain_face(bc, e, 1, 0.0, 1, zero);
      break;
    case LoadCase::SAF: {
      bc.control = [target](double t) { return t * target; };
      constrain_face(bc, e, 1, 0.0, 2, zero);
      constrain_face(bc, e, 1, d, 2, [d, target](double t) { return d * t * target; });
      constrain_all(bc, 1, zero);
      constrain_face(bc, e, 0, 0.0, 0, zero);
      break;
    }
    case LoadCase::PSAF:
      constrain_all(bc, 1, zero);
      constrain_face(bc, e, 2, 0.0, 2, zero);
      constrain_face(bc, e, 2, d, 2, pull);
      constrain_face(bc, e, 0, 0.0, 0, zero);
      break;
    case LoadCase::PSTF:
      constrain_all(bc, 1, zero);
      constrain_face(bc, e, 0, 0.0, 0, zero);
      constrain_face(bc, e, 0, d, 0, pull);
      constrain_face(bc, e, 2, 0.0, 2, zero);
      break;
    case LoadCase::PSTIF:
      constrain_all(bc, 2, zero);
      constrain_face(bc, e, 0, 0.0, 0, zero);
      constrain_face(bc, e, 0, d, 0, pull);
      constrain_face(bc, e, 1, 0.0, 1, zero);
      break;
  }
  if (c != LoadCase::SAF) bc.control = stretch;
  return bc;
}

/// Symmetry planes only; the activation scale is ramped from 0 to `scale`
/// with the time function held at 1.
inline BcProgram free_contraction_program(const HexElement& e, double scale = 1.0) {
  BcProgram bc;
  bc.label = "free-contraction";
  const auto zero = [](double) { return 0.0; };
  detail::constrain_face(bc, e, 0, 0.0, 0, zero);
  detail::constrain_face(bc, e, 1, 0.0, 1, zero);
  detail::constrain_face(bc, e, 2, 0.0, 2, zero);
  bc.control = [](double t) { return t; };
  bc.activation = [scale](double t) { return ActivationInput{0.0, t * scale, true}; };
  bc.measured = {2, 2};
  return bc;
}

/// Fiber ends held at the reference length while the activation is ramped.
inline BcProgram isometric_contraction_program(const HexElement& e, double scale = 1.0) {
  BcProgram bc = free_contraction_program(e, scale);
  bc.label = "isometric-contraction";
  detail::constrain_face(bc, e, 2, e.edge, 2, [](double) { return 0.0; });
  return bc;
}

// ---------------------------------------------------------------------------
// Quasi-static solve

struct SolverOptions {
  int steps = 20;
  int max_iterations = 25;
  int max_halvings = 4;
  double tolerance = 1e-8;  // relative to max(1, |f_int|_inf)
  bool eigen_diagnostic = false;
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  double control = 0.0;
  double P_measured = 0.0;
  Tensor2 P_avg;
  Tensor2 F_avg;
  double volume = 1.0;
  double fiber_stretch = 1.0;
  int iterations = 0;
  std::vector<double> residual_history;
};

struct Trajectory {
  double V0 = 1.0;
  std::vector<StepRecord> steps;
  std::vector<Displacements> displacements;
  double eigenvalue_ratio = 0.0;  // |ev_max / ev_min| of the final free-dof tangent (diagnostic)
};

inline Trajectory solve_quasi_static(const HexElement& e, const BcProgram& bc, const SolverOptions& opt = {}) {
  std::array<int, 24> prescribed{};
  prescribed.fill(-1);
  for (std::size_t k = 0; k < bc.constraints.size(); ++k) {
    const auto& c = bc.constraints[k];
    prescribed[static_cast<std::size_t>(3 * c.node + c.dir)] = static_cast<int>(k);
  }
  std::vector<int> free;
  for (int k = 0; k < 24; ++k)
    if (prescribed[static_cast<std::size_t>(k)] < 0) free.push_back(k);
  if (24 - free.size() < 6) throw InputError("boundary program leaves rigid-body modes unconstrained");
  const auto nf = static_cast<Eigen::Index>(free.size());

  Trajectory traj;
  traj.V0 = e.edge * e.edge * e.edge;
  Displacements u = Displacements::Zero();

  auto apply_prescribed = [&](Displacements& v, double t) {
    for (int k = 0; k < 24; ++k) {
      const int c = prescribed[static_cast<std::size_t>(k)];
      if (c >= 0) v(k) = bc.constraints[static_cast<std::size_t>(c)].value(t);
    }
  };

  struct Attempt {
    bool ok = false;
    Displacements u;
    ElementResponse resp;
    int iterations = 0;
    std::vector<double> history;
    double last = 0.0;
  };

  auto newton = [&](const Displacements& start, double t) {
    Attempt at;
    at.u = start;
    const ActivationInput act = bc.activation(t);
    try {
      // linearized predictor: move the prescribed dofs and let the free dofs follow the tangent
      const auto r0 = element_response(e, start, act, true);
      Displacements dp = start;
      apply_prescribed(dp, t);
      dp -= start;
      Eigen::MatrixXd Kff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index i = 0; i < nf; ++i) {
        const auto fi = free[static_cast<std::size_t>(i)];
        rhs(i) = -(r0.f_int(fi) + r0.K.row(fi).dot(dp));
        for (Eigen::Index j = 0; j < nf; ++j) Kff(i, j) = r0.K(fi, free[static_cast<std::size_t>(j)]);
      }
      at.u += dp;
      if (nf > 0) {
        const Eigen::VectorXd du = Kff.fullPivLu().solve(rhs);
        if (du.allFinite())
          for (Eigen::Index k = 0; k < nf; ++k) at.u(free[static_cast<std::size_t>(k)]) += du(k);
      }
    } catch (const NumericalError&) {
      at.u = start;
    }
    apply_prescribed(at.u, t);
    try {
      for (int it = 0; it <= opt.max_iterations; ++it) {
        at.resp = element_response(e, at.u, act, true);
        Eigen::VectorXd r(nf);
        for (Eigen::Index k = 0; k < nf; ++k) r(k) = at.resp.f_int(free[static_cast<std::size_t>(k)]);
        const double rn = nf ? r.cwiseAbs().maxCoeff() : 0.0;
        at.history.push_back(rn);
        at.last = rn;
        if (!std::isfinite(rn)) return at;
        if (rn <= opt.tolerance * std::max(1.0, at.resp.f_int.cwiseAbs().maxCoeff())) {
          at.ok = true;
          at.iterations = it;
          return at;
        }
        if (it == opt.max_iterations) break;
        Eigen::MatrixXd Kff(nf, nf);
        for (Eigen::Index i = 0; i < nf; ++i)
          for (Eigen::Index j = 0; j < nf; ++j)
            Kff(i, j) = at.resp.K(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
        const Eigen::VectorXd du = Kff.fullPivLu().solve(-r);
        if (!du.allFinite()) return at;
        for (Eigen::Index k = 0; k < nf; ++k) at.u(free[static_cast<std::size_t>(k)]) += du(k);
      }
    } catch (const NumericalError&) {
      at.ok = false;
    }
    return at;
  };

  auto record = [&](int step, double t, const Attempt& at) {
    StepRecord s;
    s.step = step;
    s.time = t;
    s.control = bc.control ? bc.control(t) : t;
    s.P_avg = at.resp.P_avg;
    s.F_avg = at.resp.F_avg;
    s.P_measured = at.resp.P_avg(bc.measured.first, bc.measured.second);
    s.volume = at.resp.volume;
    s.fiber_stretch = norm(at.resp.F_avg * e.m);
    s.iterations = at.iterations;
    s.residual_history = at.history;
    traj.steps.push_back(std::move(s));
    traj.displacements.push_back(at.u);
  };

  {
    Attempt a0 = newton(u, 0.0);
    if (!a0.ok) throw NonconvergenceError("Newton failed at the initial state", a0.last);
    u = a0.u;
    record(0, 0.0, a0);
  }

  const double dt0 = 1.0 / opt.steps;
  double t = 0.0;
  int step = 0;
  while (t < 1.0 - 1e-14) {
    double dt = std::min(dt0, 1.0 - t);
    Attempt at;
    int halvings = 0;
    for (;;) {
      at = newton(u, t + dt);
      if (at.ok) break;
      if (halvings == opt.max_halvings)
        throw NonconvergenceError("Newton did not converge at pseudo-time " + std::to_string(t + dt) +
                                      " after " + std::to_string(halvings) + " increment halvings",
                                  at.last);
      dt *= 0.5;
      ++halvings;
    }
    t += dt;
    u = at.u;
    record(++step, t, at);
  }

  if (opt.eigen_diagnostic && nf > 0) {
    const auto resp = element_response(e, u, bc.activation(1.0), true);
    Eigen::MatrixXd Kff(nf, nf);
    for (Eigen::Index i = 0; i < nf; ++i)
      for (Eigen::Index j = 0; j < nf; ++j)
        Kff(i, j) = resp.K(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
    const Eigen::VectorXd ev = Kff.eigenvalues().cwiseAbs();
    traj.eigenvalue_ratio = ev.maxCoeff() / ev.minCoeff();
  }
  return traj;
}

/// Signed relative volume change (V - V0) / V0 per recorded step.
inline std::vector<double> volume_change(const Trajectory& tr) {
  std::vector<double> out;
  out.reserve(tr.steps.size());
  for (const auto& s : tr.steps) out.push_back((s.volume - tr.V0) / tr.V0);
  return out;
}

/// CSV export: step, pseudo-time, control value, measured P component, dV, Newton iterations.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const auto dv = volume_change(tr);
  os << "step,time,control,P_measured_kpa,dV,iterations\n";
  for (std::size_t k = 0; k < tr.steps.size(); ++k) {
    const auto& s = tr.steps[k];
    os << s.step << ',' << format_double(s.time) << ',' << format_double(s.control) << ','
       << format_double(s.P_measured) << ',' << format_double(dv[k]) << ',' << s.iterations << '\n';
  }
}

}  // namespace actmuscle

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "actmuscle/element.hpp"
#include "test_util.hpp"

using namespace actmuscle;

namespace {

HexElement cube(ModelKind k) { return HexElement::unit_cube(make_material(k)); }

Displacements random_displacements(std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  Displacements d;
  for (Eigen::Index k = 0; k < 24; ++k) d(k) = u(rng);
  return d;
}

}  // namespace

TEST(Element, ZeroDisplacementZeroForce) {
  for (auto k : {ModelKind::Ble, ModelKind::Wkm, ModelKind::Giant, ModelKind::Combi}) {
    const auto r = element_response(cube(k), Displacements::Zero(), ActivationInput::passive(), false);
    EXPECT_LT(r.f_int.cwiseAbs().maxCoeff(), 1e-12) << model_name(k);
    EXPECT_NEAR(r.volume, 1.0, 1e-14);
  }
}

TEST(Element, AffinePatch) {
  const auto e = cube(ModelKind::Wkm);
  for (auto c : kAllLoadCases) {
    const Tensor2 F = deformation_gradient(c, c == LoadCase::SAF ? 0.3 : 1.2);
    const Displacements u = affine_displacements(e, F);
    for (const auto& gp : detail::hex_geometry(e)) EXPECT_LT(max_abs(detail::gauss_point_F(gp, u) - F), 1e-14);
    const auto r = element_response(e, u, ActivationInput::passive(), false);
    EXPECT_LT(max_abs(r.F_avg - F), 1e-14);
    EXPECT_NEAR(r.volume, det(F), 1e-13);
  }
}

TEST(Element, ForceBalance) {
  std::mt19937_64 rng(1);
  for (auto k : {ModelKind::Ble, ModelKind::Giant}) {
    const auto e = cube(k);
    const auto r = element_response(e, random_displacements(rng, 0.05), ActivationInput::full(), false);
    for (int i = 0; i < 3; ++i) {
      double s = 0.0, scale = 0.0;
      for (int a = 0; a < 8; ++a) {
        s += r.f_int(3 * a + i);
        scale = std::max(scale, std::abs(r.f_int(3 * a + i)));
      }
      EXPECT_NEAR(s, 0.0, 1e-10 * std::max(1.0, scale));
    }
  }
}

TEST(Element, TangentMatchesDifferences) {
  std::mt19937_64 rng(2);
  for (auto k : {ModelKind::Ble, ModelKind::Wkm, ModelKind::Combi}) {
    const auto e = cube(k);
    const Displacements u = random_displacements(rng, 0.03);
    const auto act = k == ModelKind::Ble ? ActivationInput::passive() : ActivationInput::full();
    const auto r = element_response(e, u, act, true);
    const double h = 1e-7;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < 24; ++j) {
      Displacements up = u, um = u;
      up(j) += h;
      um(j) -= h;
      const Eigen::Matrix<double, 24, 1> col = (internal_force(e, up, act) - internal_force(e, um, act)) / (2 * h);
      worst = std::max(worst, (col - r.K.col(j)).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-4 * r.K.cwiseAbs().maxCoeff()) << model_name(k);
  }
}

TEST(Element, UtcafMatchesAnalytical) {
  const auto e = cube(ModelKind::Wkm);
  const auto tr = solve_quasi_static(e, load_case_program(LoadCase::UTCAF, e, 1.2));
  const double P = tr.steps.back().P_measured;
  const double ref = analytical_first_pk(LoadCase::UTCAF, e.material, 1.2);
  EXPECT_LT(std::abs(P - ref) / std::abs(ref), 0.02);
  // well inside the nearly incompressible regime
  EXPECT_LT(std::abs(volume_change(tr).back()), 0.005);
}

TEST(Element, ReferenceProgramStaysAtRest) {
  const auto e = cube(ModelKind::Combi);
  const auto tr = solve_quasi_static(e, load_case_program(LoadCase::UTCAF, e, 1.0));
  EXPECT_LT(tr.displacements.back().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(tr.steps.back().P_measured, 0.0, 1e-10);
  for (double dv : volume_change(tr)) EXPECT_NEAR(dv, 0.0, 1e-14);
}

TEST(Element, FreeContractionReachesStressFreeStretch) {
  const auto e = cube(ModelKind::Combi);
  const auto tr = solve_quasi_static(e, free_contraction_program(e));
  const double l = tr.steps.back().fiber_stretch;
  EXPECT_NEAR(l, stress_free_active_stretch(e.material), 0.02);
  EXPECT_NEAR(l, 0.71, 0.01);
}

TEST(Element, NewtonConvergesQuadratically) {
  const auto e = cube(ModelKind::Wkm);
  SolverOptions opt;
  opt.steps = 2;
  opt.tolerance = 1e-11;
  const auto tr = solve_quasi_static(e, load_case_program(LoadCase::UTCAF, e, 1.3), opt);
  const auto& h = tr.steps.back().residual_history;
  ASSERT_GE(h.size(), 3u);
  // once in the basin, each residual is bounded by a constant times the square
  // of the previous one; pairs that end at the round-off floor are skipped
  int checked = 0;
  for (std::size_t k = 1; k + 1 < h.size(); ++k) {
    if (h[k] < 1e-1 && h[k + 1] > 1e-10) {
      EXPECT_LT(h[k + 1], 50.0 * h[k] * h[k]) << "iteration " << k;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Element, RigidBodyModesRejected) {
  const auto e = cube(ModelKind::Wkm);
  BcProgram bc;
  bc.activation = [](double) { return ActivationInput::passive(); };
  EXPECT_THROW(solve_quasi_static(e, bc), InputError);
}

#pragma once

// Bound-constrained nonlinear least squares over multi-case stress data and
// the relative error report.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "actmuscle/loadcases.hpp"
#include "actmuscle/params.hpp"

namespace actmuscle {

struct Dataset {
  LoadCaseSpec spec;
  std::vector<double> x;  // stretch or shear
  std::vector<double> y;  // nominal stress, kPa
  double weight = 1.0;
  std::string source;

  void validate() const {
    if (x.size() != y.size()) throw InputError("dataset abscissa and stress counts differ");
    if (x.size() < 3) throw InputError("dataset " + std::string(case_name(spec.kind)) + " needs at least 3 points");
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(x[i] > x[i - 1])) throw InputError("dataset abscissae must be strictly increasing");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InputError("dataset contains non-finite values");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw InputError("dataset weight must be non-negative");
    if (spec.active && !spec.active_allowed()) throw InputError("active data is only supported for UTCAF");
  }
};

enum class FitStage { Passive, Active };

struct FreeParameter {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  double start = 0.0;
};

struct FitOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;  // relative to the initial projected gradient
  double step_tolerance = 1e-10;
  double cost_tolerance = 1e-10;
};

struct FitProblem {
  Material model;  // fixed parameters are taken from here
  std::vector<FreeParameter> free;
  std::vector<Dataset> datasets;
  FitStage stage = FitStage::Passive;
  FitOptions options;

  void validate() const {
    if (free.empty()) throw InputError("fit problem has no free parameters");
    if (datasets.empty()) throw InputError("fit problem has no datasets");
    const auto active_names = active_param_names(model);
    for (const auto& f : free) {
      (void)get_param(model, f.name);
      if (!(f.lower <= f.start && f.start <= f.upper))
        throw InputError("start value of " + f.name + " outside its bounds");
      const bool is_active = std::find(active_names.begin(), active_names.end(), f.name) != active_names.end();
      if (stage == FitStage::Active && !is_active)
        throw InputError("active stage keeps passive parameter " + f.name + " fixed");
      if (stage == FitStage::Passive && is_active)
        throw InputError("passive stage cannot identify active parameter " + f.name);
    }
    for (const auto& d : datasets) {
      d.validate();
      if (stage == FitStage::Active && !(d.spec.active && d.spec.kind == LoadCase::UTCAF))
        throw InputError("active stage uses UTCAF active data only");
      if (stage == FitStage::Passive && d.spec.active) throw InputError("passive stage uses passive data only");
    }
  }
};

struct ErrorMeasures {
  double eps_inf = 0.0;
  double eps_1 = 0.0;
  double eps_2 = 0.0;
};

/// Relative L-inf, L1 and L2 deviations of `x` from the reference `ref`.
inline ErrorMeasures error_measures(const std::vector<double>& x, const std::vector<double>& ref) {
  if (x.size() != ref.size() || x.empty()) throw InputError("error measures need matched, non-empty vectors");
  double ninf = 0, n1 = 0, n2 = 0, dinf = 0, d1 = 0, d2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i] - ref[i]), r = std::abs(ref[i]);
    dinf = std::max(dinf, d);
    d1 += d;
    d2 += d * d;
    ninf = std::max(ninf, r);
    n1 += r;
    n2 += r * r;
  }
  if (ninf == 0.0) throw InputError("error measures undefined for an all-zero reference");
  return {dinf / ninf, d1 / n1, std::sqrt(d2) / std::sqrt(n2)};
}

struct DatasetFit {
  LoadCaseSpec spec;
  std::vector<double> x, data, model;
  ErrorMeasures errors;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<std::string> units;
  Material model;
  std::vector<DatasetFit> datasets;
  std::vector<double> cost_history;  // cost after every accepted iteration, first entry = start
  int iterations = 0;
  bool converged = false;
  std::string reason;

  double cost() const { return cost_history.empty() ? 0.0 : cost_history.back(); }
};

inline Material apply_parameters(const FitProblem& pb, const std::vector<double>& x) {
  Material m = pb.model;
  for (std::size_t k = 0; k < pb.free.size(); ++k) set_param(m, pb.free[k].name, x[k]);
  return m;
}

inline double model_response(const Material& m, const Dataset& d, double x) {
  return analytical_first_pk(d.spec.kind, m, x, d.spec.active ? ActivationInput::full() : ActivationInput::passive());
}

/// Concatenated sqrt(w) (model - data) over all datasets, time functions set to 1.
inline Eigen::VectorXd residuals(const FitProblem& pb, const std::vector<double>& x) {
  const Material m = apply_parameters(pb, x);
  std::size_t n = 0;
  for (const auto& d : pb.datasets) n += d.x.size();
  Eigen::VectorXd r(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (std::size_t di = 0; di < pb.datasets.size(); ++di) {
    const auto& d = pb.datasets[di];
    const double sw = std::sqrt(d.weight);
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      double v;
      try {
        v = model_response(m, d, d.x[i]);
      } catch (const Error& e) {
        throw NumericalError("model evaluation failed in dataset " + std::to_string(di) + " (" +
                             std::string(case_name(d.spec.kind)) + ") at point " + std::to_string(i) + ": " + e.what());
      }
      if (!std::isfinite(v))
        throw NumericalError("non-finite model response in dataset " + std::to_string(di) + " at point " +
                             std::to_string(i));
      r(k++) = sw * (v - d.y[i]);
    }
  }
  return r;
}

inline std::vector<DatasetFit> evaluate_datasets(const Material& m, const std::vector<Dataset>& ds) {
  std::vector<DatasetFit> out;
  for (const auto& d : ds) {
    DatasetFit f;
    f.spec = d.spec;
    f.x = d.x;
    f.data = d.y;
    for (double x : d.x) f.model.push_back(model_response(m, d, x));
    f.errors = error_measures(f.model, f.data);
    out.push_back(std::move(f));
  }
  return out;
}

namespace detail {

inline Eigen::MatrixXd fd_jacobian(const FitProblem& pb, const std::vector<double>& x, const Eigen::VectorXd& r0) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd J(r0.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& f = pb.free[static_cast<std::size_t>(j)];
    double h = 1e-7 * std::max(1.0, std::abs(x[static_cast<std::size_t>(j)]));
    if (x[static_cast<std::size_t>(j)] + h > f.upper) h = -h;  // step back inside the box
    std::vector<double> xp = x;
    xp[static_cast<std::size_t>(j)] += h;
    J.col(j) = (residuals(pb, xp) - r0) / h;
  }
  return J;
}

/// Gradient components that can still decrease the cost inside the box.
inline double projected_gradient_norm(const Eigen::VectorXd& g, const std::vector<double>& x,
                                      const std::vector<FreeParameter>& fp) {
  double m = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double gj = g(static_cast<Eigen::Index>(j));
    const double moved = std::clamp(x[j] - gj, fp[j].lower, fp[j].upper) - x[j];
    m = std::max(m, std::abs(moved));
  }
  return m;
}

}  // namespace detail

/// Levenberg-Marquardt with Marquardt diagonal scaling and projection onto
/// the box bounds; forward-difference Jacobian.
inline FitResult fit(const FitProblem& pb) {
  pb.validate();
  const auto& opt = pb.options;
  const std::size_t n = pb.free.size();
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = pb.free[j].start;

  FitResult res;
  Eigen::VectorXd r = residuals(pb, x);
  double cost = 0.5 * r.squaredNorm();
  res.cost_history.push_back(cost);

  double mu = 1e-3;
  double g0 = -1.0;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const Eigen::MatrixXd J = detail::fd_jacobian(pb, x, r);
    const Eigen::VectorXd g = J.transpose() * r;
    const double pg = detail::projected_gradient_norm(g, x, pb.free);
    if (g0 < 0.0) g0 = pg;
    if (pg <= opt.gradient_tolerance * g0 || pg == 0.0) {
      res.converged = true;
      res.reason = "projected gradient";
      break;
    }
    if (cost <= 1e-30) {
      res.converged = true;
      res.reason = "zero residual";
      break;
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd D = A.diagonal().cwiseMax(1e-30);

    bool accepted = false;
    double step_norm = 0.0;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd M = A;
      M.diagonal() += mu * D;
      const Eigen::VectorXd dx = M.ldlt().solve(-g);
      std::vector<double> xn(n);
      for (std::size_t j = 0; j < n; ++j)
        xn[j] = std::clamp(x[j] + dx(static_cast<Eigen::Index>(j)), pb.free[j].lower, pb.free[j].upper);
      Eigen::VectorXd rn;
      double cn = std::numeric_limits<double>::infinity();
      try {
        rn = residuals(pb, xn);
        cn = 0.5 * rn.squaredNorm();
      } catch (const NumericalError&) {
      }
      if (std::isfinite(cn) && cn < cost) {
        step_norm = 0.0;
        double xnorm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          step_norm = std::max(step_norm, std::abs(xn[j] - x[j]));
          xnorm = std::max(xnorm, std::abs(x[j]));
        }
        const double rel_reduction = (cost - cn) / std::max(cost, 1e-300);
        x = xn;
        r = rn;
        cost = cn;
        res.cost_history.push_back(cost);
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        if (step_norm <= opt.step_tolerance * (xnorm + opt.step_tolerance)) {
          res.converged = true;
          res.reason = "step size";
        } else if (rel_reduction <= opt.cost_tolerance) {
          res.converged = true;
          res.reason = "cost reduction";
        }
        break;
      }
      mu *= 4.0;
    }
    if (res.converged) {
      ++it;
      break;
    }
    if (!accepted) {
      // no descent even with heavy damping: at a (bounded) stationary point up to round-off
      res.converged = true;
      res.reason = "no further descent";
      break;
    }
  }
  if (!res.converged) res.reason = "iteration limit";
  res.iterations = it;
  res.model = apply_parameters(pb, x);
  for (std::size_t j = 0; j < n; ++j) {
    res.names.push_back(pb.free[j].name);
    res.values.push_back(x[j]);
    res.units.push_back(param_unit(pb.model, pb.free[j].name));
  }
  res.datasets = evaluate_datasets(res.model, pb.datasets);
  return res;
}

/// Default box for a named parameter around value v.
inline FreeParameter default_bounds(const Material& m, const std::string& name, double start) {
  FreeParameter f{name, 1e-6, 1e6, start};
  if (name == "lambda_opt") {
    f.lower = 1.0;
    f.upper = 1.5;
  } else if (name == "lambda_min") {
    f.lower = 0.3;
    f.upper = 0.9;
  } else if (name == "omega0") {
    f.lower = 0.0;
    f.upper = 1.0;
  }
  (void)m;
  return f;
}

// ---------------------------------------------------------------------------
// Reporting

inline std::string state_name(const LoadCaseSpec& s) { return s.active ? "active" : "passive"; }

/// Relative error table: one row per load case, one eps_inf/eps_1/eps_2 block per model.
inline void write_error_table(std::ostream& os, const std::vector<std::pair<std::string, const FitResult*>>& fits) {
  std::vector<std::pair<LoadCase, bool>> rows;
  for (const auto& [name, fr] : fits)
    for (const auto& d : fr->datasets) {
      const std::pair<LoadCase, bool> key{d.spec.kind, d.spec.active};
      if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
    }
  std::ostringstream head;
  head << std::left << std::setw(8) << "case" << std::setw(9) << "state";
  for (const auto& [name, fr] : fits) head << "| " << std::setw(32) << (name + "  eps_inf / eps_1 / eps_2");
  os << head.str() << '\n' << std::string(head.str().size(), '-') << '\n';
  os << std::fixed << std::setprecision(4);
  for (const auto& [kind, active] : rows) {
    os << std::left << std::setw(8) << case_name(kind) << std::setw(9) << (active ? "active" : "passive");
    for (const auto& [name, fr] : fits) {
      const DatasetFit* hit = nullptr;
      for (const auto& d : fr->datasets)
        if (d.spec.kind == kind && d.spec.active == active) hit = &d;
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4);
      if (hit)
        cell << hit->errors.eps_inf << " / " << hit->errors.eps_1 << " / " << hit->errors.eps_2;
      else
        cell << "-";
      os << "| " << std::setw(32) << cell.str();
    }
    os << '\n';
  }
  os.unsetf(std::ios::fixed);
}

inline void write_fit_summary(std::ostream& os, const FitResult& fr) {
  os << "converged: " << (fr.converged ? "yes" : "no") << " (" << fr.reason << "), iterations " << fr.iterations
     << ", cost " << std::setprecision(6) << fr.cost() << '\n';
  for (std::size_t j = 0; j < fr.names.size(); ++j)
    os << "  " << std::left << std::setw(12) << fr.names[j] << std::setprecision(8) << fr.values[j] << ' '
       << fr.units[j] << '\n';
}

}  // namespace actmuscle

// actmuscle: evaluation sweeps, fitting, single-element verification and
// activation-curve export for the four muscle material models.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "actmuscle/dataio.hpp"
#include "actmuscle/element.hpp"

namespace {

using namespace actmuscle;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct MaterialArgs {
  std::string model;
  std::string params;
  std::optional<double> kappa;
};

void add_material_flags(CLI::App* sub, MaterialArgs& a) {
  sub->add_option("--model", a.model, "Material model: ble, wkm, giant or combi (tabulated parameters)");
  sub->add_option("--params", a.params, "Parameter file (JSON); overrides the tabulated set")->check(CLI::ExistingFile);
  sub->add_option("--kappa", a.kappa, "Override the volumetric penalty (kPa for ble, dimensionless otherwise)");
}

Material resolve_material(const MaterialArgs& a, std::optional<ModelKind> fallback = std::nullopt) {
  Material m;
  if (!a.params.empty()) {
    m = load_params(a.params).material;
    if (!a.model.empty() && parse_model(a.model) != kind_of(m))
      throw InputError("--model " + a.model + " does not match the model in " + a.params);
  } else if (!a.model.empty()) {
    m = make_material(parse_model(a.model));
  } else if (fallback) {
    m = make_material(*fallback);
  } else {
    throw InputError("--model or --params is required");
  }
  if (a.kappa) {
    if (!(*a.kappa > 0.0) || !std::isfinite(*a.kappa)) throw InputError("--kappa must be positive");
    m = with_kappa(m, *a.kappa);
  }
  validate(m);
  return m;
}

LoadCaseSpec resolve_spec(const std::string& case_name_arg, const std::string& state) {
  if (state != "active" && state != "passive") throw InputError("--state must be active or passive");
  LoadCaseSpec s{parse_case(case_name_arg), state == "active"};
  if (s.active && !s.active_allowed()) throw InputError("--state active is only available for UTCAF");
  return s;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

double relative_deviation(double element, double analytical) {
  return std::abs(element - analytical) / std::max(std::abs(analytical), 1e-6);
}

double element_stress(const Material& m, const LoadCaseSpec& s, double v, int steps) {
  const auto e = HexElement::unit_cube(m);
  SolverOptions opt;
  opt.steps = steps;
  const auto act = s.active ? ActivationInput::full() : ActivationInput::passive();
  return solve_quasi_static(e, load_case_program(s.kind, e, v, act), opt).steps.back().P_measured;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  MaterialArgs mat;
  std::string case_name, state = "passive", grid, out;
  bool with_element = false;
  int steps = 20;
};

int run_sweep(const SweepArgs& a) {
  const Material m = resolve_material(a.mat);
  const auto spec = resolve_spec(a.case_name, a.state);
  const auto grid = a.grid.empty() ? default_grid(spec) : parse_grid(a.grid);
  std::ostringstream os;
  os << "value,P_analytical_kpa" << (a.with_element ? ",P_element_kpa" : "") << '\n';
  for (double v : grid) {
    os << format_double(v) << ',' << format_double(analytical_first_pk(spec, m, v));
    if (a.with_element) os << ',' << format_double(element_stress(m, spec, v, a.steps));
    os << '\n';
  }
  Output out(a.out);
  out.stream() << os.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  MaterialArgs mat;
  std::string config, stage = "passive", out;
  std::vector<std::string> data, free;
  int max_iterations = 500;
};

int run_fit(const FitArgs& a) {
  FitProblem pb;
  if (!a.config.empty()) {
    if (!a.data.empty() || !a.free.empty()) throw InputError("--config cannot be combined with --data or --free");
    pb = load_fit_config(a.config);
  } else {
    if (a.data.empty()) throw InputError("fit needs --config or at least one --data file");
    pb.model = resolve_material(a.mat);
    if (a.stage == "passive") pb.stage = FitStage::Passive;
    else if (a.stage == "active") pb.stage = FitStage::Active;
    else throw InputError("--stage must be passive or active");
    for (const auto& p : a.data)
      for (auto& d : read_datasets(p)) pb.datasets.push_back(std::move(d));
    auto names = a.free;
    if (names.empty())
      names = pb.stage == FitStage::Passive ? passive_param_names(pb.model) : active_param_names(pb.model);
    for (const auto& n : names) pb.free.push_back(default_bounds(pb.model, n, get_param(pb.model, n)));
    pb.options.max_iterations = a.max_iterations;
    pb.validate();
  }
  const FitResult fr = fit(pb);
  write_fit_summary(std::cout, fr);
  std::cout << '\n';
  write_error_table(std::cout, {{std::string(model_name(kind_of(fr.model))), &fr}});
  if (!a.out.empty()) {
    Output out(a.out);
    out.stream() << fit_result_to_json(fr).dump(2) << '\n';
  }
  return fr.converged ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  MaterialArgs mat;
  std::string case_name, state = "passive", out;
  std::optional<double> value;
  bool free_contraction = false, isometric = false;
  int steps = 20;
};

int run_verify(const VerifyArgs& a) {
  const Material m = resolve_material(a.mat);
  const auto e = HexElement::unit_cube(m);
  SolverOptions opt;
  opt.steps = a.steps;
  std::ostream& os = std::cout;
  os << "model: " << model_name(kind_of(m)) << ", kappa " << format_double(kappa_of(m)) << '\n';
  Trajectory tr;
  if (a.free_contraction || a.isometric) {
    if (a.free_contraction && a.isometric) throw InputError("choose one of --free-contraction and --isometric");
    const auto bc = a.free_contraction ? free_contraction_program(e) : isometric_contraction_program(e);
    tr = solve_quasi_static(e, bc, opt);
    const auto& last = tr.steps.back();
    os << "program: " << bc.label << '\n';
    os << "fiber_stretch: " << format_double(last.fiber_stretch) << '\n';
    if (a.free_contraction) os << "stress_free_stretch: " << format_double(stress_free_active_stretch(m)) << '\n';
    os << "P33_kpa: " << format_double(last.P_avg(2, 2)) << '\n';
  } else {
    if (a.case_name.empty() || !a.value) throw InputError("verify-element needs --case and --value");
    const auto spec = resolve_spec(a.case_name, a.state);
    const auto act = spec.active ? ActivationInput::full() : ActivationInput::passive();
    tr = solve_quasi_static(e, load_case_program(spec.kind, e, *a.value, act), opt);
    const double pe = tr.steps.back().P_measured;
    const double pa = analytical_first_pk(spec, m, *a.value);
    os << "case: " << case_name(spec.kind) << ' ' << state_name(spec) << ", value " << format_double(*a.value) << '\n';
    os << "P_analytical_kpa: " << format_double(pa) << '\n';
    os << "P_element_kpa: " << format_double(pe) << '\n';
    os << "relative_deviation: " << format_double(relative_deviation(pe, pa)) << '\n';
  }
  int its = 0;
  for (const auto& s : tr.steps) its += s.iterations;
  os << "dV: " << format_double(volume_change(tr).back()) << '\n';
  os << "newton_iterations: " << its << '\n';
  if (!a.out.empty()) {
    Output out(a.out);
    write_trajectory_csv(out.stream(), tr);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CurveArgs {
  MaterialArgs mat;
  std::string curve = "f_xi", grid, out;
};

int run_curves(const CurveArgs& a) {
  std::function<double(double)> f;
  std::string default_grid_spec = "0.4:1.8:0.01";
  if (a.curve == "f_xi") {
    const auto p = ehret_params(resolve_material(a.mat, ModelKind::Combi)).fs;
    f = [p](double l) { return f_xi(l, p); };
  } else if (a.curve == "f_active") {
    const Material m = resolve_material(a.mat, ModelKind::Ble);
    if (!std::holds_alternative<Ble>(m)) throw InputError("f_active belongs to the ble model");
    const double lo = std::get<Ble>(m).p.lambda_opt;
    f = [lo](double l) { return f_active(l, lo); };
  } else if (a.curve == "f_passive") {
    const Material m = resolve_material(a.mat, ModelKind::Ble);
    if (!std::holds_alternative<Ble>(m)) throw InputError("f_passive belongs to the ble model");
    const auto p = std::get<Ble>(m).p.passive_fiber();
    f = [p](double l) { return f_passive(l, p); };
  } else if (a.curve == "f_t_tanh") {
    const Material m = resolve_material(a.mat, ModelKind::Combi);
    double c, t0;
    if (const auto* b = std::get_if<Ble>(&m)) {
      c = b->p.c;
      t0 = b->p.t0;
    } else {
      c = ehret_params(m).c;
      t0 = ehret_params(m).t0;
    }
    f = [c, t0](double t) { return f_t_tanh(t, c, t0); };
    default_grid_spec = "0:0.2:0.001";
  } else if (a.curve == "f_t_twitch") {
    const Material m = resolve_material(a.mat, ModelKind::Wkm);
    if (!is_ehret_family(m) || !ehret_params(m).twitch) throw InputError("f_t_twitch needs a parameter set with twitch data");
    const auto tw = *ehret_params(m).twitch;
    f = [tw](double t) { return f_t_twitch(t, tw).f_t; };
    default_grid_spec = "0:0.2:0.001";
  } else {
    throw InputError("--curve must be one of f_xi, f_active, f_passive, f_t_tanh, f_t_twitch");
  }
  const auto grid = parse_grid(a.grid.empty() ? default_grid_spec : a.grid);
  std::ostringstream os;
  os << "x," << a.curve << '\n';
  for (double x : grid) os << format_double(x) << ',' << format_double(f(x)) << '\n';
  Output out(a.out);
  out.stream() << os.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct StressFreeArgs {
  MaterialArgs mat;
  std::string out;
};

int run_stress_free(const StressFreeArgs& a) {
  std::vector<Material> ms;
  if (a.mat.model.empty() && a.mat.params.empty()) {
    for (auto k : {ModelKind::Ble, ModelKind::Wkm, ModelKind::Giant, ModelKind::Combi}) {
      MaterialArgs one = a.mat;
      one.model = std::string(model_name(k));
      ms.push_back(resolve_material(one));
    }
  } else {
    ms.push_back(resolve_material(a.mat));
  }
  std::ostringstream os;
  os << "model,stress_free_stretch\n";
  for (const auto& m : ms) os << model_name(kind_of(m)) << ',' << format_double(stress_free_active_stretch(m)) << '\n';
  Output out(a.out);
  out.stream() << os.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SyntheticArgs {
  MaterialArgs mat;
  std::vector<std::string> cases;
  std::string state = "passive", grid, out;
  double noise = 0.0;
  bool relative_noise = false;
  std::uint64_t seed = 42;
};

int run_synthetic(const SyntheticArgs& a) {
  const Material m = resolve_material(a.mat);
  std::vector<LoadCaseSpec> specs;
  if (a.cases.empty()) {
    if (a.state == "active") specs.push_back(resolve_spec("UTCAF", "active"));
    else specs = all_passive_cases();
  } else {
    for (const auto& c : a.cases) specs.push_back(resolve_spec(c, a.state));
  }
  std::vector<std::vector<double>> grids;
  for (const auto& s : specs) grids.push_back(a.grid.empty() ? default_grid(s) : parse_grid(a.grid));
  if (!(a.noise >= 0.0) || !std::isfinite(a.noise)) throw InputError("--noise must be non-negative");
  const auto ds = generate_synthetic(m, specs, grids, SyntheticOptions{a.noise, a.relative_noise, a.seed});
  std::ostringstream os;
  write_datasets(os, ds);
  Output out(a.out);
  out.stream() << os.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active skeletal muscle constitutive models: stress sweeps, fitting and element checks"};
  app.require_subcommand(1, 1);

  SweepArgs sweep;
  auto* s = app.add_subcommand("eval-sweep", "Closed-form nominal stress over a grid (CSV)");
  add_material_flags(s, sweep.mat);
  s->add_option("--case", sweep.case_name, "Load case: UTCAF, UTCTF, SAF, PSAF, PSTF or PSTIF")->required();
  s->add_option("--state", sweep.state, "active or passive (active for UTCAF only)");
  s->add_option("--grid", sweep.grid, "start:stop:step, end points inclusive");
  s->add_flag("--with-element", sweep.with_element, "Add a column from the single-element solve");
  s->add_option("--steps", sweep.steps, "Load steps of the element solve")->check(CLI::PositiveNumber);
  s->add_option("--out", sweep.out, "Output file (stdout when omitted)");

  FitArgs fa;
  auto* f = app.add_subcommand("fit", "Least-squares parameter identification");
  add_material_flags(f, fa.mat);
  f->add_option("--config", fa.config, "Fit configuration (JSON)")->check(CLI::ExistingFile);
  f->add_option("--data", fa.data, "Dataset CSV (case,state,value,stress_kpa); repeatable")->check(CLI::ExistingFile);
  f->add_option("--stage", fa.stage, "passive or active");
  f->add_option("--free", fa.free, "Free parameter name; repeatable (default: all of the stage)");
  f->add_option("--max-iterations", fa.max_iterations, "Iteration limit")->check(CLI::PositiveNumber);
  f->add_option("--out", fa.out, "JSON report");

  VerifyArgs va;
  auto* v = app.add_subcommand("verify-element", "Single hexahedral element against the closed-form stress");
  add_material_flags(v, va.mat);
  v->add_option("--case", va.case_name, "Load case");
  v->add_option("--value", va.value, "Target stretch (shear for SAF)");
  v->add_option("--state", va.state, "active or passive");
  v->add_flag("--free-contraction", va.free_contraction, "Ramp full activation with symmetry supports only");
  v->add_flag("--isometric", va.isometric, "Ramp full activation with the fiber length held");
  v->add_option("--steps", va.steps, "Load steps")->check(CLI::PositiveNumber);
  v->add_option("--out", va.out, "Trajectory CSV");

  CurveArgs ca;
  auto* c = app.add_subcommand("activation-curves", "Force-stretch and time activation functions (CSV)");
  add_material_flags(c, ca.mat);
  c->add_option("--curve", ca.curve, "f_xi, f_active, f_passive, f_t_tanh or f_t_twitch");
  c->add_option("--grid", ca.grid, "start:stop:step (stretch, or time in s)");
  c->add_option("--out", ca.out, "Output file");

  StressFreeArgs sa;
  auto* z = app.add_subcommand("stress-free-stretch", "Fiber stretch at which full activation carries no UTCAF stress");
  add_material_flags(z, sa.mat);
  z->add_option("--out", sa.out, "Output file");

  SyntheticArgs ga;
  auto* g = app.add_subcommand("gen-synthetic", "Synthetic datasets from the closed-form responses (CSV)");
  add_material_flags(g, ga.mat);
  g->add_option("--case", ga.cases, "Load case; repeatable (default: all six passive, or UTCAF when active)");
  g->add_option("--state", ga.state, "active or passive");
  g->add_option("--grid", ga.grid, "start:stop:step used for every case");
  g->add_option("--noise", ga.noise, "Standard deviation of the additive Gaussian noise (kPa)");
  g->add_flag("--relative-noise", ga.relative_noise, "Read --noise as a fraction of max |P| per dataset");
  g->add_option("--seed", ga.seed, "Random seed");
  g->add_option("--out", ga.out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*s) return run_sweep(sweep);
    if (*f) return run_fit(fa);
    if (*v) return run_verify(va);
    if (*c) return run_curves(ca);
    if (*z) return run_stress_free(sa);
    if (*g) return run_synthetic(ga);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

#pragma once

// Parameter files (JSON), stress datasets (CSV), synthetic data and grids.

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <algorithm>
#include <filesystem>
#include <optional>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "actmuscle/fitting.hpp"
#include "actmuscle/format.hpp"
#include "actmuscle/params.hpp"

namespace actmuscle {

struct ParamFile {
  Material material;
  std::string note;
};

namespace detail {

inline const std::vector<std::string>& twitch_array_names() {
  static const std::vector<std::string> n{"F", "T", "I", "rho"};
  return n;
}

inline std::string twitch_array_unit(const std::string& n) {
  if (n == "F") return "mN";
  if (n == "rho") return "-";
  return "s";
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double finite_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw InputError("parameter '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError("parameter '" + key + "' is not finite");
  return d;
}

}  // namespace detail

inline ParamFile params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("parameter file must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (k != "model" && k != "params" && k != "units" && k != "note")
      throw InputError("unknown top-level key '" + k + "' in parameter file");
  if (!j.contains("model") || !j["model"].is_string()) throw InputError("parameter file lacks 'model'");
  if (!j.contains("params") || !j["params"].is_object()) throw InputError("parameter file lacks 'params'");
  const auto kind = parse_model(j["model"].get<std::string>());
  const auto& params = j["params"];
  const nlohmann::json units = j.value("units", nlohmann::json::object());
  if (!units.is_object()) throw InputError("'units' must be an object");

  Material m = make_material(kind);
  const bool twitch = kind != ModelKind::Ble && params.contains("N_a");
  if (twitch) std::visit([](auto& x) {
      if constexpr (!std::is_same_v<std::decay_t<decltype(x)>, Ble>) x.p.twitch = TwitchParams{};
    }, m);

  std::set<std::string> expected;
  for (const auto& n : param_names(m)) expected.insert(n);
  if (twitch)
    for (const auto& n : detail::twitch_array_names()) expected.insert(n);

  for (const auto& [k, v] : params.items())
    if (!expected.count(k)) throw InputError("unknown parameter '" + k + "' for model " + std::string(model_name(kind)));
  for (const auto& [k, v] : units.items())
    if (!expected.count(k)) throw InputError("unit given for unknown parameter '" + k + "'");

  for (const auto& n : expected) {
    if (!params.contains(n)) throw InputError("missing parameter '" + n + "'");
    const bool is_array = twitch && (n == "F" || n == "T" || n == "I" || n == "rho");
    const std::string unit = is_array ? detail::twitch_array_unit(n) : param_unit(m, n);
    if (units.contains(n) && (!units[n].is_string() || units[n].get<std::string>() != unit))
      throw InputError("parameter '" + n + "' must be given in " + unit);
    if (is_array) {
      if (!params[n].is_array()) throw InputError("parameter '" + n + "' must be an array");
      std::vector<double> vals;
      for (const auto& e : params[n]) vals.push_back(detail::finite_number(e, n));
      auto& tw = std::visit(
          [](auto& x) -> std::optional<TwitchParams>& {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Ble>) throw InputError("BLE has no twitch data");
            else return x.p.twitch;
          },
          m);
      if (n == "F") tw->F = vals;
      if (n == "T") tw->T = vals;
      if (n == "I") tw->I = vals;
      if (n == "rho") tw->rho = vals;
    } else {
      set_param(m, n, detail::finite_number(params[n], n));
    }
  }
  validate(m);
  ParamFile pf{m, ""};
  if (j.contains("note")) {
    if (!j["note"].is_string()) throw InputError("'note' must be a string");
    pf.note = j["note"].get<std::string>();
  }
  return pf;
}

inline nlohmann::json params_to_json(const ParamFile& pf) {
  nlohmann::json j;
  const Material& m = pf.material;
  j["model"] = std::string(model_name(kind_of(m)));
  nlohmann::json params = nlohmann::json::object(), units = nlohmann::json::object();
  for (const auto& n : param_names(m)) {
    params[n] = get_param(m, n);
    units[n] = param_unit(m, n);
  }
  if (is_ehret_family(m) && ehret_params(m).twitch) {
    const auto& tw = *ehret_params(m).twitch;
    params["F"] = tw.F;
    params["T"] = tw.T;
    params["I"] = tw.I;
    params["rho"] = tw.rho;
    for (const auto& n : detail::twitch_array_names()) units[n] = detail::twitch_array_unit(n);
  }
  j["params"] = params;
  j["units"] = units;
  j["note"] = pf.note;
  return j;
}

inline ParamFile load_params(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
  try {
    return params_from_json(j);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline void save_params(const std::filesystem::path& path, const ParamFile& pf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << params_to_json(pf).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// CSV datasets: case,state,value,stress_kpa

inline constexpr const char* kDatasetHeader = "case,state,value,stress_kpa";

inline std::vector<Dataset> read_datasets(std::istream& in, const std::string& source = "") {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetHeader) throw InputError(std::string("dataset header must be '") + kDatasetHeader + "'");
  std::vector<Dataset> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 4) throw InputError("line " + std::to_string(lineno) + ": expected 4 fields");
    LoadCaseSpec spec{parse_case(f[0]), false};
    if (f[1] == "active") spec.active = true;
    else if (f[1] != "passive") throw InputError("line " + std::to_string(lineno) + ": state must be active or passive");
    const double x = parse_double(f[2], "value on line " + std::to_string(lineno));
    const double y = parse_double(f[3], "stress on line " + std::to_string(lineno));
    auto it = std::find_if(out.begin(), out.end(), [&](const Dataset& d) {
      return d.spec.kind == spec.kind && d.spec.active == spec.active;
    });
    if (it == out.end()) {
      out.push_back(Dataset{spec, {}, {}, 1.0, source});
      it = out.end() - 1;
    }
    it->x.push_back(x);
    it->y.push_back(y);
  }
  return out;
}

inline std::vector<Dataset> read_datasets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return read_datasets(in, path.filename().string());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline void write_datasets(std::ostream& os, const std::vector<Dataset>& ds) {
  os << kDatasetHeader << '\n';
  for (const auto& d : ds)
    for (std::size_t i = 0; i < d.x.size(); ++i)
      os << case_name(d.spec.kind) << ',' << state_name(d.spec) << ',' << format_double(d.x[i]) << ','
         << format_double(d.y[i]) << '\n';
}

inline void write_datasets(const std::filesystem::path& path, const std::vector<Dataset>& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_datasets(out, ds);
}

// ---------------------------------------------------------------------------
// Grids and synthetic data

/// Inclusive grid "start:stop:step"; the end point is kept when it lies within 1e-12.
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> f;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ':')) f.push_back(cell);
  if (f.size() != 3) throw InputError("grid must have the form start:stop:step, got '" + spec + "'");
  const double a = parse_double(f[0], "grid start"), b = parse_double(f[1], "grid stop"),
               s = parse_double(f[2], "grid step");
  if (!(s > 0.0) || !(b >= a)) throw InputError("grid needs step > 0 and stop >= start");
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((b - a) / s + 1e-12));
  if (n > 1000000) throw InputError("grid too large");
  for (long k = 0; k <= n; ++k) {
    // strip the accumulated representation error, e.g. 0.66 + 2 * 0.02
    char buf[32];
    const double v = a + static_cast<double>(k) * s;
    const auto end = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12).ptr;
    double r = v;
    std::from_chars(buf, end, r);
    g.push_back(r);
  }
  if (std::abs(g.back() - b) <= 1e-12) g.back() = b;
  return g;
}

/// Grid used for a load case when none is given.
inline std::vector<double> default_grid(const LoadCaseSpec& s) {
  if (s.kind == LoadCase::SAF) return parse_grid("0:0.4:0.05");
  if (s.active) return parse_grid("0.6:1.5:0.05");
  return parse_grid("0.7:1.3:0.05");
}

struct SyntheticOptions {
  double noise = 0.0;     // standard deviation of the additive Gaussian noise
  bool relative = false;  // noise given as a fraction of max |P| of each dataset
  std::uint64_t seed = 42;
};

/// Stresses from the closed-form responses plus optional Gaussian noise (fixed seed).
inline std::vector<Dataset> generate_synthetic(const Material& m, const std::vector<LoadCaseSpec>& specs,
                                               const std::vector<std::vector<double>>& grids,
                                               const SyntheticOptions& opt = {}) {
  if (grids.size() != specs.size()) throw InputError("one grid per load case required");
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Dataset> out;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    Dataset d{specs[k], grids[k], {}, 1.0, "synthetic"};
    double pmax = 0.0;
    for (double x : d.x) {
      d.y.push_back(model_response(m, d, x));
      pmax = std::max(pmax, std::abs(d.y.back()));
    }
    const double sd = opt.relative ? opt.noise * pmax : opt.noise;
    if (sd > 0.0)
      for (double& y : d.y) y += sd * normal(rng);
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<LoadCaseSpec> all_passive_cases() {
  std::vector<LoadCaseSpec> s;
  for (auto c : kAllLoadCases) s.push_back({c, false});
  return s;
}

// ---------------------------------------------------------------------------
// Fit configuration (JSON):
// { "model": "wkm", "params": "base.json", "stage": "passive",
//   "free": { "alpha": {"start": 2.0, "lower": 0.1, "upper": 10} },
//   "datasets": ["data.csv"], "weights": [1.0], "max_iterations": 500 }

inline FitProblem load_fit_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
  static const std::set<std::string> keys{"model", "params", "stage", "free", "datasets", "weights", "max_iterations"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw InputError("unknown key '" + k + "' in fit configuration");
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  FitProblem pb;
  if (!j.contains("params") || !j["params"].is_string()) throw InputError("fit configuration lacks 'params'");
  pb.model = load_params(resolve(j["params"].get<std::string>())).material;
  if (j.contains("model") && parse_model(j["model"].get<std::string>()) != kind_of(pb.model))
    throw InputError("fit configuration model does not match the parameter file");
  const std::string stage = j.value("stage", std::string("passive"));
  if (stage == "passive") pb.stage = FitStage::Passive;
  else if (stage == "active") pb.stage = FitStage::Active;
  else throw InputError("stage must be passive or active");

  if (j.contains("free")) {
    for (const auto& [name, spec] : j["free"].items()) {
      FreeParameter f = default_bounds(pb.model, name, get_param(pb.model, name));
      if (spec.contains("start")) f.start = spec["start"].get<double>();
      if (spec.contains("lower")) f.lower = spec["lower"].get<double>();
      if (spec.contains("upper")) f.upper = spec["upper"].get<double>();
      pb.free.push_back(f);
    }
  } else {
    const auto names = pb.stage == FitStage::Passive ? passive_param_names(pb.model) : active_param_names(pb.model);
    for (const auto& n : names) pb.free.push_back(default_bounds(pb.model, n, get_param(pb.model, n)));
  }
  if (!j.contains("datasets") || !j["datasets"].is_array()) throw InputError("fit configuration lacks 'datasets'");
  for (const auto& p : j["datasets"])
    for (auto& d : read_datasets(resolve(p.get<std::string>()))) pb.datasets.push_back(std::move(d));
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    if (!w.is_array() || w.size() != pb.datasets.size())
      throw InputError("'weights' needs one entry per dataset (" + std::to_string(pb.datasets.size()) + ")");
    for (std::size_t k = 0; k < pb.datasets.size(); ++k) pb.datasets[k].weight = w[k].get<double>();
  }
  if (j.contains("max_iterations")) pb.options.max_iterations = j["max_iterations"].get<int>();
  pb.validate();
  return pb;
}

/// Machine-readable fit report: estimates, per-dataset curves and error measures.
inline nlohmann::json fit_result_to_json(const FitResult& fr) {
  nlohmann::json j;
  j["model"] = std::string(model_name(kind_of(fr.model)));
  j["converged"] = fr.converged;
  j["reason"] = fr.reason;
  j["iterations"] = fr.iterations;
  j["cost"] = fr.cost();
  j["cost_history"] = fr.cost_history;
  nlohmann::json est = nlohmann::json::object();
  for (std::size_t k = 0; k < fr.names.size(); ++k) est[fr.names[k]] = {{"value", fr.values[k]}, {"unit", fr.units[k]}};
  j["estimates"] = est;
  j["parameters"] = params_to_json(ParamFile{fr.model, "fit result"});
  nlohmann::json ds = nlohmann::json::array();
  for (const auto& d : fr.datasets) {
    std::vector<double> res(d.x.size());
    for (std::size_t i = 0; i < d.x.size(); ++i) res[i] = d.model[i] - d.data[i];
    ds.push_back({{"case", std::string(case_name(d.spec.kind))},
                  {"state", state_name(d.spec)},
                  {"value", d.x},
                  {"data_kpa", d.data},
                  {"model_kpa", d.model},
                  {"residual_kpa", res},
                  {"eps_inf", d.errors.eps_inf},
                  {"eps_1", d.errors.eps_1},
                  {"eps_2", d.errors.eps_2}});
  }
  j["datasets"] = ds;
  return j;
}

}  // namespace actmuscle

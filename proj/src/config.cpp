#include "kdv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace kdv {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double real(const json& j, const std::string& name) {
  if (!j.is_number()) throw ConfigError("'" + name + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("'" + name + "' must be finite");
  return v;
}

std::size_t count(const json& j, const std::string& name) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError("'" + name + "' must be a non-negative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

std::string text(const json& j, const std::string& name) {
  if (!j.is_string()) throw ConfigError("'" + name + "' must be a string");
  return j.get<std::string>();
}

bool flag(const json& j, const std::string& name) {
  if (!j.is_boolean()) throw ConfigError("'" + name + "' must be true or false");
  return j.get<bool>();
}

bool pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

template <class F>
void with(const json& j, const char* key, F&& f) {
  if (j.contains(key) && !j.at(key).is_null()) f(j.at(key));
}

}  // namespace

RunConfig parse_config(const json& j) {
  only_keys(j,
            {"problem", "s", "b", "alpha", "lambdas", "grid", "L", "L_min", "delta", "tol", "max_iter", "trace_tol",
             "residual_tol", "theta_ramp", "nonlinear", "scale", "preset", "inputs", "seed", "probe", "output"},
            "config");
  RunConfig c;
  SolverConfig& s = c.solver;
  with(j, "problem", [&](const json& v) {
    try {
      s.problem = parse_problem(text(v, "problem"));
    } catch (const ConfigError&) {
      throw;
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  });
  with(j, "s", [&](const json& v) { s.s = real(v, "s"); });
  with(j, "b", [&](const json& v) { s.b = real(v, "b"); });
  with(j, "alpha", [&](const json& v) { s.alpha = real(v, "alpha"); });
  with(j, "lambdas", [&](const json& v) {
    only_keys(v, {"lambda1", "lambda2", "lambda3"}, "lambdas");
    with(v, "lambda1", [&](const json& w) { s.lambda1 = real(w, "lambda1"); });
    with(v, "lambda2", [&](const json& w) { s.lambda2 = real(w, "lambda2"); });
    with(v, "lambda3", [&](const json& w) { s.lambda3 = real(w, "lambda3"); });
  });
  with(j, "grid", [&](const json& v) {
    only_keys(v, {"Lbox", "N", "T", "M"}, "grid");
    with(v, "Lbox", [&](const json& w) { s.grid.half_width = real(w, "Lbox"); });
    with(v, "N", [&](const json& w) { s.grid.n = count(w, "N"); });
    with(v, "T", [&](const json& w) { s.grid.T = real(w, "T"); });
    with(v, "M", [&](const json& w) { s.grid.m = count(w, "M"); });
  });
  with(j, "L", [&](const json& v) { s.L = real(v, "L"); });
  with(j, "L_min", [&](const json& v) { s.L_min = real(v, "L_min"); });
  with(j, "delta", [&](const json& v) { s.delta = real(v, "delta"); });
  with(j, "tol", [&](const json& v) { s.tol = real(v, "tol"); });
  with(j, "max_iter", [&](const json& v) { s.max_iter = count(v, "max_iter"); });
  with(j, "trace_tol", [&](const json& v) { s.trace_tol = real(v, "trace_tol"); });
  with(j, "residual_tol", [&](const json& v) { s.residual_tol = real(v, "residual_tol"); });
  with(j, "theta_ramp", [&](const json& v) { s.theta_ramp = real(v, "theta_ramp"); });
  with(j, "nonlinear", [&](const json& v) { s.nonlinear = flag(v, "nonlinear"); });
  with(j, "scale", [&](const json& v) { s.scale = real(v, "scale"); });
  with(j, "preset", [&](const json& v) { s.preset = text(v, "preset"); });
  with(j, "inputs", [&](const json& v) {
    only_keys(v, {"phi", "f", "g1", "g2"}, "inputs");
    with(v, "phi", [&](const json& w) { s.phi_path = text(w, "phi"); });
    with(v, "f", [&](const json& w) { s.f_path = text(w, "f"); });
    with(v, "g1", [&](const json& w) { s.g1_path = text(w, "g1"); });
    with(v, "g2", [&](const json& w) { s.g2_path = text(w, "g2"); });
  });
  with(j, "seed", [&](const json& v) {
    if (!v.is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  });
  with(j, "probe", [&](const json& v) {
    only_keys(v, {"count", "N", "M", "length", "period"}, "probe");
    with(v, "count", [&](const json& w) { c.probe.count = count(w, "probe.count"); });
    with(v, "N", [&](const json& w) { c.probe.grid.n = count(w, "probe.N"); });
    with(v, "M", [&](const json& w) { c.probe.grid.m = count(w, "probe.M"); });
    with(v, "length", [&](const json& w) { c.probe.grid.length = real(w, "probe.length"); });
    with(v, "period", [&](const json& w) { c.probe.grid.period = real(w, "probe.period"); });
  });
  with(j, "output", [&](const json& v) {
    only_keys(v, {"x_stride", "t_stride"}, "output");
    with(v, "x_stride", [&](const json& w) { c.output.x_stride = count(w, "output.x_stride"); });
    with(v, "t_stride", [&](const json& w) { c.output.t_stride = count(w, "output.t_stride"); });
  });
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

void validate(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  try {
    check_sobolev_index(s.s);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!pow2(s.grid.n)) throw ConfigError("grid.N must be a power of two");
  if (!pow2(s.grid.m)) throw ConfigError("grid.M must be a power of two");
  if (!(s.grid.T > 0.0)) throw ConfigError("grid.T must be positive");
  if (!(s.grid.half_width > 0.0)) throw ConfigError("grid.Lbox must be positive");
  if (!(s.b > 0.0 && s.b < 0.5)) throw ConfigError("b must lie in (0, 1/2)");
  if (!(s.alpha > 0.5)) throw ConfigError("alpha must exceed 1/2");
  if (!(s.L > 0.0) || !(s.L_min > 0.0)) throw ConfigError("L and L_min must be positive");
  if (!(s.delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(s.tol > 0.0) || !(s.trace_tol > 0.0) || !(s.residual_tol > 0.0))
    throw ConfigError("tolerances must be positive");
  if (s.max_iter == 0) throw ConfigError("max_iter must be positive");
  if (!(s.theta_ramp > 0.0 && s.theta_ramp <= 1.0)) throw ConfigError("theta_ramp must lie in (0, 1]");
  if (s.scale && !(*s.scale > 0.0 && *s.scale <= 1.0)) throw ConfigError("scale must lie in (0, 1]");
  if (!pow2(c.probe.grid.n) || !pow2(c.probe.grid.m)) throw ConfigError("probe.N and probe.M must be powers of two");
  if (!(c.probe.grid.length > 0.0) || !(c.probe.grid.period > 0.0))
    throw ConfigError("probe.length and probe.period must be positive");
  if (c.probe.count == 0) throw ConfigError("probe.count must be positive");
  if (c.output.x_stride == 0 || c.output.t_stride == 0) throw ConfigError("output strides must be positive");
  try {
    check_lambdas(s.problem, s.lambdas(), s.s);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

json to_json(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  json lam = json::object();
  if (s.lambda1) lam["lambda1"] = *s.lambda1;
  if (s.lambda2) lam["lambda2"] = *s.lambda2;
  if (s.lambda3) lam["lambda3"] = *s.lambda3;
  json inputs = json::object();
  if (!s.phi_path.empty()) inputs["phi"] = s.phi_path;
  if (!s.f_path.empty()) inputs["f"] = s.f_path;
  if (!s.g1_path.empty()) inputs["g1"] = s.g1_path;
  if (!s.g2_path.empty()) inputs["g2"] = s.g2_path;
  json j = {{"problem", to_string(s.problem)},
            {"s", s.s},
            {"b", s.b},
            {"alpha", s.alpha},
            {"lambdas", lam},
            {"grid", {{"Lbox", s.grid.half_width}, {"N", s.grid.n}, {"T", s.grid.T}, {"M", s.grid.m}}},
            {"L", s.L},
            {"L_min", s.L_min},
            {"delta", s.delta},
            {"tol", s.tol},
            {"max_iter", s.max_iter},
            {"trace_tol", s.trace_tol},
            {"residual_tol", s.residual_tol},
            {"theta_ramp", s.theta_ramp},
            {"nonlinear", s.nonlinear},
            {"preset", s.preset},
            {"inputs", inputs},
            {"seed", s.seed},
            {"probe",
             {{"count", c.probe.count},
              {"N", c.probe.grid.n},
              {"M", c.probe.grid.m},
              {"length", c.probe.grid.length},
              {"period", c.probe.grid.period}}},
            {"output", {{"x_stride", c.output.x_stride}, {"t_stride", c.output.t_stride}}}};
  if (s.scale) j["scale"] = *s.scale;
  return j;
}

}  // namespace kdv

#include "kdv/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "kdv/config.hpp"
#include "kdv/forcing.hpp"
#include "kdv/fractional.hpp"
#include "kdv/io.hpp"
#include "kdv/report.hpp"
#include "kdv/solver.hpp"
#include "kdv/spaces.hpp"
#include "kdv/verify.hpp"

namespace kdv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  bool strict = false;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string run_id;
};

class Artifacts {
 public:
  Artifacts(const Options& o, const std::string& command)
      : dir_(fs::path(o.out_dir) / (o.run_id.empty() ? command : o.run_id)) {
    fs::create_directories(dir_);
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return f;
  }
  void write_json(const std::string& name, const json& j) const { open(name) << dump_json(j); }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
};

std::vector<double> real_parts(const TimeSignal& s, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = s.samples[i].real();
  return v;
}

std::vector<double> times(const Axis& t, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = t.at(i);
  return v;
}

std::size_t samples_upto(const Axis& t, double end) {
  std::size_t n = 0;
  while (n < t.n && t.at(n) <= end + 1e-9 * t.step) ++n;
  return n;
}

std::vector<std::string> merged(std::vector<std::string> a, const std::vector<std::string>& b) {
  for (const auto& f : b)
    if (std::find(a.begin(), a.end(), f) == a.end()) a.push_back(f);
  return a;
}

bool any_escalated(const std::vector<std::string>& flags) {
  return std::any_of(flags.begin(), flags.end(), escalated_flag);
}

Preset load_data(const SolverConfig& cfg) {
  Preset p = make_preset(cfg.preset, cfg);
  const Axis x = solver_x_axis(cfg.grid), t = solver_t_axis(cfg.grid);
  if (!cfg.phi_path.empty()) p.phi = resample_profile(ingest_profile(cfg.phi_path), x);
  auto signal = [&](const std::string& path, std::optional<TimeSignal>& slot, const char* what) {
    if (path.empty()) return;
    if (!slot) throw ConfigError(std::string("input '") + what + "' is not used by this problem");
    const TimeSignal s = ingest_signal(path);
    if (!s.causal) throw ConfigError(std::string("input '") + what + "' starts before t = 0");
    slot = resample_signal(s, t);
    for (const auto& f : s.flags) slot->flag(f);
  };
  signal(cfg.f_path, p.data.f, "f");
  signal(cfg.g1_path, p.data.g1, "g1");
  signal(cfg.g2_path, p.data.g2, "g2");
  return p;
}

json norms_json(const SolveResult& r, const SolverConfig& cfg) {
  // The field is continued smoothly past the physical region before the
  // space-time transform so the cut at the boundary does not dominate.
  const Extension ext(r.u.x, r.region);
  const SpaceTimeNorms n = xsb_norm(ext.apply(r.u), NormParams{cfg.s, cfg.b, cfg.alpha});
  return {{"xsb", n.xsb}, {"dalpha", n.dalpha}, {"ysb", n.ysb}, {"flags", n.flags}};
}

int solve(Problem problem, RunConfig rc, const Options& opt, std::ostream& out) {
  SolverConfig& cfg = rc.solver;
  cfg.problem = problem;
  if (opt.seed) cfg.seed = *opt.seed;
  validate(rc);
  const Preset data = load_data(cfg);
  const std::string command = std::string("solve-") + to_string(problem);
  const Artifacts art(opt, command);

  json report = {{"command", command}, {"config", to_json(rc)}};
  std::vector<std::string> input_flags;
  for (const auto* s : {&data.data.f, &data.data.g1, &data.data.g2})
    if (*s) input_flags = merged(input_flags, (*s)->flags);
  if (problem != Problem::left && data.data.f && cfg.s > 0.5) {
    const SpatialProfile phi = resample_profile(data.phi, solver_x_axis(cfg.grid));
    report["compatibility"] = to_string(check_compatibility(phi, *data.data.f, cfg.s));
  } else {
    report["compatibility"] = "not-required";
  }

  SolveResult r;
  try {
    r = cfg.scale ? scaled_solve(data.data, data.phi, cfg, *cfg.scale) : picard_solve(data.data, data.phi, cfg);
  } catch (const DivergenceError& e) {
    report["status"] = "diverged";
    report["message"] = e.what();
    report["contraction_factors"] = e.factors();
    art.write_json("report.json", report);
    out << command << ": diverged (" << e.what() << ")\n";
    return exit_divergence;
  }

  const double t_end = std::min(cfg.grid.T, r.u.t.end());
  {
    auto f = art.open("field.csv");
    emit_field(f, r.u, r.region.lo, r.region.hi, t_end, rc.output.x_stride, rc.output.t_stride);
  }
  const std::size_t nt = samples_upto(r.u.t, t_end);
  std::vector<std::string> names{"t"};
  std::vector<std::vector<double>> cols{times(r.u.t, nt)};
  auto trace = [&](const char* label, const TimeSignal& want, double at, Side side, int deriv) {
    names.push_back(std::string(label) + "_prescribed");
    cols.push_back(real_parts(resample_signal(want, r.u.t), nt));
    names.push_back(std::string(label) + "_computed");
    cols.push_back(real_parts(side_limit(r.u, at, side, deriv), nt));
  };
  const double L = data.data.L;
  switch (problem) {
    case Problem::right:
      trace("u(0)", *data.data.f, 0.0, Side::right, 0);
      break;
    case Problem::left:
      trace("u(0)", *data.data.g1, 0.0, Side::left, 0);
      trace("ux(0)", *data.data.g2, 0.0, Side::left, 1);
      break;
    case Problem::segment:
      trace("u(0)", *data.data.f, 0.0, Side::right, 0);
      trace("u(L)", *data.data.g1, L, Side::left, 0);
      trace("ux(L)", *data.data.g2, L, Side::left, 1);
      break;
  }
  {
    auto f = art.open("traces.csv");
    emit_columns(f, names, cols);
  }

  const EnergyCheck energy = energy_identity_check(r.u, r.region, t_end, cfg.nonlinear);
  double max_imag = 0.0;
  for (const auto& v : r.u.values) max_imag = std::max(max_imag, std::abs(v.imag()));
  json traces = json::object();
  for (const auto& e : r.trace_errors) traces[e.name] = e.error;
  const std::vector<std::string> flags = merged(r.flags, input_flags);

  report["status"] = "converged";
  report["iterations"] = r.iterations;
  report["increments"] = r.increments;
  report["contraction_factors"] = r.contraction_factors;
  report["fixed_point_residual"] = r.fixed_point_residual;
  report["trace_errors"] = traces;
  report["initial_trace_error"] = r.initial_trace_error;
  report["pde_residual"] = r.pde_residual;
  report["data_norm"] = r.data_norm;
  report["solution_norm"] = r.solution_norm;
  report["lambdas"] = {{"lambda1", r.lambdas.lambda1}, {"lambda2", r.lambdas.lambda2}, {"lambda3", r.lambdas.lambda3}};
  report["region"] = {{"lo", r.region.lo}, {"hi", r.region.hi}};
  report["solution_time"] = t_end;
  report["max_imaginary_part"] = max_imag;
  report["energy"] = {{"mass_start", energy.mass_start},
                      {"mass_end", energy.mass_end},
                      {"flux", energy.flux},
                      {"residual", energy.residual},
                      {"flags", energy.flags}};
  report["norms"] = norms_json(r, cfg);
  if (r.segment)
    report["segment"] = {{"contraction", r.segment->contraction},
                         {"neumann_terms", r.segment->neumann_terms},
                         {"neumann_vs_direct", r.segment->neumann_vs_direct},
                         {"bump_ratio", r.segment->bump_ratio}};
  const bool within = r.max_trace_error() <= cfg.trace_tol && r.pde_residual <= cfg.residual_tol;
  report["within_tolerances"] = within;
  report["flags"] = flags;
  art.write_json("report.json", report);

  out << command << ": " << r.iterations << " iterations, max trace error " << format_number(r.max_trace_error())
      << ", residual " << format_number(r.pde_residual) << '\n';
  for (const auto& f : flags) out << "  flag: " << f << '\n';
  if (opt.strict && any_escalated(flags)) return exit_flagged;
  return exit_ok;
}

int verify(RunConfig rc, const Options& opt, std::ostream& out) {
  if (opt.seed) rc.solver.seed = *opt.seed;
  validate(rc);
  VerifyOptions vo;
  vo.grid = rc.solver.grid;
  vo.seed = rc.solver.seed == 0 ? vo.seed : rc.solver.seed;
  vo.probe_count = rc.probe.count;
  VerifySuite suite(vo);
  const Artifacts art(opt, "verify");
  json rows = json::array();
  bool all = true;
  for (int id = VerifySuite::first_id; id <= VerifySuite::last_id; ++id) {
    const CriterionResult c = suite.run(id);
    all = all && c.pass;
    rows.push_back(to_json(c));
    out << "criterion " << c.id << " [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.summary << '\n';
    out.flush();
  }
  art.write_json("report.json", {{"command", "verify"}, {"config", to_json(rc)}, {"criteria", rows}, {"pass", all}});
  return all ? exit_ok : exit_failed;
}

int probe(RunConfig rc, const Options& opt, std::ostream& out) {
  if (opt.seed) rc.solver.seed = *opt.seed;
  validate(rc);
  const SolverConfig& s = rc.solver;
  const ProbeReport p = bilinear_probe(rc.probe.count, NormParams{s.s, s.b, s.alpha}, s.seed, rc.probe.grid);
  const Artifacts art(opt, "probe-bilinear");
  {
    auto f = art.open("report.json");
    f << dump_json(json::parse(p.to_json()));
  }
  out << "probe-bilinear: max ratio " << format_number(p.max_ratio) << ", max Y ratio "
      << format_number(p.max_ratio_y) << '\n';
  for (const auto& f : p.flags) out << "  flag: " << f << '\n';
  if (opt.strict && any_escalated(p.flags)) return exit_flagged;
  return exit_ok;
}

int traces(RunConfig rc, const Options& opt, std::ostream& out) {
  validate(rc);
  const SolverConfig& cfg = rc.solver;
  const Axis x = solver_x_axis(cfg.grid), t = solver_t_axis(cfg.grid);
  const TimeSignal f = bump_signal(t, cfg.grid.T);
  const TimeSignal i13 = frac_integrate(f, FracOrder(-1.0 / 3.0));
  ForcingEngine e(x, t);
  const auto F = e.spectrum(f);
  const SpaceTimeField l0 = e.L0(F), lm = e.Lm1(F);
  const LambdaChoice lam = cfg.lambdas();
  const SpaceTimeField minus = e.family(F, FracOrder(lam.lambda1), Sign::minus);
  const SpaceTimeField plus = e.family(F, FracOrder(lam.lambda3), Sign::plus);

  std::vector<std::string> names{"t"};
  std::vector<std::vector<double>> cols{times(t, t.n)};
  json errors = json::object();
  std::vector<std::string> flags;
  auto add = [&](const std::string& label, const TimeSignal& got, const TimeSignal& want) {
    names.push_back(label + "_expected");
    cols.push_back(real_parts(want, t.n));
    names.push_back(label + "_computed");
    cols.push_back(real_parts(got, t.n));
    const double scale = want.max_abs();
    errors[label] = scale > 0.0 ? sup_diff(got.samples, want.samples) / scale : sup_diff(got.samples, want.samples);
    flags = merged(flags, got.flags);
  };
  add("L0(0+)", side_limit(l0, 0.0, Side::right, 0), f);
  add("dxL0(0+)", side_limit(l0, 0.0, Side::right, 1), -1.0 * i13);
  add("Lm1(0-)", side_limit(lm, 0.0, Side::left, 0), -1.0 * f);
  add("dxLm1(0-)", side_limit(lm, 0.0, Side::left, 1), -2.0 * i13);
  add("dxLm1(0+)", side_limit(lm, 0.0, Side::right, 1), i13);
  add("Lminus(0-)", side_limit(minus, 0.0, Side::left, 0), family_trace_coefficient(FracOrder(lam.lambda1), Sign::minus) * f);
  add("Lplus(0+)", side_limit(plus, 0.0, Side::right, 0), family_trace_coefficient(FracOrder(lam.lambda3), Sign::plus) * f);

  const Artifacts art(opt, "traces");
  {
    auto file = art.open("traces.csv");
    emit_columns(file, names, cols);
  }
  flags = merged(flags, l0.flags);
  flags = merged(flags, lm.flags);
  art.write_json("report.json", {{"command", "traces"},
                                 {"config", to_json(rc)},
                                 {"lambda_minus", lam.lambda1},
                                 {"lambda_plus", lam.lambda3},
                                 {"relative_errors", errors},
                                 {"flags", flags}});
  for (const auto& [k, v] : errors.items()) out << "  " << k << ": " << format_number(v.get<double>()) << '\n';
  if (opt.strict && any_escalated(flags)) return exit_flagged;
  return exit_ok;
}

void report_error(std::ostream& err, const char* category, const std::string& message) {
  err << json{{"error", category}, {"message", message}}.dump() << '\n';
}

}  // namespace

bool escalated_flag(const std::string& flag) {
  return flag.rfind("aliasing", 0) == 0 || flag.find("resolution") != std::string::npos ||
         flag.find("not resolved") != std::string::npos;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"KdV initial-boundary value problem solver"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config_path, "JSON configuration file");
  app.add_flag("--strict", opt.strict, "exit 4 when aliasing or resolution flags are raised");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--run-id", opt.run_id, "artifact subdirectory (defaults to the subcommand name)");
  const char* names[] = {"solve-right", "solve-left", "solve-segment", "verify", "probe-bilinear", "traces"};
  for (const char* n : names) {
    auto* sub = app.add_subcommand(n);
    sub->fallthrough();
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    report_error(err, "config", e.what());
    return exit_config;
  }
  if (seed_opt->count() > 0) opt.seed = seed;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig rc = opt.config_path.empty() ? parse_config(json::object()) : load_config(opt.config_path);
    if (command == "solve-right") return solve(Problem::right, rc, opt, out);
    if (command == "solve-left") return solve(Problem::left, rc, opt, out);
    if (command == "solve-segment") return solve(Problem::segment, rc, opt, out);
    if (command == "verify") return verify(rc, opt, out);
    if (command == "probe-bilinear") return probe(rc, opt, out);
    return traces(rc, opt, out);
  } catch (const DivergenceError& e) {
    report_error(err, "divergence", e.what());
    return exit_divergence;
  } catch (const IngestError& e) {
    report_error(err, "input", e.what());
    return exit_config;
  } catch (const DomainError& e) {
    report_error(err, "config", e.what());
    return exit_config;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return exit_failed;
  }
}

}  // namespace kdv

#pragma once

#include <string>

#include <json.hpp>

#include "kdv/solver.hpp"
#include "kdv/spaces.hpp"

namespace kdv {

/// Invalid configuration: unknown key, wrong type or value out of range.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct ProbeOptions {
  std::size_t count = 64;
  ProbeGrid grid;
};

/// Decimation of field.csv.
struct OutputOptions {
  std::size_t x_stride = 4;
  std::size_t t_stride = 4;
};

struct RunConfig {
  SolverConfig solver;
  ProbeOptions probe;
  OutputOptions output;
};

/// Reads a JSON document of the form
///   {"problem": "right", "s": 0, "b": 0.45, "alpha": 0.6,
///    "lambdas": {"lambda1": .., "lambda2": .., "lambda3": ..},
///    "grid": {"Lbox": 50, "N": 2048, "T": 1, "M": 1024},
///    "L": 10, "L_min": 4, "delta": 0.05, "tol": 1e-8, "max_iter": 60,
///    "trace_tol": 1e-4, "residual_tol": 1e-4, "theta_ramp": 1,
///    "nonlinear": true, "scale": 0.5, "preset": "gauss-small",
///    "inputs": {"phi": "phi.csv", "f": .., "g1": .., "g2": ..}, "seed": 0,
///    "probe": {"count": 64, "N": 256, "M": 128, "length": 64, "period": 8},
///    "output": {"x_stride": 4, "t_stride": 4}}
/// where every key is optional and Lbox is the box half-width. Unknown keys,
/// wrong types and out-of-range values throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Throws ConfigError unless -3/4 < s < 3/2, s != 1/2, N and M are powers of
/// two, T > 0 and the remaining numbers are in range.
void validate(const RunConfig& c);

/// The configuration in the same layout parse_config() accepts.
nlohmann::json to_json(const RunConfig& c);

}  // namespace kdv

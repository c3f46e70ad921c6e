#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdv/solver.hpp"

namespace kdv {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const CriterionResult& r);

struct VerifyOptions {
  GridConfig grid;
  std::uint64_t seed = 42;
  /// Trials of the bilinear probe.
  std::size_t probe_count = 64;
};

/// The numbered identity and convergence checks. Results of expensive solves
/// are shared between checks run through the same suite object.
class VerifySuite {
 public:
  explicit VerifySuite(VerifyOptions opt = {});

  static constexpr int first_id = 1;
  static constexpr int last_id = 12;

  CriterionResult run(int id);
  std::vector<CriterionResult> run_all();

 private:
  CriterionResult airy_constants();
  CriterionResult mellin_identities();
  CriterionResult fractional_calculus();
  CriterionResult forcing_traces();
  CriterionResult family_traces();
  CriterionResult jump_condition();
  CriterionResult witness();
  CriterionResult group_properties();
  CriterionResult linear_solves();
  CriterionResult nonlinear_picard();
  CriterionResult energy_identities();
  CriterionResult bilinear_probe_stability();

  const SolveResult& linear(Problem p);
  SolverConfig config(Problem p, bool nonlinear) const;

  VerifyOptions opt_;
  std::optional<SolveResult> linear_[3];
};

}  // namespace kdv

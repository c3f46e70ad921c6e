#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "kdv/verify.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the tool twice with the same arguments and compares the report bytes.
bool identical_runs(const std::string& args, const fs::path& root, const std::string& label, std::string& note) {
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    const std::string id = label + "-" + std::to_string(k);
    const std::string cmd = std::string("\"") + KDV_TOOL_PATH + "\" " + args + " --out \"" + root.string() +
                            "\" --run-id " + id + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      note = label + " exited with status " + std::to_string(rc);
      return false;
    }
    reports[k] = slurp(root / id / "report.json");
  }
  if (reports[0].empty() || reports[0] != reports[1]) {
    note = label + " reports differ";
    return false;
  }
  note += label + " identical (" + std::to_string(reports[0].size()) + " bytes); ";
  return true;
}

}  // namespace

int main() {
  kdv::VerifySuite suite;
  int failures = 0;
  for (int id = kdv::VerifySuite::first_id; id <= kdv::VerifySuite::last_id; ++id) {
    const auto start = std::chrono::steady_clock::now();
    const kdv::CriterionResult r = suite.run(id);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.summary.c_str(), secs);
    std::fflush(stdout);
  }

  const fs::path root = fs::current_path() / "acceptance_runs";
  fs::remove_all(root);
  std::string note;
  const bool same = identical_runs("probe-bilinear --seed 7", root, "probe", note) &&
                    identical_runs("solve-right", root, "solve", note);
  if (!same) ++failures;
  std::printf("criterion 13 %s  Determinism: %s\n", same ? "PASS" : "FAIL", note.c_str());
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

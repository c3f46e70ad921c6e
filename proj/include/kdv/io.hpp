#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "kdv/types.hpp"

namespace kdv {

/// Malformed input file. `row` is the 1-based data row (0 when the problem
/// is not tied to a row, e.g. a bad header).
class IngestError : public DomainError {
 public:
  IngestError(const std::string& what, std::size_t row) : DomainError(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Two-column CSV with header "t,value" (an optional third column "imag"
/// holds imaginary parts). Spacing must be uniform to 1e-9 relative and all
/// values finite. The signal is marked causal when it starts at t >= 0; with
/// `expect_causal`, samples that are nonzero before or at t = 0 add a warning
/// flag instead of failing.
TimeSignal ingest_signal(const std::string& path, bool expect_causal = true);
TimeSignal parse_signal(std::istream& in, bool expect_causal = true);

/// Same format with header "x,value".
SpatialProfile ingest_profile(const std::string& path);
SpatialProfile parse_profile(std::istream& in);

/// Writes the format read above; numbers carry 17 significant digits so a
/// round trip reproduces every sample exactly.
void emit_signal(std::ostream& out, const TimeSignal& s);
void emit_profile(std::ostream& out, const SpatialProfile& p);

/// Columns x,t,u (real part) for every x_stride-th node with lo < x < hi and
/// every t_stride-th time up to t_max.
void emit_field(std::ostream& out, const SpaceTimeField& u, double lo, double hi, double t_max,
                std::size_t x_stride = 1, std::size_t t_stride = 1);

/// A header line followed by rows of equally long columns (real parts).
void emit_columns(std::ostream& out, const std::vector<std::string>& names,
                  const std::vector<std::vector<double>>& columns);

}  // namespace kdv

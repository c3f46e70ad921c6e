#include "kdv/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kdv/report.hpp"

namespace kdv {

namespace {

constexpr double kSpacingTol = 1e-9;

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& cell, std::size_t row) {
  if (cell.empty()) throw IngestError("empty cell in row " + std::to_string(row), row);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE)
    throw IngestError("unparsable number '" + cell + "' in row " + std::to_string(row), row);
  if (std::isnan(v)) throw IngestError("NaN in row " + std::to_string(row), row);
  if (!std::isfinite(v)) throw IngestError("infinite value in row " + std::to_string(row), row);
  return v;
}

struct Table {
  std::vector<double> axis;
  std::vector<cplx> values;
  double step = 0.0;
};

Table read_table(std::istream& in, const char* axis_name) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty file", 0);
  const auto head = split(trim(line));
  const bool complex_values = head.size() == 3 && head[2] == "imag";
  if (head.size() < 2 || head[0] != axis_name || head[1] != "value" || (head.size() == 3 && !complex_values) ||
      head.size() > 3)
    throw IngestError(std::string("header must be '") + axis_name + ",value' (optionally ',imag')", 0);
  Table t;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    ++row;
    const auto cells = split(line);
    if (cells.size() != head.size())
      throw IngestError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " columns", row);
    t.axis.push_back(number(cells[0], row));
    const double re = number(cells[1], row);
    const double im = complex_values ? number(cells[2], row) : 0.0;
    t.values.emplace_back(re, im);
  }
  if (t.axis.size() < 2) throw IngestError("need at least two rows", row);
  t.step = t.axis[1] - t.axis[0];
  if (!(t.step > 0.0)) throw IngestError("axis must increase (row 2)", 2);
  for (std::size_t i = 2; i < t.axis.size(); ++i) {
    const double d = t.axis[i] - t.axis[i - 1];
    if (std::abs(d - t.step) > kSpacingTol * t.step)
      throw IngestError("non-uniform spacing at row " + std::to_string(i + 1), i + 1);
  }
  // The mean step is the better estimate once uniformity is established.
  t.step = (t.axis.back() - t.axis.front()) / static_cast<double>(t.axis.size() - 1);
  return t;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path, 0);
  return in;
}

bool any_imag(const std::vector<cplx>& v) {
  for (const auto& z : v)
    if (z.imag() != 0.0) return true;
  return false;
}

}  // namespace

TimeSignal parse_signal(std::istream& in, bool expect_causal) {
  Table t = read_table(in, "t");
  const double t0 = t.axis.front();
  TimeSignal s(std::move(t.values), t.step, t0, t0 >= 0.0);
  if (expect_causal) {
    if (!s.causal) {
      for (std::size_t n = 0; n < s.size() && s.t(n) < 0.0; ++n)
        if (s.samples[n] != cplx(0.0)) {
          s.flag("causality: nonzero values before t = 0");
          break;
        }
    } else if (t0 == 0.0 && s.samples.front() != cplx(0.0)) {
      s.flag("causality: signal does not vanish at t = 0");
    }
  }
  return s;
}

TimeSignal ingest_signal(const std::string& path, bool expect_causal) {
  auto in = open(path);
  return parse_signal(in, expect_causal);
}

SpatialProfile parse_profile(std::istream& in) {
  Table t = read_table(in, "x");
  SpatialProfile p;
  p.x0 = t.axis.front();
  p.dx = t.step;
  p.samples = std::move(t.values);
  p.pad = 0.5 * p.dx * static_cast<double>(p.samples.size());
  return p;
}

SpatialProfile ingest_profile(const std::string& path) {
  auto in = open(path);
  return parse_profile(in);
}

void emit_signal(std::ostream& out, const TimeSignal& s) {
  const bool im = any_imag(s.samples);
  out << (im ? "t,value,imag\n" : "t,value\n");
  for (std::size_t n = 0; n < s.size(); ++n) {
    out << format_number(s.t(n)) << ',' << format_number(s.samples[n].real());
    if (im) out << ',' << format_number(s.samples[n].imag());
    out << '\n';
  }
}

void emit_profile(std::ostream& out, const SpatialProfile& p) {
  const bool im = any_imag(p.samples);
  out << (im ? "x,value,imag\n" : "x,value\n");
  for (std::size_t j = 0; j < p.size(); ++j) {
    out << format_number(p.x(j)) << ',' << format_number(p.samples[j].real());
    if (im) out << ',' << format_number(p.samples[j].imag());
    out << '\n';
  }
}

void emit_field(std::ostream& out, const SpaceTimeField& u, double lo, double hi, double t_max,
                std::size_t x_stride, std::size_t t_stride) {
  if (x_stride == 0 || t_stride == 0) throw DomainError("strides must be positive");
  out << "x,t,u\n";
  for (std::size_t n = 0; n < u.t.n && u.t.at(n) <= t_max + 1e-12 * u.t.step; n += t_stride)
    for (std::size_t j = 0; j < u.x.n; j += x_stride) {
      const double x = u.x.at(j);
      if (x <= lo || x >= hi) continue;
      out << format_number(x) << ',' << format_number(u.t.at(n)) << ',' << format_number(u(j, n).real()) << '\n';
    }
}

void emit_columns(std::ostream& out, const std::vector<std::string>& names,
                  const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size() || columns.empty()) throw DomainError("column names and data disagree");
  const std::size_t rows = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw DomainError("columns differ in length");
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << format_number(columns[i][r]);
    out << '\n';
  }
}

}  // namespace kdv

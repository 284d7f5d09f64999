#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minorant/grid.hpp"

namespace minorant::io {

struct GridSpec {
  int nx = 0;
  int ny = 0;
  double spacing = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  /// Run lengths over the row-major node order, alternating outside/inside
  /// and starting with outside. Empty means the full rectangle.
  std::vector<std::size_t> mask_rle;

  bool operator==(const GridSpec&) const = default;
  GridDomain build() const;
};

/// A node field given either as nx*ny row-major values or as an expression
/// id: "zero", "const:<c>", "radial2" (x^2 + y^2), "saddle" (x^2 - y^2),
/// "random:<lo>:<hi>" (uniform, drawn from the problem seed).
struct FieldSource {
  std::vector<double> values;
  std::string expr;

  bool operator==(const FieldSource&) const = default;
  bool empty() const { return values.empty() && expr.empty(); }
  GridFunction build(const GridDomain& d, std::uint64_t seed) const;
};

struct NodeWeight {
  int ix = 0;
  int iy = 0;
  double w = 0.0;
  bool operator==(const NodeWeight&) const = default;
};

struct CustomRow {
  std::vector<NodeWeight> terms;  // w is the coefficient
  bool equality = false;
  double offset = 0.0;
  bool operator==(const CustomRow&) const = default;
};

struct ConeInput {
  std::string kind = "subharmonic";  // subharmonic | harmonic | truncated | custom
  double b = 0.0;                    // truncated only
  std::vector<CustomRow> rows;       // custom only
  bool operator==(const ConeInput&) const = default;
};

struct Params {
  double tol = 1e-9;
  std::optional<std::array<int, 4>> u0;  // ix0, iy0, ix1, iy1
  std::optional<std::array<int, 4>> u1;
  FieldSource radius;
  std::string mode;   // envelope: conic | convex; transform: inf_dyadic | fixed_d
  std::string uq;     // criterion with a second divisor: max | sqrt_sum
  double a = 1.0;
  int depth = 16;
  std::optional<std::array<int, 2>> z0;
  std::size_t level = 1;  // projlattice

  bool operator==(const Params&) const = default;
};

struct SampleInput {
  std::size_t dim = 0;
  std::vector<std::vector<double>> points;
  std::vector<double> values;
  bool operator==(const SampleInput&) const = default;
};

struct LatticeInput {
  std::size_t depth = 0;
  std::vector<std::vector<double>> H;
  double q1_weight = 1.0;
  bool operator==(const LatticeInput&) const = default;
};

struct DivisorInput {
  double x = 0.0;
  double y = 0.0;
  int m = 1;
  bool operator==(const DivisorInput&) const = default;
};

struct ProblemSpec {
  std::string command;  // envelope | projlattice | supremal | dual | balayage | pipeline | criterion | transform
  std::uint64_t seed = 0;
  GridSpec grid;
  FieldSource F;  // supremal, dual, pipeline
  FieldSource M;  // criterion, transform
  std::vector<NodeWeight> nu;
  std::vector<DivisorInput> divisor;
  std::vector<DivisorInput> divisor2;
  ConeInput cone;
  Params params;
  SampleInput samples;                     // envelope
  LatticeInput lattice;                    // projlattice
  std::vector<std::vector<double>> queries;  // envelope points or projlattice level elements

  bool operator==(const ProblemSpec&) const = default;
};

/// ParseError on malformed JSON, unknown commands, wrong types or
/// unresolvable references (nested rectangles, node indices).
ProblemSpec parse_problem(const std::string& json_text);
ProblemSpec load_problem(const std::string& path);
std::string serialize_problem(const ProblemSpec& spec);

/// "ix,iy,x,y,value" lines over the inside nodes, with a header.
std::string field_csv(const GridDomain& d, const GridFunction& f);
/// Plain graymap with linear min-max scaling over the finite inside values;
/// outside and infinite nodes are black.
std::string field_pgm(const GridDomain& d, const GridFunction& f);

/// Writes through a temporary file in the same directory and a rename.
/// IoError on failure.
void write_atomic(const std::string& path, const std::string& content);

enum class Format { Json, Csv, Pgm, All };
Format parse_format(const std::string& s);

struct RunOptions {
  std::string out_dir = ".";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  Format format = Format::Json;
  /// When set, the problem's command must match (ParseError otherwise).
  std::string expect_command;
};

struct RunOutput {
  int exit_code = 0;  // 0 success, 2 criterion infeasible
  std::string report;  // report.json content
  std::map<std::string, std::string> files;  // further file name -> content
  std::string summary;  // one line
};

/// Runs a parsed problem without touching the file system.
RunOutput execute(const ProblemSpec& spec, const RunOptions& opt);

/// Loads, executes and writes report.json plus the requested field files.
/// Returns the exit code; errors print one "error: CODE: message" line to
/// stderr and return 1.
int run(const std::string& spec_path, const RunOptions& opt, bool quiet = false);

struct ReportCheck {
  bool has_primal_dual = false;
  bool gap_matches = false;
};
/// Re-reads a report and recomputes |primal - dual| against the stored gap.
ReportCheck check_report(const std::string& json_text);

}  // namespace minorant::io

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "madesign/solver.hpp"

namespace madesign {

inline constexpr const char* kProblemFormatVersion = "1";

/// On-disk description of a design problem: version, sizes, the matrices as
/// row-major nested arrays, a criterion spec string, optional labels and an
/// optional generalized K. Unknown fields are rejected; matrices are
/// symmetrized on load with a warning when the asymmetry exceeds 1e-12.
struct ProblemFile {
  std::string version = kProblemFormatVersion;
  int n = 0;
  int d = 0;
  std::vector<SymMatrix> matrices;
  std::vector<std::string> labels;
  std::string criterion_spec;
  std::optional<Eigen::MatrixXd> generalized_K;
  std::vector<std::string> warnings;  // collected while parsing

  static ProblemFile load(const std::filesystem::path& path);
  static ProblemFile from_json_text(const std::string& text);
  std::string to_json_text() const;
  void save(const std::filesystem::path& path) const;

  /// Materialize (and thereby re-validate) the design instance.
  DesignInstance instance() const;
  Criterion criterion() const;
  std::optional<GeneralizedSpec> generalized() const;

  static ProblemFile from_parts(const DesignInstance& inst, const Criterion& crit,
                                const GeneralizedSpec* spec = nullptr);
};

/// Metadata echoed into the #-prefixed trace header.
struct TraceMeta {
  std::string problem;
  std::string criterion;
  SolverConfig config;
  uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// CSV rows (k, w1..wn, f, gap_bound, step_l1, events) under a structured
/// header block; numbers carry 17 significant digits so nothing is lost to
/// downstream rate analysis.
void write_trace_csv(std::ostream& os, const RunResult& result, const TraceMeta& meta);

/// The CSV body alone (no header); identical inputs give identical bytes.
std::string trace_csv_body(const RunResult& result);

std::string solver_mode_name(SolverMode mode);
std::string guard_name(MonotonicityGuard guard);

}  // namespace madesign

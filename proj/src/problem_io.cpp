#include "madesign/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace madesign {

namespace {

using nlohmann::json;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::MatrixXd parse_nested(const json& rows, int expected_rows, int expected_cols,
                             const std::string& what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != expected_rows) {
    throw ParseError(what + ": expected " + std::to_string(expected_rows) + " rows");
  }
  Eigen::MatrixXd m(expected_rows, expected_cols);
  for (int i = 0; i < expected_rows; ++i) {
    const json& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != expected_cols) {
      throw ParseError(what + ", row " + std::to_string(i + 1) + ": expected " +
                       std::to_string(expected_cols) + " entries");
    }
    for (int j = 0; j < expected_cols; ++j) {
      const json& cell = row.at(j);
      if (!cell.is_number()) {
        throw ParseError(what + ", row " + std::to_string(i + 1) + ", column " +
                         std::to_string(j + 1) + ": not a number");
      }
      m(i, j) = cell.get<double>();
    }
  }
  return m;
}

json nested_from(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

namespace {

ProblemFile parse_problem_object(const json& root);

}  // namespace

ProblemFile ProblemFile::from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem file is not valid JSON: ") + e.what());
  }
  try {
    return parse_problem_object(root);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed problem field: ") + e.what());
  }
}

namespace {

ProblemFile parse_problem_object(const json& root) {
  if (!root.is_object()) throw ParseError("problem file must be a JSON object");

  static const std::set<std::string> known = {
      "version", "n", "d", "matrices", "labels", "criterion", "generalized_K"};
  for (const auto& [key, value] : root.items()) {
    if (!known.count(key)) {
      throw ParseError("unknown field '" + key + "' in problem file");
    }
  }
  for (const char* required : {"version", "n", "d", "matrices", "criterion"}) {
    if (!root.contains(required)) {
      throw ParseError(std::string("missing field '") + required + "'");
    }
  }

  ProblemFile pf;
  pf.version = root.at("version").get<std::string>();
  if (pf.version != kProblemFormatVersion) {
    throw ParseError("unsupported format version '" + pf.version + "'");
  }
  pf.n = root.at("n").get<int>();
  pf.d = root.at("d").get<int>();
  if (pf.n < 1 || pf.d < 1) throw ParseError("n and d must be positive");

  const json& mats = root.at("matrices");
  if (!mats.is_array() || static_cast<int>(mats.size()) != pf.n) {
    throw ParseError("field 'matrices' must hold exactly n matrices");
  }
  for (int i = 0; i < pf.n; ++i) {
    const std::string what = "matrix " + std::to_string(i + 1);
    const Eigen::MatrixXd raw = parse_nested(mats.at(i), pf.d, pf.d, what);
    const double asym = (raw - raw.transpose()).norm();
    if (asym > 1e-12) {
      pf.warnings.push_back(what + " symmetrized; asymmetry " + num17(asym));
    }
    pf.matrices.emplace_back(raw);
  }

  if (root.contains("labels")) {
    const json& labels = root.at("labels");
    if (!labels.is_array() || static_cast<int>(labels.size()) != pf.n) {
      throw ParseError("field 'labels' must hold exactly n strings");
    }
    for (const auto& l : labels) pf.labels.push_back(l.get<std::string>());
  }

  pf.criterion_spec = root.at("criterion").get<std::string>();

  if (root.contains("generalized_K")) {
    const json& krows = root.at("generalized_K");
    if (!krows.is_array() || krows.empty() || !krows.at(0).is_array()) {
      throw ParseError("field 'generalized_K' must be a d x s nested array");
    }
    const int s = static_cast<int>(krows.at(0).size());
    pf.generalized_K = parse_nested(krows, pf.d, s, "generalized_K");
  }

  // Materialize once so a file only parses when the instance invariants and
  // the criterion grammar hold.
  try {
    const DesignInstance inst = pf.instance();
    const Criterion crit = pf.criterion();
    if (crit.kind() == CriterionKind::CVector &&
        crit.c().size() != static_cast<Eigen::Index>(pf.d)) {
      throw ParseError("criterion c-vector length does not match d");
    }
    pf.generalized();
    (void)inst;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid problem: ") + e.what());
  }
  return pf;
}

}  // namespace

ProblemFile ProblemFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json_text(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string ProblemFile::to_json_text() const {
  json root;
  root["version"] = version;
  root["n"] = n;
  root["d"] = d;
  json mats = json::array();
  for (const auto& m : matrices) mats.push_back(nested_from(m.mat()));
  root["matrices"] = std::move(mats);
  if (!labels.empty()) root["labels"] = labels;
  root["criterion"] = criterion_spec;
  if (generalized_K) root["generalized_K"] = nested_from(*generalized_K);
  return root.dump(2) + "\n";
}

void ProblemFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << to_json_text();
}

DesignInstance ProblemFile::instance() const { return DesignInstance(matrices, labels); }

Criterion ProblemFile::criterion() const { return Criterion::parse(criterion_spec); }

std::optional<GeneralizedSpec> ProblemFile::generalized() const {
  if (!generalized_K) return std::nullopt;
  return GeneralizedSpec(*generalized_K);
}

ProblemFile ProblemFile::from_parts(const DesignInstance& inst, const Criterion& crit,
                                    const GeneralizedSpec* spec) {
  ProblemFile pf;
  pf.n = inst.n();
  pf.d = static_cast<int>(inst.d());
  pf.matrices = inst.matrices();
  pf.labels = inst.labels();
  pf.criterion_spec = crit.spec_string();
  if (spec) pf.generalized_K = spec->K();
  return pf;
}

std::string solver_mode_name(SolverMode mode) {
  return mode == SolverMode::Strict ? "strict" : "generalized";
}

std::string guard_name(MonotonicityGuard guard) {
  switch (guard) {
    case MonotonicityGuard::Off:
      return "off";
    case MonotonicityGuard::Warn:
      return "warn";
    case MonotonicityGuard::Fail:
      return "fail";
  }
  return "?";
}

std::string trace_csv_body(const RunResult& result) {
  std::string out;
  const int n = result.final_w.n();
  out += "k";
  for (int i = 1; i <= n; ++i) out += ",w" + std::to_string(i);
  out += ",f,gap_bound,step_l1,events\n";
  for (const auto& rec : result.trace) {
    out += std::to_string(rec.k);
    for (int i = 0; i < n; ++i) out += "," + num17(rec.w[i]);
    out += "," + num17(rec.f);
    out += ",";
    if (rec.gap_bound) out += num17(*rec.gap_bound);
    out += "," + num17(rec.step_l1);
    out += ",";
    for (size_t e = 0; e < rec.events.size(); ++e) {
      if (e > 0) out += ";";
      out += rec.events[e].to_string();
    }
    out += "\n";
  }
  return out;
}

void write_trace_csv(std::ostream& os, const RunResult& result, const TraceMeta& meta) {
  json config;
  config["lambda"] = meta.config.lambda;
  config["max_iter"] = meta.config.max_iter;
  config["gap_tol"] = meta.config.gap_tol;
  config["step_tol"] = meta.config.step_tol;
  config["mode"] = solver_mode_name(meta.config.mode);
  config["guard"] = guard_name(meta.config.guard);
  config["deep_diagnostics"] = meta.config.deep_diagnostics;
  config["cycle_window"] = meta.config.cycle_window;
  config["seed"] = meta.seed;

  json final_w = json::array();
  for (int i = 0; i < result.final_w.n(); ++i) final_w.push_back(result.final_w[i]);

  os << "# madesign-trace v1\n";
  os << "# problem: " << meta.problem << "\n";
  os << "# criterion: " << meta.criterion << "\n";
  os << "# config: " << config.dump() << "\n";
  os << "# verdict: " << result.verdict.to_string() << "\n";
  os << "# final_w: " << final_w.dump() << "\n";
  os << "# wall_time_s: " << num17(meta.wall_seconds) << "\n";
  os << trace_csv_body(result);
}

}  // namespace madesign

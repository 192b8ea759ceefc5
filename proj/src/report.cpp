#include "nk/report.hpp"

#include <cstdio>

#include <Eigen/Core>

#include "nk/errors.hpp"

namespace nk {

std::string version_string() {
  return "nk 1.0.0; eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"config_path", m.config_path},
          {"subcommand", m.subcommand},
          {"seed", m.seed},
          {"output_dir", m.output_dir},
          {"versions", m.versions}};
}

nlohmann::json to_json(const SolveReport& r) {
  std::vector<double> solution(r.solution.values.data(), r.solution.values.data() + r.solution.values.size());
  return {{"branch", to_string(r.branch)},
          {"lambda", r.lambda},
          {"energy", r.energy},
          {"residual", r.residual},
          {"norm", r.norm},
          {"branch_sign", r.branch_sign},
          {"nehari_class", to_string(r.nehari_class)},
          {"m_value", r.m_value},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"floor_sensitivity", r.floor_sensitivity},
          {"mesh_nodes", r.solution.mesh.nodes()},
          {"solution", solution}};
}

nlohmann::json to_json(const Thresholds& t) {
  return {{"lambda_star", t.lambda_star}, {"lambda_dstar", t.lambda_dstar}, {"lambda_tstar", t.lambda_tstar},
          {"eta0", t.eta0},               {"eta_lambda", t.eta_lambda},     {"c_level", t.c_level},
          {"S_p", t.S_p},                 {"coercivity_C", t.coercivity_C}, {"s_m", t.s_m}};
}

nlohmann::json to_json(const SobolevEstimate& s) {
  return {{"S_p", s.value},
          {"descent_value", s.descent_value},
          {"family_value", s.family_value},
          {"family_epsilon", s.family_epsilon},
          {"iterations", s.iterations}};
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw Error(ErrorKind::InvalidParameter, "csv row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << csv_number(values[i]);
  os_ << '\n';
}

void write_trace_csv(std::ostream& os, const SolveReport& r) {
  CsvWriter w(os, {"iteration", "energy", "residual", "step", "ekeland_tol"});
  for (const TraceEntry& e : r.trace) w.row({double(e.iteration), e.energy, e.residual, e.step, e.ekeland_tol});
}

void write_extremal_csv(std::ostream& os, const std::vector<ExtremalSample>& samples) {
  CsvWriter w(os, {"epsilon", "seminorm", "lp_p", "lpstar", "quotient"});
  for (const ExtremalSample& s : samples) w.row({s.epsilon, s.seminorm, s.lp_p, s.lpstar, s.quotient});
}

}  // namespace nk

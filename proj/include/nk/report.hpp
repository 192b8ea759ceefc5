#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nk/extremal.hpp"
#include "nk/solver.hpp"
#include "nk/thresholds.hpp"

namespace nk {

struct RunManifest {
  std::string config_path;
  std::string subcommand;
  std::uint64_t seed = 42;
  std::string output_dir;
  std::string versions;
};

std::string version_string();

nlohmann::json to_json(const RunManifest& m);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const Thresholds& t);
nlohmann::json to_json(const SobolevEstimate& s);

// Scientific notation, 17 significant digits.
std::string csv_number(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

void write_trace_csv(std::ostream& os, const SolveReport& r);
void write_extremal_csv(std::ostream& os, const std::vector<ExtremalSample>& samples);

}  // namespace nk

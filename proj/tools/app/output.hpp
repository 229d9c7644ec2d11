#pragma once
// CSV tables and JSON run manifests shared by the subcommands.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <string>
#include <variant>
#include <vector>

#include "u1lab/gate.hpp"

namespace u1lab::app {

struct Globals {
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  bool seedless = false;
  TauUnits tau_units = TauUnits::quarter_pi;
};

using Cell = std::variant<double, long long, std::string>;

/// Comma-separated table with a header row; floats carry 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string format_double(double v);

/// Collects the outputs and warnings of one subcommand and writes
/// <subcommand>.manifest.json next to them.
class Run {
 public:
  Run(const Globals& g, std::string subcommand, nlohmann::json config);

  const Globals& globals() const { return globals_; }
  std::filesystem::path file(const std::string& name);
  CsvWriter csv(const std::string& name, const std::vector<std::string>& header);
  void warn(const std::string& message);
  void record(const std::string& key, nlohmann::json value);
  const std::vector<std::string>& outputs() const { return outputs_; }

  /// Writes the manifest; returns its path.
  std::filesystem::path finish();

 private:
  Globals globals_;
  std::string subcommand_;
  nlohmann::json config_;
  nlohmann::json results_ = nlohmann::json::object();
  std::vector<std::string> outputs_;
  std::vector<std::string> warnings_;
  std::chrono::steady_clock::time_point start_;
};

nlohmann::json to_json(const GateParams& p);

}  // namespace u1lab::app

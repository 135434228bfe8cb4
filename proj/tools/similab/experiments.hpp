#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace similab::cli {

/// Wall-clock budget overrun; reported like any runtime abort (exit code 3).
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::initializer_list<double> row) { rows.emplace_back(row); }
  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

struct Bundle {
  std::string experiment;
  nlohmann::ordered_json config;   ///< resolved settings, defaults included
  nlohmann::ordered_json summary;
  std::vector<Series> series;
  double wall_seconds = 0.0;
};

struct RunContext {
  std::uint64_t seed = 1;
  std::size_t paths = 1;
  unsigned threads = 1;
  std::chrono::steady_clock::time_point deadline;

  void check_deadline() const;
};

struct Param {
  std::string key;
  std::string value;  ///< default
  std::string help;
};

struct Experiment {
  std::string name;
  std::string description;
  double budget_seconds = 300.0;
  std::string default_paths;
  std::vector<Param> params;
  std::function<Bundle(const Config&, const RunContext&)> run;
};

const std::vector<Experiment>& registry();
const Experiment& find_experiment(const std::string& name);

/// Defaults merged under the user's settings.  Unknown keys and malformed
/// common keys raise ConfigError before anything runs.
Config resolve(const Experiment& exp, const Config& user);

Bundle run_experiment(const Config& user);

/// metadata.json plus one <series>.csv per table, floats at 17 significant digits.
void write_bundle(const Bundle& b, const std::filesystem::path& dir);

std::string code_version();

}  // namespace similab::cli

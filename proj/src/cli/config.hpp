#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nemlab/continuous_market.hpp"
#include "nemlab/simulate.hpp"
#include "nemlab/spin_market.hpp"
#include "nemlab/xy_market.hpp"

namespace nemlab::cli {

/// Raised for anything the user can fix: bad flags, files, preconditions.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One swept parameter, `param=start:stop:step`.
struct GridAxis {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

GridAxis parse_grid_spec(std::string_view spec);

/// Flat key=value file; blank lines and `#` comments are skipped.
std::map<std::string, std::string> parse_config_file(const std::string& path);

enum class OutputFormat { csv, json };

struct RunConfig {
  std::string subcommand;
  std::string model = "discrete";

  double q = 1.0;
  double beta = 1.0;
  double j = 0.0;
  double l = 0.0;
  double mu = 0.0;
  int n = 1;
  double lambda = 1.0;
  double m0 = 0.5;
  double field = 0.0;
  double magnitude = 1.0;
  double holding_cost = 0.0;
  double y_max = 1.0;
  std::string contrarian = "abs";
  std::string averaging = "escort";
  std::string counts = "escort";
  std::string domain = "half";
  std::string holding = "linear";
  int quad_order = 16;

  std::vector<GridAxis> grid;

  std::size_t steps = 1000;
  double rho = 0.0;
  double innovation = 0.0;
  double h0 = 0.0;
  double x0 = 0.0;
  std::string price_mode = "relative";
  std::size_t replicas = 1;

  std::string input;
  std::string column;
  std::string report;

  std::string out;
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 0;
  int threads = 1;

  ModelParams discrete_params() const;
  XYParams xy_params() const;
  JointParams joint_params() const;
  SimConfig sim_config() const;

  /// Checks every module precondition the subcommand depends on. Throws
  /// InvalidInput naming the violated condition.
  void validate() const;
};

/// Keys accepted both as `--key` flags and in config files.
const std::vector<std::string>& config_keys();

/// Applies one key=value pair. Throws InvalidInput on unknown keys or
/// unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Layers defaults, then the config file, then explicit flags.
RunConfig resolve_config(const std::string& subcommand,
                         const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& flag_values,
                         std::optional<std::string> threads_env);

}  // namespace nemlab::cli

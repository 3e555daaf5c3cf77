#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nemlab/csv.hpp"

namespace nemlab::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  const auto v = parse_number(value);
  if (!v || !std::isfinite(*v)) throw InvalidInput(key + ": expected a finite number, got '" + value + "'");
  return *v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  Int out{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw InvalidInput(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

std::string one_of(const std::string& key, const std::string& value,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return value;
  }
  std::string msg = key + ": expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw InvalidInput(msg + ", got '" + value + "'");
}

}  // namespace

std::vector<double> GridAxis::values() const {
  const std::size_t count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

GridAxis parse_grid_spec(std::string_view spec) {
  const std::string text = trim(spec);
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidInput("grid spec must look like param=start:stop:step, got '" + text + "'");
  }
  GridAxis axis;
  axis.param = trim(std::string_view(text).substr(0, eq));
  const std::string range = text.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(range);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (range.empty() || range.back() == ':') parts.emplace_back();
  if (parts.size() != 3) {
    throw InvalidInput("grid spec must look like param=start:stop:step, got '" + text + "'");
  }
  auto num = [&](const std::string& p, const char* what) {
    const auto v = parse_number(p);
    if (!v || !std::isfinite(*v)) {
      throw InvalidInput(std::string("grid spec '") + text + "': bad " + what);
    }
    return *v;
  };
  axis.start = num(parts[0], "start");
  axis.stop = num(parts[1], "stop");
  axis.step = num(parts[2], "step");
  if (!(axis.step > 0.0)) throw InvalidInput("grid spec '" + text + "': step must be > 0");
  if (axis.stop < axis.start) throw InvalidInput("grid spec '" + text + "': stop < start");
  if ((axis.stop - axis.start) / axis.step > 1e6) {
    throw InvalidInput("grid spec '" + text + "': more than 1e6 points");
  }
  return axis;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model",    "q",         "beta",     "J",          "L",      "mu",     "N",
      "lambda",   "m0",        "field",    "y",          "c",      "ymax",   "contrarian",
      "averaging", "counts",   "domain",   "holding",    "quad-order", "grid", "T",
      "rho",      "s",         "h0",       "x0",         "price-mode", "replicas", "input",
      "column",   "report",    "out",      "format",     "seed",   "threads"};
  return keys;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "model") c.model = one_of(key, value, {"discrete", "xy", "joint"});
  else if (key == "q") c.q = to_double(key, value);
  else if (key == "beta") c.beta = to_double(key, value);
  else if (key == "J") c.j = to_double(key, value);
  else if (key == "L") c.l = to_double(key, value);
  else if (key == "mu") c.mu = to_double(key, value);
  else if (key == "N") c.n = to_integer<int>(key, value);
  else if (key == "lambda") c.lambda = to_double(key, value);
  else if (key == "m0") c.m0 = to_double(key, value);
  else if (key == "field") c.field = to_double(key, value);
  else if (key == "y") c.magnitude = to_double(key, value);
  else if (key == "c") c.holding_cost = to_double(key, value);
  else if (key == "ymax") c.y_max = to_double(key, value);
  else if (key == "contrarian") c.contrarian = one_of(key, value, {"abs", "linear"});
  else if (key == "averaging") c.averaging = one_of(key, value, {"escort", "unnormalized"});
  else if (key == "counts") c.counts = one_of(key, value, {"escort", "ordinary"});
  else if (key == "domain") c.domain = one_of(key, value, {"half", "full"});
  else if (key == "holding") c.holding = one_of(key, value, {"linear", "quadratic"});
  else if (key == "quad-order") c.quad_order = to_integer<int>(key, value);
  else if (key == "grid") {
    c.grid.clear();
    std::stringstream ss(value);
    std::string spec;
    while (std::getline(ss, spec, ';')) {
      if (!trim(spec).empty()) c.grid.push_back(parse_grid_spec(spec));
    }
  }
  else if (key == "T") c.steps = to_integer<std::size_t>(key, value);
  else if (key == "rho") c.rho = to_double(key, value);
  else if (key == "s") c.innovation = to_double(key, value);
  else if (key == "h0") c.h0 = to_double(key, value);
  else if (key == "x0") c.x0 = to_double(key, value);
  else if (key == "price-mode") c.price_mode = one_of(key, value, {"relative", "level"});
  else if (key == "replicas") c.replicas = to_integer<std::size_t>(key, value);
  else if (key == "input") c.input = value;
  else if (key == "column") c.column = value;
  else if (key == "report") c.report = value;
  else if (key == "out") c.out = value;
  else if (key == "format") {
    c.format = one_of(key, value, {"csv", "json"}) == "csv" ? OutputFormat::csv : OutputFormat::json;
  }
  else if (key == "seed") c.seed = to_integer<std::uint64_t>(key, value);
  else if (key == "threads") c.threads = to_integer<int>(key, value);
  else throw InvalidInput("unknown setting '" + key + "'");
}

RunConfig resolve_config(const std::string& subcommand,
                         const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& flag_values,
                         std::optional<std::string> threads_env) {
  RunConfig c;
  c.subcommand = subcommand;
  if (threads_env && !threads_env->empty()) apply_setting(c, "threads", *threads_env);
  for (const auto& [k, v] : file_values) apply_setting(c, k, v);
  for (const auto& [k, v] : flag_values) apply_setting(c, k, v);
  return c;
}

ModelParams RunConfig::discrete_params() const {
  ModelParams p;
  p.j_coupling = j;
  p.l_coupling = l;
  p.mu = mu;
  p.n_investors = n;
  p.market_depth = lambda;
  p.qp = {q, beta};
  p.field = field;
  p.contrarian = contrarian == "abs" ? ContrarianForm::abs_bias : ContrarianForm::linear;
  p.averaging = averaging == "escort" ? Averaging::escort : Averaging::unnormalized;
  p.counts = counts == "escort" ? CountWeights::escort : CountWeights::ordinary;
  return p;
}

XYParams RunConfig::xy_params() const {
  XYParams p;
  p.j_coupling = j;
  p.magnitude = magnitude;
  p.n_investors = n;
  p.market_depth = lambda;
  p.qp = {q, beta};
  p.field = field;
  p.domain = domain == "half" ? AngleDomain::half_circle : AngleDomain::full_circle;
  p.quad.initial_order = quad_order;
  return p;
}

JointParams RunConfig::joint_params() const {
  JointParams p;
  p.j_coupling = j;
  p.l_coupling = l;
  p.mu = mu;
  p.holding_cost = holding_cost;
  p.y_max = y_max;
  p.n_investors = n;
  p.market_depth = lambda;
  p.qp = {q, beta};
  p.field = field;
  p.holding = holding == "linear" ? HoldingCost::linear : HoldingCost::quadratic;
  p.quad.initial_order = quad_order;
  return p;
}

SimConfig RunConfig::sim_config() const {
  SimConfig s;
  s.model = model == "discrete" ? ModelKind::discrete
            : model == "xy"     ? ModelKind::xy
                                : ModelKind::joint;
  s.discrete = discrete_params();
  s.discrete.field = 0.0;
  s.xy = xy_params();
  s.xy.field = 0.0;
  s.joint = joint_params();
  s.joint.field = 0.0;
  s.steps = steps;
  s.seed = seed;
  s.field = {rho, innovation, h0};
  s.x0 = x0;
  s.m0 = m0;
  s.price_mode = price_mode == "relative" ? PriceMode::relative : PriceMode::level;
  return s;
}

void RunConfig::validate() const {
  try {
    if (threads < 1) throw InvalidInput("threads must be >= 1");
    if (subcommand == "fit") {
      if (input.empty()) throw InvalidInput("fit needs --input PATH");
      std::ifstream probe(input);
      if (!probe) throw InvalidInput("cannot open input file: " + input);
      return;
    }
    if (!(std::abs(m0) <= 1.0)) throw InvalidInput("m0 must satisfy |m0| <= 1");
    if (model == "discrete") discrete_params().validate();
    else if (model == "xy") xy_params().validate();
    else joint_params().validate();

    if (subcommand == "sweep") {
      if (grid.empty() || grid.size() > 2) {
        throw InvalidInput("sweep needs one or two --grid param=start:stop:step specs");
      }
      static const std::vector<std::string> sweepable = {"q", "beta", "J", "L", "mu", "N",
                                                         "lambda", "field", "y", "c", "ymax"};
      for (const GridAxis& axis : grid) {
        if (std::find(sweepable.begin(), sweepable.end(), axis.param) == sweepable.end()) {
          throw InvalidInput("cannot sweep parameter '" + axis.param + "'");
        }
      }
      if (grid.size() == 2 && grid[0].param == grid[1].param) {
        throw InvalidInput("sweep axes must name different parameters");
      }
    }
    if (subcommand == "simulate") {
      if (replicas < 1) throw InvalidInput("replicas must be >= 1");
      sim_config().validate();
    }
  } catch (const std::domain_error& e) {
    throw InvalidInput(e.what());
  }
}

}  // namespace nemlab::cli

#include "cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nemlab/csv.hpp"
#include "nemlab/errors.hpp"
#include "nemlab/fit.hpp"

namespace nemlab::cli {
namespace {

const char* const kSolveColumns[] = {"model", "q", "beta", "J", "L", "mu", "m_star", "z_q",
                                     "active_fraction", "price_change", "converged", "iterations"};

SolveRow row_from(const RunConfig& c, const MeanFieldSolution& s) {
  return {c.model, c.q, c.beta, c.j, c.l, c.mu, s.m_star, s.distribution.z_q,
          s.active_fraction, s.price_change, s.converged, s.iterations};
}

SolveRow row_from(const RunConfig& c, const XYSolution& s) {
  // Every XY investor trades with some orientation.
  return {c.model, c.q, c.beta, c.j, c.l, c.mu, s.m_star, s.distribution.z_q,
          1.0, s.price_change, s.converged, s.iterations};
}

SolveRow row_from(const RunConfig& c, const JointSolution& s) {
  return {c.model, c.q, c.beta, c.j, c.l, c.mu, s.m_star, s.z_q(),
          s.active_fraction(), s.price_change, s.converged, s.iterations};
}

// Cells of one row, in kSolveColumns order.
std::vector<std::string> cells(const SolveRow& r) {
  return {r.model,
          format_number(r.q),
          format_number(r.beta),
          format_number(r.j),
          format_number(r.l),
          format_number(r.mu),
          format_number(r.m_star),
          format_number(r.z_q),
          format_number(r.active_fraction),
          format_number(r.price_change),
          r.converged ? "true" : "false",
          std::to_string(r.iterations)};
}

nlohmann::json number_json(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json row_json(const SolveRow& r) {
  nlohmann::json j;
  j["model"] = r.model;
  j["q"] = number_json(r.q);
  j["beta"] = number_json(r.beta);
  j["J"] = number_json(r.j);
  j["L"] = number_json(r.l);
  j["mu"] = number_json(r.mu);
  j["m_star"] = number_json(r.m_star);
  j["z_q"] = number_json(r.z_q);
  j["active_fraction"] = number_json(r.active_fraction);
  j["price_change"] = number_json(r.price_change);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  return j;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
  out << '\n';
}

// Output goes to --out when given, else to the command's stdout.
class Sink {
 public:
  Sink(const RunConfig& c, std::ostream& fallback) : stream_(&fallback) {
    if (!c.out.empty()) {
      file_ = std::make_unique<std::ofstream>(c.out);
      if (!*file_) throw InvalidInput("cannot open output file: " + c.out);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

bool is_solve_column(const std::string& p) {
  return p == "q" || p == "beta" || p == "J" || p == "L" || p == "mu";
}

}  // namespace

SolveRow solve_row(const RunConfig& c) {
  if (c.model == "discrete") return row_from(c, self_consistent_bias(c.discrete_params(), c.m0));
  if (c.model == "xy") return row_from(c, solve_order_parameter(c.xy_params(), c.m0));
  return row_from(c, solve_joint(c.joint_params(), c.m0));
}

SolveRow branch_row(const RunConfig& c) {
  if (c.model == "discrete") return row_from(c, positive_branch(c.discrete_params()));
  if (c.model == "xy") return row_from(c, xy_positive_branch(c.xy_params()));
  return row_from(c, joint_positive_branch(c.joint_params()));
}

int run_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SolveRow row = solve_row(c);
  Sink sink(c, out);
  if (c.format == OutputFormat::csv) {
    write_csv_row(sink.get(), {std::begin(kSolveColumns), std::end(kSolveColumns)});
    write_csv_row(sink.get(), cells(row));
  } else {
    sink.get() << nlohmann::json::array({row_json(row)}).dump(2) << '\n';
  }
  if (!row.converged) {
    err << "warning: fixed point did not converge (residual above tolerance)\n";
    return kNotConverged;
  }
  return kOk;
}

int run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::vector<std::vector<double>> axes;
  for (const GridAxis& a : c.grid) axes.push_back(a.values());
  std::vector<std::vector<double>> points;
  if (axes.size() == 1) {
    for (double v : axes[0]) points.push_back({v});
  } else {
    for (double a : axes[0]) {
      for (double b : axes[1]) points.push_back({a, b});
    }
  }

  std::vector<std::string> prefix;
  for (const GridAxis& a : c.grid) {
    if (!is_solve_column(a.param)) prefix.push_back(a.param);
  }

  Sink sink(c, out);
  std::ostream& o = sink.get();
  nlohmann::json rows = nlohmann::json::array();
  if (c.format == OutputFormat::csv) {
    std::vector<std::string> header = prefix;
    header.insert(header.end(), std::begin(kSolveColumns), std::end(kSolveColumns));
    write_csv_row(o, header);
  }

  std::size_t failures = 0;
  for (const auto& point : points) {
    RunConfig local = c;
    for (std::size_t i = 0; i < point.size(); ++i) {
      // N is an integer; everything else is set through the normal parser.
      const std::string text = c.grid[i].param == "N"
                                   ? std::to_string(static_cast<long long>(std::llround(point[i])))
                                   : format_number(point[i]);
      apply_setting(local, c.grid[i].param, text);
    }
    SolveRow row;
    try {
      local.validate();
      row = branch_row(local);
    } catch (const std::exception& e) {
      err << "warning: sweep point";
      for (std::size_t i = 0; i < point.size(); ++i) {
        err << ' ' << c.grid[i].param << '=' << format_number(point[i]);
      }
      err << " failed: " << e.what() << '\n';
      row = {local.model, local.q, local.beta, local.j, local.l, local.mu,
             std::nan(""), std::nan(""), std::nan(""), std::nan(""), false, 0};
    }
    if (!row.converged) ++failures;

    if (c.format == OutputFormat::csv) {
      std::vector<std::string> line;
      for (std::size_t i = 0; i < point.size(); ++i) {
        if (!is_solve_column(c.grid[i].param)) line.push_back(format_number(point[i]));
      }
      const auto rest = cells(row);
      line.insert(line.end(), rest.begin(), rest.end());
      write_csv_row(o, line);
    } else {
      nlohmann::json j = row_json(row);
      for (std::size_t i = 0; i < point.size(); ++i) {
        if (!is_solve_column(c.grid[i].param)) j[c.grid[i].param] = point[i];
      }
      rows.push_back(std::move(j));
    }
  }
  if (c.format == OutputFormat::json) o << rows.dump(2) << '\n';
  return failures == 0 ? kOk : kNotConverged;
}

int run_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SimConfig sim = c.sim_config();
  const std::vector<PriceSeries> runs = run_ensemble(sim, c.replicas, c.threads);

  Sink sink(c, out);
  std::ostream& o = sink.get();
  const bool tag = c.replicas > 1;
  if (c.format == OutputFormat::csv) {
    if (!tag) {
      write_series_csv(o, runs.front());
    } else {
      o << "replica,t,x,dx,demand,field\n";
      for (std::size_t k = 0; k < runs.size(); ++k) {
        const PriceSeries& s = runs[k];
        for (std::size_t i = 0; i < s.size(); ++i) {
          o << k << ',' << s.t[i] << ',' << format_number(s.x[i]) << ','
            << format_number(s.dx[i]) << ',' << format_number(s.demand[i]) << ','
            << format_number(s.field[i]) << '\n';
        }
      }
    }
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const PriceSeries& s = runs[k];
      for (std::size_t i = 0; i < s.size(); ++i) {
        nlohmann::json j;
        if (tag) j["replica"] = k;
        j["t"] = s.t[i];
        j["x"] = number_json(s.x[i]);
        j["dx"] = number_json(s.dx[i]);
        j["demand"] = number_json(s.demand[i]);
        j["field"] = number_json(s.field[i]);
        rows.push_back(std::move(j));
      }
    }
    o << rows.dump() << '\n';
  }

  std::size_t failed = 0;
  std::size_t total = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    total += runs[k].size();
    failed += runs[k].failed_steps.size();
    if (!runs[k].failed_steps.empty()) {
      err << "warning: replica " << k << ": " << runs[k].failed_steps.size() << " of "
          << runs[k].size() << " steps reused the previous equilibrium\n";
    }
  }
  // Strictly below one percent of all steps is tolerated.
  return failed * 100 < total ? kOk : kNotConverged;
}

int run_fit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::vector<double> samples;
  try {
    samples = read_csv_column(c.input, c.column);
  } catch (const std::runtime_error& e) {
    throw InvalidInput(e.what());
  }
  FitResult fit;
  try {
    fit = fit_qgaussian(samples);
  } catch (const std::domain_error& e) {
    throw InvalidInput(e.what());
  }

  Sink sink(c, out);
  if (c.format == OutputFormat::csv) {
    sink.get() << "q_hat,beta_hat,loc,loglik,ks,n\n"
               << format_number(fit.q_hat) << ',' << format_number(fit.beta_hat) << ','
               << format_number(fit.loc) << ',' << format_number(fit.loglik) << ','
               << format_number(fit.ks_stat) << ',' << fit.n << '\n';
  } else {
    nlohmann::json j;
    j["q_hat"] = number_json(fit.q_hat);
    j["beta_hat"] = number_json(fit.beta_hat);
    j["loc"] = number_json(fit.loc);
    j["loglik"] = number_json(fit.loglik);
    j["ks"] = number_json(fit.ks_stat);
    j["n"] = fit.n;
    sink.get() << nlohmann::json::array({j}).dump(2) << '\n';
  }

  std::ostringstream report;
  report << "q-Gaussian maximum-likelihood fit\n"
         << "  input        " << c.input << (c.column.empty() ? "" : " [" + c.column + "]") << '\n'
         << "  samples      " << fit.n << '\n'
         << "  q_hat        " << format_number(fit.q_hat) << '\n'
         << "  beta_hat     " << format_number(fit.beta_hat) << '\n'
         << "  location     " << format_number(fit.loc) << '\n'
         << "  loglik       " << format_number(fit.loglik) << '\n'
         << "  KS distance  " << format_number(fit.ks_stat) << '\n';
  if (fit.q_hat > 1.0 && fit.q_hat < 3.0) {
    report << "  Student-t nu " << format_number((3.0 - fit.q_hat) / (fit.q_hat - 1.0)) << '\n';
  }
  if (fit.clamped) report << "  note: q_hat sits on the Gaussian boundary q = 1\n";
  if (!fit.converged) report << "  note: optimizer hit its evaluation budget\n";

  if (!c.report.empty()) {
    std::ofstream f(c.report);
    if (!f) throw InvalidInput("cannot open report file: " + c.report);
    f << report.str();
  } else {
    err << report.str();
  }
  return fit.converged ? kOk : kNotConverged;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonextensive mean-field market models", "nemlab"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::map<std::string, std::string> flag_text;
  std::map<std::string, CLI::Option*> flag_opts;
  std::vector<std::string> grid_specs;
  std::string config_path;
  app.add_option("--config", config_path, "key=value parameter file");
  for (const std::string& key : config_keys()) {
    if (key == "grid") continue;
    flag_opts[key] = app.add_option("--" + key, flag_text[key]);
  }
  CLI::Option* grid_opt =
      app.add_option("--grid", grid_specs, "param=start:stop:step (sweep, repeatable)");

  app.add_subcommand("solve", "Solve one self-consistent equilibrium");
  app.add_subcommand("sweep", "Positive branch over a parameter grid");
  app.add_subcommand("simulate", "Simulate a price series");
  app.add_subcommand("fit", "Fit a q-Gaussian to a sample");

  std::vector<std::string> argv_store = {"nemlab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    std::map<std::string, std::string> flags;
    for (const auto& [key, opt] : flag_opts) {
      if (opt->count() > 0) flags[key] = flag_text[key];
    }
    if (grid_opt->count() > 0) {
      std::string joined;
      for (const auto& g : grid_specs) joined += g + ";";
      flags["grid"] = joined;
    }
    std::map<std::string, std::string> file;
    if (!config_path.empty()) file = parse_config_file(config_path);

    std::optional<std::string> env;
    if (const char* t = std::getenv("NEMLAB_THREADS")) env = std::string(t);

    const std::string sub = app.get_subcommands().front()->get_name();
    const RunConfig config = resolve_config(sub, file, flags, env);
    config.validate();

    if (sub == "solve") return run_solve(config, out, err);
    if (sub == "sweep") return run_sweep(config, out, err);
    if (sub == "simulate") return run_simulate(config, out, err);
    return run_fit(config, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  }
}

}  // namespace nemlab::cli

#include "cfaudit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cfaudit/config.hpp"
#include "cfaudit/presets.hpp"

namespace cfaudit {

namespace {

int exit_code_for(EndReason r) {
  switch (r) {
    case EndReason::Completed: return 0;
    case EndReason::Healed: return 2;
    case EndReason::HorizonExceeded: return 3;
  }
  return 1;
}

void apply_env_seed(ExperimentConfig& cfg) {
  const char* s = std::getenv("CFAUDIT_SEED");
  if (!s || !*s) return;
  try {
    size_t pos = 0;
    cfg.sim.seed = std::stoull(std::string(s), &pos, 0);
    if (pos != std::string(s).size())
      throw std::invalid_argument("trailing chars");
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("CFAUDIT_SEED is not an integer: ") + s);
  }
}

// Runs the session plus, for protocol modes, the matching best-effort
// baseline so overhead_vs_baseline is populated.
RunResult run_with_overhead(const SimConfig& cfg) {
  RunResult r = run_simulation(cfg);
  if (cfg.mode != Mode::BestEffort) {
    SimConfig base = cfg;
    base.mode = Mode::BestEffort;
    RunResult b = run_simulation(base);
    r.metrics.overhead_vs_baseline = compute_overhead(r.metrics, b.metrics);
  }
  return r;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string run_summary(const SimConfig& cfg, const RunResult& r) {
  std::ostringstream os;
  os << "preset=" << cfg.preset_name << " mode=" << mode_name(cfg.mode)
     << " cf_size=" << cfg.cf_size << " seed=" << cfg.seed
     << " end=" << end_reason_name(r.reason)
     << " total=" << format_double(r.metrics.total_runtime) << "s"
     << " utilization=" << format_double(r.metrics.utilization)
     << " overhead=" << format_double(r.metrics.overhead_vs_baseline) << "%"
     << " t4=" << r.metrics.trigger_counts[3];
  return os.str();
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    size_t a = cur.find_first_not_of(" \t");
    size_t b = cur.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

double numeric_value(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return d;
  } catch (const std::exception&) {
    throw ParseError(0, "sweep value '" + v + "' for key '" + key +
                            "' is not a number");
  }
}

void apply_sweep_value(SimConfig& cfg, const std::string& key,
                       const std::string& v) {
  if (key == "cf_size") {
    cfg.cf_size = static_cast<uint32_t>(numeric_value(key, v));
  } else if (key == "branch_rate") {
    cfg.workload.branch_rate = numeric_value(key, v);
  } else if (key == "rtt_ms") {
    cfg.link.rtt_ns = std::llround(numeric_value(key, v) * 1e6);
  } else if (key == "mac_rate") {
    cfg.tcb.mac_rate = numeric_value(key, v);
  } else if (key == "mode") {
    std::string m = v;
    for (char& c : m)
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (m == "besteffort" || m == "best-effort" || m == "best_effort")
      cfg.mode = Mode::BestEffort;
    else if (m == "acfa")
      cfg.mode = Mode::Acfa;
    else if (m == "caramel")
      cfg.mode = Mode::Caramel;
    else
      throw UnknownValueError(0, "mode", v);
  } else {
    throw ParseError(0, "unknown sweep key '" + key +
                            "' (expected cf_size, branch_rate, rtt_ms, "
                            "mac_rate, or mode)");
  }
}

}  // namespace

int cmd_run(const std::string& cfg_path) {
  try {
    ExperimentConfig cfg = parse_config_file(cfg_path);
    apply_env_seed(cfg);
    RunResult r = run_with_overhead(cfg.sim);

    std::ostringstream csv;
    csv << csv_header() << '\n' << csv_row(cfg.sim, r) << '\n';
    write_file(cfg.out + ".csv", csv.str());

    std::ostringstream tr;
    r.trace.write(tr);
    write_file(cfg.out + ".trace", tr.str());

    std::cout << run_summary(cfg.sim, r) << "\n"
              << "wrote " << cfg.out << ".csv and " << cfg.out << ".trace\n";
    return exit_code_for(r.reason);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_sweep(const std::string& cfg_path, const std::string& key,
              const std::string& values_csv) {
  try {
    ExperimentConfig cfg = parse_config_file(cfg_path);
    apply_env_seed(cfg);

    std::vector<std::string> values = split_csv_list(values_csv);
    if (values.empty()) throw ParseError(0, "sweep: empty value list");
    if (key != "mode") {
      // Rows come out ordered by the swept value.
      std::stable_sort(values.begin(), values.end(),
                       [&](const std::string& a, const std::string& b) {
                         return numeric_value(key, a) < numeric_value(key, b);
                       });
    }

    std::ostringstream csv, plot;
    csv << csv_header() << '\n';
    plot << "# " << key << " total_runtime_s utilization overhead_pct t4\n";
    int exit_code = 0;
    for (const std::string& v : values) {
      SimConfig one = cfg.sim;
      apply_sweep_value(one, key, v);
      RunResult r = run_with_overhead(one);
      csv << csv_row(one, r) << '\n';
      plot << v << ' ' << format_double(r.metrics.total_runtime) << ' '
           << format_double(r.metrics.utilization) << ' '
           << format_double(r.metrics.overhead_vs_baseline) << ' '
           << r.metrics.trigger_counts[3] << '\n';
      std::cout << key << "=" << v << ": " << run_summary(one, r) << '\n';
      exit_code = std::max(exit_code, exit_code_for(r.reason));
    }
    write_file(cfg.out + ".csv", csv.str());
    write_file(cfg.out + ".plot", plot.str());
    std::cout << "wrote " << cfg.out << ".csv and " << cfg.out << ".plot\n";
    return exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_calibrate(const std::string& app, double target_pct) {
  try {
    CalibrationFixed fx = preset_calibration_fixed();
    WorkloadConfig wl = calibrate_preset(app, target_pct, fx);

    const AppPreset* p = find_preset(app);
    SimConfig base_cfg =
        preset_sim_config(*p, Mode::BestEffort, fx.acfa_cf_size, fx);
    SimConfig acfa_cfg = preset_sim_config(*p, Mode::Acfa, fx.acfa_cf_size, fx);
    RunResult base = run_simulation(base_cfg);
    RunResult acfa = run_simulation(acfa_cfg);
    const double ovh = compute_overhead(acfa.metrics, base.metrics);

    std::cout << "calibrated " << p->name
              << ": branch_rate=" << format_double(wl.branch_rate)
              << " total_branches=" << wl.total_branches
              << " measured_overhead=" << format_double(ovh) << "%\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_report(const std::vector<std::string>& csv_paths) {
  try {
    std::vector<std::vector<std::string>> rows;
    for (const std::string& path : csv_paths) {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open: " + path);
      std::string line;
      bool first = true;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
          first = false;
          if (line != csv_header())
            throw std::runtime_error(path + ": unrecognized CSV header");
          continue;
        }
        rows.push_back(split_csv_list(line));
      }
    }
    if (rows.empty()) throw std::runtime_error("no data rows found");

    // Utilization gain of each row against the single-buffer run with the
    // same preset and seed, when one is present.
    std::vector<std::string> gain(rows.size(), "-");
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() < 14 || rows[i][1] == "acfa") continue;
      for (const auto& a : rows) {
        if (a.size() < 14 || a[1] != "acfa") continue;
        if (a[0] != rows[i][0] || a[3] != rows[i][3]) continue;
        double ua = std::stod(a[12]);
        double u = std::stod(rows[i][12]);
        if (ua > 0.0) gain[i] = format_double(100.0 * (u - ua) / ua);
        break;
      }
    }

    std::vector<std::string> header = split_csv_list(csv_header());
    header.push_back("util_gain_vs_acfa_pct");
    std::vector<size_t> width(header.size());
    for (size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (size_t i = 0; i < rows.size(); ++i) {
      rows[i].push_back(gain[i]);
      for (size_t c = 0; c < rows[i].size() && c < width.size(); ++c)
        width[c] = std::max(width[c], rows[i][c].size());
    }
    auto print_row = [&](const std::vector<std::string>& r) {
      for (size_t c = 0; c < r.size(); ++c)
        std::cout << (c ? "  " : "") << std::setw(static_cast<int>(width[c]))
                  << r[c];
      std::cout << '\n';
    };
    print_row(header);
    for (const auto& r : rows) print_row(r);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"deterministic control-flow auditing simulator"};
  app.require_subcommand(1);

  std::string cfg_path, sweep_key, sweep_values, cal_app;
  double cal_target = 0.0;
  std::vector<std::string> report_paths;

  CLI::App* run = app.add_subcommand("run", "execute one session");
  run->add_option("config", cfg_path, "config file (key = value lines)")
      ->required();

  CLI::App* sweep =
      app.add_subcommand("sweep", "run once per value of one swept key");
  sweep->add_option("config", cfg_path, "config file")->required();
  sweep->add_option("--key", sweep_key, "cf_size|branch_rate|rtt_ms|mac_rate|mode")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required();

  CLI::App* cal = app.add_subcommand(
      "calibrate", "fit a preset's branch rate to a target overhead");
  cal->add_option("app", cal_app, "preset name")->required();
  cal->add_option("--target", cal_target, "single-buffer overhead percent")
      ->required();

  CLI::App* rep =
      app.add_subcommand("report", "tabulate one or more result CSVs");
  rep->add_option("csv", report_paths, "CSV files from run/sweep")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (run->parsed()) return cmd_run(cfg_path);
  if (sweep->parsed()) return cmd_sweep(cfg_path, sweep_key, sweep_values);
  if (cal->parsed()) return cmd_calibrate(cal_app, cal_target);
  if (rep->parsed()) return cmd_report(report_paths);
  return 1;
}

}  // namespace cfaudit

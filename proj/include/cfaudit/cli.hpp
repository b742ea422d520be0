#pragma once

#include <string>
#include <vector>

namespace cfaudit {

// Command entry points; each returns the process exit code.
// 0 = session completed, 1 = usage/config/I-O error, 2 = heal/halt,
// 3 = horizon exceeded.
int cmd_run(const std::string& cfg_path);
int cmd_sweep(const std::string& cfg_path, const std::string& key,
              const std::string& values_csv);
int cmd_calibrate(const std::string& app, double target_pct);
int cmd_report(const std::vector<std::string>& csv_paths);

int cli_main(int argc, char** argv);

}  // namespace cfaudit

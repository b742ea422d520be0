#include "cfaudit/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "cfaudit/presets.hpp"

namespace cfaudit {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

uint64_t parse_u64(int line, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    uint64_t out = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer for '" + key + "', got '" + v + "'");
  }
}

int64_t parse_i64(int line, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    int64_t out = std::stoll(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer for '" + key + "', got '" + v + "'");
  }
}

double parse_f64(int line, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number for '" + key + "', got '" + v + "'");
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

AdvRule parse_adv(int line, const std::string& value) {
  auto tok = split_ws(value);
  if (tok.size() < 3)
    throw ParseError(line, "adv needs '<kind> <dir> <index> [args]'");
  AdvRule r;
  const std::string kind = lower(tok[0]);
  const std::string dir = lower(tok[1]);
  if (dir == "ptov")
    r.dir = Direction::PtoV;
  else if (dir == "vtop")
    r.dir = Direction::VtoP;
  else
    throw UnknownValueError(line, "adv direction", tok[1]);
  r.msg_index = parse_i64(line, "adv index", tok[2]);
  auto need = [&](size_t n, const char* what) {
    if (tok.size() < n)
      throw ParseError(line, std::string("adv ") + kind + " needs " + what);
  };
  if (kind == "drop") {
    r.kind = AdvKind::Drop;
  } else if (kind == "delay") {
    r.kind = AdvKind::Delay;
    need(4, "a delay in ms");
    r.delay_ns = std::llround(parse_f64(line, "adv delay_ms", tok[3]) * 1e6);
  } else if (kind == "tamper") {
    r.kind = AdvKind::TamperByte;
    need(4, "a byte offset");
    r.byte_offset = static_cast<uint32_t>(parse_u64(line, "adv offset", tok[3]));
    if (tok.size() > 4)
      r.xor_mask = static_cast<uint8_t>(parse_u64(line, "adv mask", tok[4]));
  } else if (kind == "forge") {
    r.kind = AdvKind::Forge;
  } else if (kind == "replay") {
    r.kind = AdvKind::Replay;
    need(4, "the history index to replay");
    r.replay_of = parse_i64(line, "adv replay_of", tok[3]);
  } else {
    throw UnknownValueError(line, "adv kind", tok[0]);
  }
  return r;
}

FaultInjection parse_fault(int line, const std::string& value) {
  auto tok = split_ws(value);
  if (tok.size() != 3)
    throw ParseError(line, "fault needs '<branch> <region> <kind>'");
  FaultInjection f;
  f.at_branch = parse_u64(line, "fault branch", tok[0]);
  const std::string region = lower(tok[1]);
  if (region == "tcb")
    f.region = ProtRegion::TcbCode;
  else if (region == "log")
    f.region = ProtRegion::LogRegion;
  else if (region == "key")
    f.region = ProtRegion::KeySlot;
  else if (region == "data")
    f.region = ProtRegion::CaramelData;
  else if (region == "uart")
    f.region = ProtRegion::CmUartConfig;
  else if (region == "other")
    f.region = ProtRegion::Other;
  else
    throw UnknownValueError(line, "fault region", tok[1]);
  const std::string kind = lower(tok[2]);
  if (kind == "read")
    f.kind = AccessKind::Read;
  else if (kind == "write")
    f.kind = AccessKind::Write;
  else
    throw UnknownValueError(line, "fault kind", tok[2]);
  return f;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (size_t hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, "expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");

    if (key == "preset") {
      const AppPreset* p = find_preset(value);
      if (!p) throw UnknownValueError(line_no, key, value);
      CalibrationFixed fx = preset_calibration_fixed();
      cfg.sim = preset_sim_config(*p, cfg.sim.mode, cfg.sim.cf_size, fx);
    } else if (key == "mode") {
      const std::string m = lower(value);
      if (m == "besteffort" || m == "best-effort" || m == "best_effort")
        cfg.sim.mode = Mode::BestEffort;
      else if (m == "acfa")
        cfg.sim.mode = Mode::Acfa;
      else if (m == "caramel")
        cfg.sim.mode = Mode::Caramel;
      else
        throw UnknownValueError(line_no, key, value);
    } else if (key == "cf_size") {
      cfg.sim.cf_size = static_cast<uint32_t>(parse_u64(line_no, key, value));
    } else if (key == "seed") {
      cfg.sim.seed = parse_u64(line_no, key, value);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "horizon_s") {
      cfg.sim.horizon_ns = parse_f64(line_no, key, value) * 1e9;
    } else if (key == "baud") {
      cfg.sim.link.baud = static_cast<uint32_t>(parse_u64(line_no, key, value));
    } else if (key == "bits_per_byte") {
      cfg.sim.link.bits_per_byte =
          static_cast<uint32_t>(parse_u64(line_no, key, value));
    } else if (key == "rtt_ms") {
      cfg.sim.link.rtt_ns = std::llround(parse_f64(line_no, key, value) * 1e6);
    } else if (key == "mac_rate") {
      cfg.sim.tcb.mac_rate = parse_f64(line_no, key, value);
    } else if (key == "dispatch_us") {
      cfg.sim.dispatch_ns = std::llround(parse_f64(line_no, key, value) * 1e3);
    } else if (key == "heal") {
      const std::string h = lower(value);
      if (h == "reset")
        cfg.sim.tcb.heal_action = HealAction::Reset;
      else if (h == "erase")
        cfg.sim.tcb.heal_action = HealAction::EraseDmem;
      else if (h == "halt")
        cfg.sim.tcb.heal_action = HealAction::Halt;
      else if (h == "update")
        cfg.sim.tcb.heal_action = HealAction::Update;
      else
        throw UnknownValueError(line_no, key, value);
    } else if (key == "aer_min") {
      uint32_t size = cfg.sim.workload.aer_max - cfg.sim.workload.aer_min;
      cfg.sim.workload.aer_min =
          static_cast<uint32_t>(parse_u64(line_no, key, value));
      cfg.sim.workload.aer_max = cfg.sim.workload.aer_min + size;
    } else if (key == "aer_size") {
      cfg.sim.workload.aer_max =
          cfg.sim.workload.aer_min +
          static_cast<uint32_t>(parse_u64(line_no, key, value));
    } else if (key == "branch_rate") {
      cfg.sim.workload.branch_rate = parse_f64(line_no, key, value);
    } else if (key == "total_branches") {
      cfg.sim.workload.total_branches = parse_u64(line_no, key, value);
    } else if (key == "edge_seed") {
      cfg.sim.workload.edge_seed = parse_u64(line_no, key, value);
    } else if (key == "path_seed") {
      cfg.sim.workload.path_seed = parse_u64(line_no, key, value);
    } else if (key == "adv") {
      cfg.sim.adversary.push_back(parse_adv(line_no, value));
    } else if (key == "fault") {
      cfg.sim.faults.push_back(parse_fault(line_no, value));
    } else {
      throw UnknownKeyError(line_no, key);
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "preset,mode,cf_size,seed,total_runtime_s,t_app_s,t_tcb_s,t_wait_s,"
         "t1,t2,t3,t4,utilization,overhead_pct";
}

std::string csv_row(const SimConfig& cfg, const RunResult& result) {
  const Metrics& m = result.metrics;
  std::ostringstream out;
  out << cfg.preset_name << ',' << mode_name(cfg.mode) << ',' << cfg.cf_size
      << ',' << cfg.seed << ',' << format_double(m.total_runtime) << ','
      << format_double(m.t_app) << ',' << format_double(m.t_tcb) << ','
      << format_double(m.t_wait) << ',' << m.trigger_counts[0] << ','
      << m.trigger_counts[1] << ',' << m.trigger_counts[2] << ','
      << m.trigger_counts[3] << ',' << format_double(m.utilization) << ','
      << format_double(m.overhead_vs_baseline);
  return out.str();
}

}  // namespace cfaudit

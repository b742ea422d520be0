#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace cfaudit {

// Deterministic event log: line format "time_ns kind payload". Payloads stick
// to fixed tokens and integers so traces hash identically across platforms.
struct TraceEvent {
  int64_t t_ns = 0;
  std::string kind;
  std::string payload;
};

class Trace {
 public:
  void emit(int64_t t_ns, std::string kind, std::string payload = "");

  const std::vector<TraceEvent>& events() const { return events_; }

  // FNV-1a 64 over the canonical line rendering.
  uint64_t hash() const;

  void write(std::ostream& os) const;

  // Count of events of one kind (test convenience).
  size_t count(std::string_view kind) const;
  bool contains(std::string_view kind) const { return count(kind) > 0; }

 private:
  std::vector<TraceEvent> events_;
};

std::string trace_line(const TraceEvent& e);

}  // namespace cfaudit

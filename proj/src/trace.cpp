#include "cfaudit/trace.hpp"

namespace cfaudit {

void Trace::emit(int64_t t_ns, std::string kind, std::string payload) {
  events_.push_back(TraceEvent{t_ns, std::move(kind), std::move(payload)});
}

std::string trace_line(const TraceEvent& e) {
  std::string line = std::to_string(e.t_ns);
  line += ' ';
  line += e.kind;
  if (!e.payload.empty()) {
    line += ' ';
    line += e.payload;
  }
  line += '\n';
  return line;
}

uint64_t Trace::hash() const {
  uint64_t h = 1469598103934665603ull;
  for (const auto& e : events_) {
    for (unsigned char c : trace_line(e)) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  return h;
}

void Trace::write(std::ostream& os) const {
  for (const auto& e : events_) os << trace_line(e);
}

size_t Trace::count(std::string_view kind) const {
  size_t n = 0;
  for (const auto& e : events_)
    if (e.kind == kind) ++n;
  return n;
}

}  // namespace cfaudit

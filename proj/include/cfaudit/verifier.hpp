#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "cfaudit/crypto.hpp"
#include "cfaudit/frames.hpp"

namespace cfaudit {

// Edge whitelist over the program's control-flow graph.
struct PathPolicy {
  std::unordered_set<uint32_t> allowed_edges;  // src << 16 | dst
  uint16_t entry = 0;
  uint16_t exit = 0;

  static uint32_t edge_key(uint16_t src, uint16_t dst) {
    return (static_cast<uint32_t>(src) << 16) | dst;
  }
  void add_edge(uint16_t src, uint16_t dst) {
    allowed_edges.insert(edge_key(src, dst));
  }
  bool allows(uint16_t src, uint16_t dst) const {
    return allowed_edges.count(edge_key(src, dst)) != 0;
  }
};

enum class VrfVerdict : uint8_t {
  Accept,
  RejectAuth,
  RejectPath,
  Duplicate,   // byte-identical retransmission of the already-answered report
  Malformed,   // stream too short to carry a trailer; no response is sent
};

const char* vrf_verdict_name(VrfVerdict v);

struct DanglingSession : std::runtime_error {
  DanglingSession()
      : std::runtime_error("audit trail requested before the final report") {}
};

struct VerifierStats {
  uint64_t accepted = 0;
  uint64_t rejected_auth = 0;
  uint64_t rejected_path = 0;
  uint64_t duplicates = 0;
  uint64_t malformed = 0;
  uint64_t accepted_slice_bytes = 0;
};

// One auditing session: challenge state, accepted trace, duplicate handling.
// The verifier's compute is treated as free (it is not the constrained side);
// all of its observable behaviour is deterministic in (key, seed).
class Verifier {
 public:
  Verifier(const Key& key, uint16_t aer_min, uint16_t aer_max,
           PathPolicy policy, uint64_t rng_seed);

  const Challenge& current_chal() const { return current_chal_; }

  // Validates one incoming report stream. declared_trigger_state is the
  // report's trigger word, which in a deployment rides protocol context; the
  // MAC recomputation covers it, so it is not forgeable.
  VrfVerdict vrf_validate_report(const std::vector<uint8_t>& stream,
                                 uint16_t declared_trigger_state);

  // Response for the verdict vrf_validate_report just returned. A Duplicate
  // resends the stored frame verbatim; only an Accept advances the session
  // challenge. Malformed streams get no response.
  ResponseFrame vrf_make_response(VrfVerdict verdict);

  bool session_complete() const { return session_complete_; }

  // Concatenated accepted slices decoded as 4-byte transfer records.
  std::vector<Transfer> vrf_reassemble() const;

  const VerifierStats& stats() const { return stats_; }

 private:
  Challenge draw_challenge();

  Key key_{};
  uint16_t aer_min_;
  uint16_t aer_max_;
  Digest aer_digest_{};
  PathPolicy policy_;
  std::mt19937_64 rng_;

  Challenge current_chal_{};
  bool has_prev_chal_ = false;
  Challenge prev_chal_{};
  MacTag last_seen_prv_auth_{};   // from the last accepted report
  MacTag last_received_prv_auth_{};  // from the report being answered
  bool has_last_response_ = false;
  ResponseFrame last_response_{};

  std::vector<uint8_t> accepted_bytes_;
  std::vector<uint8_t> carry_;  // partial transfer straddling report bounds
  bool session_complete_ = false;
  VerifierStats stats_;
};

}  // namespace cfaudit

#include "cfaudit/verifier.hpp"

#include <cstring>

#include "cfaudit/monitors.hpp"
#include "cfaudit/tcb.hpp"

namespace cfaudit {

const char* vrf_verdict_name(VrfVerdict v) {
  switch (v) {
    case VrfVerdict::Accept: return "Accept";
    case VrfVerdict::RejectAuth: return "RejectAuth";
    case VrfVerdict::RejectPath: return "RejectPath";
    case VrfVerdict::Duplicate: return "Duplicate";
    case VrfVerdict::Malformed: return "Malformed";
  }
  return "?";
}

Verifier::Verifier(const Key& key, uint16_t aer_min, uint16_t aer_max,
                   PathPolicy policy, uint64_t rng_seed)
    : key_(key),
      aer_min_(aer_min),
      aer_max_(aer_max),
      aer_digest_(measured_region_digest(aer_min, aer_max)),
      policy_(std::move(policy)),
      rng_(rng_seed) {
  current_chal_ = draw_challenge();
}

Challenge Verifier::draw_challenge() {
  Challenge c{};
  for (size_t i = 0; i < c.size(); i += 8) {
    uint64_t v = rng_();
    for (size_t k = 0; k < 8; ++k) c[i + k] = static_cast<uint8_t>(v >> (8 * k));
  }
  return c;
}

namespace {

// Decodes slice bytes as 4-byte transfer records, resuming from a partial
// record carried over from the previous accepted report. Returns false on the
// first whitelist violation.
bool scan_records(const std::vector<uint8_t>& carry_in,
                  const std::vector<uint8_t>& slice, const PathPolicy& policy,
                  std::vector<uint8_t>& carry_out) {
  std::vector<uint8_t> pending = carry_in;
  for (uint8_t b : slice) {
    pending.push_back(b);
    if (pending.size() == 4) {
      uint16_t src = static_cast<uint16_t>(pending[0] | (pending[1] << 8));
      uint16_t dst = static_cast<uint16_t>(pending[2] | (pending[3] << 8));
      if (!policy.allows(src, dst)) return false;
      pending.clear();
    }
  }
  carry_out = std::move(pending);
  return true;
}

}  // namespace

VrfVerdict Verifier::vrf_validate_report(const std::vector<uint8_t>& stream,
                                         uint16_t declared_trigger_state) {
  DecodedReport rpt;
  try {
    rpt = decode_report_stream(stream);
  } catch (const MalformedFrame&) {
    ++stats_.malformed;
    return VrfVerdict::Malformed;
  }
  last_received_prv_auth_ = rpt.prv_auth;

  auto mac_under = [&](const Challenge& chal) {
    std::vector<uint8_t> input =
        attest_mac_input(chal, declared_trigger_state, aer_min_, aer_max_,
                         rpt.slice_top, rpt.slice_bot, rpt.slice, aer_digest_);
    return hmac_sha256(key_, input);
  };

  MacTag expected = mac_under(current_chal_);
  if (!tag_equal(expected, rpt.prv_auth)) {
    // A retransmission of the report we already answered authenticates under
    // the previous challenge and carries the tag we saw then.
    if (has_prev_chal_ && has_last_response_ &&
        tag_equal(rpt.prv_auth, last_seen_prv_auth_) &&
        tag_equal(mac_under(prev_chal_), rpt.prv_auth)) {
      ++stats_.duplicates;
      return VrfVerdict::Duplicate;
    }
    ++stats_.rejected_auth;
    return VrfVerdict::RejectAuth;
  }

  std::vector<uint8_t> carry_next;
  if (!scan_records(carry_, rpt.slice, policy_, carry_next)) {
    ++stats_.rejected_path;
    return VrfVerdict::RejectPath;
  }

  carry_ = std::move(carry_next);
  accepted_bytes_.insert(accepted_bytes_.end(), rpt.slice.begin(),
                         rpt.slice.end());
  last_seen_prv_auth_ = rpt.prv_auth;
  if (declared_trigger_state & trigger_bit(Trigger::T1)) {
    session_complete_ = true;
  }
  ++stats_.accepted;
  stats_.accepted_slice_bytes += rpt.slice.size();
  return VrfVerdict::Accept;
}

ResponseFrame Verifier::vrf_make_response(VrfVerdict verdict) {
  if (verdict == VrfVerdict::Malformed) {
    throw std::logic_error("no response is defined for a malformed stream");
  }
  if (verdict == VrfVerdict::Duplicate) {
    return last_response_;
  }
  ResponseFrame frame;
  frame.chal_next = draw_challenge();
  frame.vrf_check = (verdict == VrfVerdict::Accept) ? 1 : 0;
  std::vector<uint8_t> input = response_mac_input(
      frame.chal_next, frame.vrf_check, last_received_prv_auth_);
  frame.vrf_auth = hmac_sha256(key_, input);
  if (verdict == VrfVerdict::Accept) {
    prev_chal_ = current_chal_;
    has_prev_chal_ = true;
    current_chal_ = frame.chal_next;
    last_response_ = frame;
    has_last_response_ = true;
  }
  return frame;
}

std::vector<Transfer> Verifier::vrf_reassemble() const {
  if (!session_complete_) throw DanglingSession();
  if (!carry_.empty()) {
    throw std::logic_error("accepted audit trail is not record aligned");
  }
  std::vector<Transfer> out;
  out.reserve(accepted_bytes_.size() / 4);
  for (size_t i = 0; i + 4 <= accepted_bytes_.size(); i += 4) {
    Transfer t;
    t.src = static_cast<uint16_t>(accepted_bytes_[i] |
                                  (accepted_bytes_[i + 1] << 8));
    t.dst = static_cast<uint16_t>(accepted_bytes_[i + 2] |
                                  (accepted_bytes_[i + 3] << 8));
    out.push_back(t);
  }
  return out;
}

}  // namespace cfaudit

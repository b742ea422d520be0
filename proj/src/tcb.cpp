#include "cfaudit/tcb.hpp"

namespace cfaudit {

TcbProcedure tcb_enter(Trigger trig) {
  switch (trig) {
    case Trigger::T1:
    case Trigger::T2: return TcbProcedure::Attestation;
    case Trigger::T3: return TcbProcedure::ResponseParser;
    case Trigger::T4: return TcbProcedure::Wait;
  }
  throw std::logic_error("unreachable trigger");
}

AttestResult tcb_attest(TcbContext& ctx, const CfLog& log, Trigger trig,
                        uint16_t slice_top, uint16_t slice_bot) {
  std::vector<uint8_t> slice = log.span_bytes(slice_top, slice_bot);
  ctx.meta.trigger_state = trigger_bit(trig);
  std::vector<uint8_t> input = attest_mac_input(
      ctx.meta.chal, ctx.meta.trigger_state, ctx.meta.aer_min,
      ctx.meta.aer_max, slice_top, slice_bot, slice, ctx.aer_digest);
  AttestResult r;
  r.prv_auth = hmac_sha256(ctx.key, input);
  r.mac_input_len = input.size();
  ctx.last_prv_auth = r.prv_auth;
  return r;
}

ParseVerdict tcb_parse_response(TcbContext& ctx, const ResponseFrame& resp) {
  MacTag expected = hmac_sha256(
      ctx.key,
      response_mac_input(resp.chal_next, resp.vrf_check, ctx.last_prv_auth));
  if (!tag_equal(expected, resp.vrf_auth)) return ParseVerdict::AuthFail;
  if (resp.vrf_check == 1) {
    ctx.meta.chal = resp.chal_next;
    return ParseVerdict::Accepted;
  }
  return ParseVerdict::Rejected;
}

const char* heal_action_name(HealAction a) {
  switch (a) {
    case HealAction::Reset: return "reset";
    case HealAction::EraseDmem: return "erase_dmem";
    case HealAction::Halt: return "halt";
    case HealAction::Update: return "update";
  }
  return "?";
}

const char* parse_verdict_name(ParseVerdict v) {
  switch (v) {
    case ParseVerdict::Accepted: return "accepted";
    case ParseVerdict::Rejected: return "rejected";
    case ParseVerdict::AuthFail: return "authfail";
  }
  return "?";
}

Digest measured_region_digest(uint16_t aer_min, uint16_t aer_max) {
  if (aer_min >= aer_max) throw std::invalid_argument("empty measured region");
  size_t len = static_cast<size_t>(aer_max - aer_min);
  std::vector<uint8_t> image(len);
  // Fixed mixing pattern; any stable function of (offset, bounds) would do.
  for (size_t i = 0; i < len; ++i) {
    uint32_t x = static_cast<uint32_t>(i) * 2654435761u + aer_min * 40503u;
    image[i] = static_cast<uint8_t>((x >> 13) & 0xff);
  }
  return sha256(image);
}

}  // namespace cfaudit

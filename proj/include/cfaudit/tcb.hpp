#pragma once

#include <cstdint>

#include "cfaudit/core_log.hpp"
#include "cfaudit/crypto.hpp"
#include "cfaudit/frames.hpp"
#include "cfaudit/monitors.hpp"

namespace cfaudit {

enum class HealAction : uint8_t { Reset, EraseDmem, Halt, Update };

enum class TcbProcedure : uint8_t { Attestation, ResponseParser, Wait };

// Trusted-software configuration: remediation policy, simulated MAC
// throughput, and the two trampoline addresses whose PC visits the hardware
// monitors watch for.
struct TcbConfig {
  HealAction heal_action = HealAction::Reset;
  double mac_rate = 8000.0;  // bytes/second through the HMAC
  uint16_t accepted_addr = 0xF010;
  uint16_t send_addr = 0xF020;
};

TcbProcedure tcb_enter(Trigger trig);

// Device-side trusted state: the shared key, the metadata block, the digest
// of the measured region image, and the tag of the most recent report (the
// response MAC must cover it).
struct TcbContext {
  Key key{};
  MetadataRegion meta;
  Digest aer_digest{};
  MacTag last_prv_auth{};
};

struct AttestResult {
  MacTag prv_auth{};
  // Bytes fed through the MAC: 42-byte header + slice + 32-byte region
  // digest. The engine turns this into simulated time.
  size_t mac_input_len = 0;
};

// Computes the report tag over the pending slice [slice_top, slice_bot) and
// records it as last_prv_auth. The engine writes it into the report region
// and models the send_addr visit at completion time.
AttestResult tcb_attest(TcbContext& ctx, const CfLog& log, Trigger trig,
                        uint16_t slice_top, uint16_t slice_bot);

enum class ParseVerdict : uint8_t { Accepted, Rejected, AuthFail };

// Authenticates a verifier response against the challenge it carries and the
// tag of our last report. Only an authentic acceptance adopts chal_next.
ParseVerdict tcb_parse_response(TcbContext& ctx, const ResponseFrame& resp);

const char* heal_action_name(HealAction a);
const char* parse_verdict_name(ParseVerdict v);

// Deterministic image of the measured region; prover and verifier both hash
// it, and the Update heal action would re-derive it. Seeded by size alone so
// a reset reproduces the same digest.
Digest measured_region_digest(uint16_t aer_min, uint16_t aer_max);

}  // namespace cfaudit

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cfaudit/core_log.hpp"
#include "cfaudit/crypto.hpp"

namespace cfaudit {

struct MalformedFrame : std::runtime_error {
  explicit MalformedFrame(const std::string& what) : std::runtime_error(what) {}
};

// Device-side metadata block: attested execution-region bounds, the latched
// trigger bits and the challenge for the next report. 38 bytes on the wire.
struct MetadataRegion {
  uint16_t aer_min = 0;
  uint16_t aer_max = 0;
  uint16_t trigger_state = 0;  // bit0..bit3 = T1..T4, one-hot in reports
  Challenge chal{};

  static constexpr size_t kWireSize = 38;
};

std::vector<uint8_t> encode_metadata(const MetadataRegion& m);
MetadataRegion decode_metadata(const std::vector<uint8_t>& bytes);

// The report region the contention monitor streams from: the whole circular
// log followed by a 36-byte trailer (slice_top, slice_bot, prv_auth).
// Indices in [0, cf_size) hit the log, [cf_size, cf_size+36) the trailer.
struct ReportRegion {
  const CfLog* log = nullptr;
  uint16_t slice_top = 0;
  uint16_t slice_bot = 0;
  MacTag prv_auth{};

  static constexpr uint32_t kTrailerSize = 36;

  uint32_t report_size() const { return log->cf_size() + kTrailerSize; }
  uint8_t byte_at(uint32_t idx) const;
  std::vector<uint8_t> trailer_bytes() const;
};

// A report as it travels: the wrapped slice bytes followed by the trailer.
// An empty slice still carries the 36-byte trailer.
std::vector<uint8_t> encode_report_stream(const ReportRegion& r);

struct DecodedReport {
  std::vector<uint8_t> slice;
  uint16_t slice_top = 0;
  uint16_t slice_bot = 0;
  MacTag prv_auth{};
};

DecodedReport decode_report_stream(const std::vector<uint8_t>& bytes);

// Verifier response: authentication tag over (chal_next, verdict, the
// report's prv_auth), the next challenge, and the verdict word. 66 bytes.
struct ResponseFrame {
  MacTag vrf_auth{};
  Challenge chal_next{};
  uint16_t vrf_check = 0;  // 1 = accepted, 0 = rejected

  static constexpr size_t kWireSize = 66;
};

std::vector<uint8_t> encode_response(const ResponseFrame& f);
ResponseFrame decode_response(const std::vector<uint8_t>& bytes);

// MAC input layouts. The attest input is a 42-byte header (chal,
// trigger_state, aer_min, aer_max, slice_top, slice_bot), then the slice
// bytes, then the digest of the attested execution region.
std::vector<uint8_t> attest_mac_input(const Challenge& chal,
                                      uint16_t trigger_state, uint16_t aer_min,
                                      uint16_t aer_max, uint16_t slice_top,
                                      uint16_t slice_bot,
                                      const std::vector<uint8_t>& slice_bytes,
                                      const Digest& aer_digest);

std::vector<uint8_t> response_mac_input(const Challenge& chal_next,
                                        uint16_t vrf_check,
                                        const MacTag& prv_auth);

// Length-prefixed transport framing (u32 LE), used when messages are written
// to byte streams such as trace capture files.
std::vector<uint8_t> frame_message(const std::vector<uint8_t>& payload);
std::vector<uint8_t> unframe_message(const std::vector<uint8_t>& framed);

}  // namespace cfaudit

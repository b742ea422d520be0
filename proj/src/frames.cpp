#include "cfaudit/frames.hpp"

namespace cfaudit {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

uint16_t get_u16(const std::vector<uint8_t>& in, size_t at) {
  return static_cast<uint16_t>(in[at] | (in[at + 1] << 8));
}

}  // namespace

std::vector<uint8_t> encode_metadata(const MetadataRegion& m) {
  std::vector<uint8_t> out;
  out.reserve(MetadataRegion::kWireSize);
  put_u16(out, m.aer_min);
  put_u16(out, m.aer_max);
  put_u16(out, m.trigger_state);
  out.insert(out.end(), m.chal.begin(), m.chal.end());
  return out;
}

MetadataRegion decode_metadata(const std::vector<uint8_t>& bytes) {
  if (bytes.size() != MetadataRegion::kWireSize)
    throw MalformedFrame("metadata block must be 38 bytes");
  MetadataRegion m;
  m.aer_min = get_u16(bytes, 0);
  m.aer_max = get_u16(bytes, 2);
  m.trigger_state = get_u16(bytes, 4);
  std::copy(bytes.begin() + 6, bytes.end(), m.chal.begin());
  return m;
}

uint8_t ReportRegion::byte_at(uint32_t idx) const {
  uint32_t cf = log->cf_size();
  if (idx < cf) return log->byte_at(idx);
  uint32_t t = idx - cf;
  switch (t) {
    case 0: return static_cast<uint8_t>(slice_top & 0xff);
    case 1: return static_cast<uint8_t>(slice_top >> 8);
    case 2: return static_cast<uint8_t>(slice_bot & 0xff);
    case 3: return static_cast<uint8_t>(slice_bot >> 8);
    default:
      if (t < kTrailerSize) return prv_auth[t - 4];
      throw std::out_of_range("report region index");
  }
}

std::vector<uint8_t> ReportRegion::trailer_bytes() const {
  std::vector<uint8_t> out;
  out.reserve(kTrailerSize);
  put_u16(out, slice_top);
  put_u16(out, slice_bot);
  out.insert(out.end(), prv_auth.begin(), prv_auth.end());
  return out;
}

std::vector<uint8_t> encode_report_stream(const ReportRegion& r) {
  std::vector<uint8_t> out = r.log->span_bytes(r.slice_top, r.slice_bot);
  std::vector<uint8_t> trailer = r.trailer_bytes();
  out.insert(out.end(), trailer.begin(), trailer.end());
  return out;
}

DecodedReport decode_report_stream(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < ReportRegion::kTrailerSize)
    throw MalformedFrame("report stream shorter than its trailer");
  DecodedReport d;
  size_t slice_len = bytes.size() - ReportRegion::kTrailerSize;
  d.slice.assign(bytes.begin(), bytes.begin() + slice_len);
  d.slice_top = get_u16(bytes, slice_len);
  d.slice_bot = get_u16(bytes, slice_len + 2);
  std::copy(bytes.begin() + slice_len + 4, bytes.end(), d.prv_auth.begin());
  return d;
}

std::vector<uint8_t> encode_response(const ResponseFrame& f) {
  std::vector<uint8_t> out;
  out.reserve(ResponseFrame::kWireSize);
  out.insert(out.end(), f.vrf_auth.begin(), f.vrf_auth.end());
  out.insert(out.end(), f.chal_next.begin(), f.chal_next.end());
  put_u16(out, f.vrf_check);
  return out;
}

ResponseFrame decode_response(const std::vector<uint8_t>& bytes) {
  if (bytes.size() != ResponseFrame::kWireSize)
    throw MalformedFrame("response frame must be 66 bytes");
  ResponseFrame f;
  std::copy(bytes.begin(), bytes.begin() + 32, f.vrf_auth.begin());
  std::copy(bytes.begin() + 32, bytes.begin() + 64, f.chal_next.begin());
  f.vrf_check = get_u16(bytes, 64);
  return f;
}

std::vector<uint8_t> attest_mac_input(const Challenge& chal,
                                      uint16_t trigger_state, uint16_t aer_min,
                                      uint16_t aer_max, uint16_t slice_top,
                                      uint16_t slice_bot,
                                      const std::vector<uint8_t>& slice_bytes,
                                      const Digest& aer_digest) {
  std::vector<uint8_t> out;
  out.reserve(42 + slice_bytes.size() + aer_digest.size());
  out.insert(out.end(), chal.begin(), chal.end());
  put_u16(out, trigger_state);
  put_u16(out, aer_min);
  put_u16(out, aer_max);
  put_u16(out, slice_top);
  put_u16(out, slice_bot);
  out.insert(out.end(), slice_bytes.begin(), slice_bytes.end());
  out.insert(out.end(), aer_digest.begin(), aer_digest.end());
  return out;
}

std::vector<uint8_t> response_mac_input(const Challenge& chal_next,
                                        uint16_t vrf_check,
                                        const MacTag& prv_auth) {
  std::vector<uint8_t> out;
  out.reserve(66);
  out.insert(out.end(), chal_next.begin(), chal_next.end());
  put_u16(out, vrf_check);
  out.insert(out.end(), prv_auth.begin(), prv_auth.end());
  return out;
}

std::vector<uint8_t> frame_message(const std::vector<uint8_t>& payload) {
  std::vector<uint8_t> out;
  out.reserve(payload.size() + 4);
  uint32_t n = static_cast<uint32_t>(payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(n >> (8 * i)));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<uint8_t> unframe_message(const std::vector<uint8_t>& framed) {
  if (framed.size() < 4) throw MalformedFrame("framed message truncated");
  uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= static_cast<uint32_t>(framed[i]) << (8 * i);
  if (framed.size() != static_cast<size_t>(n) + 4)
    throw MalformedFrame("framed length does not match payload");
  return std::vector<uint8_t>(framed.begin() + 4, framed.end());
}

}  // namespace cfaudit

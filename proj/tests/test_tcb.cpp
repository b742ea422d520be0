#include <random>
#include <vector>

#include "cfaudit/core_log.hpp"
#include "cfaudit/crypto.hpp"
#include "cfaudit/frames.hpp"
#include "cfaudit/tcb.hpp"
#include "doctest.h"

using namespace cfaudit;

namespace {

TcbContext make_ctx() {
  TcbContext ctx;
  for (size_t i = 0; i < ctx.key.size(); ++i)
    ctx.key[i] = static_cast<uint8_t>(i * 3 + 1);
  ctx.meta.aer_min = 0x4000;
  ctx.meta.aer_max = 0x4400;
  for (size_t i = 0; i < ctx.meta.chal.size(); ++i)
    ctx.meta.chal[i] = static_cast<uint8_t>(0x90 + i);
  ctx.aer_digest = measured_region_digest(0x4000, 0x4400);
  return ctx;
}

// Forges the response the verifier would send for a given check word.
ResponseFrame authentic_response(const TcbContext& ctx, uint16_t check,
                                 uint8_t chal_fill) {
  ResponseFrame resp;
  resp.chal_next.fill(chal_fill);
  resp.vrf_check = check;
  resp.vrf_auth = hmac_sha256(
      ctx.key, response_mac_input(resp.chal_next, check, ctx.last_prv_auth));
  return resp;
}

}  // namespace

TEST_CASE("tcb_enter maps each trigger to its procedure") {
  CHECK(tcb_enter(Trigger::T1) == TcbProcedure::Attestation);
  CHECK(tcb_enter(Trigger::T2) == TcbProcedure::Attestation);
  CHECK(tcb_enter(Trigger::T3) == TcbProcedure::ResponseParser);
  CHECK(tcb_enter(Trigger::T4) == TcbProcedure::Wait);
}

TEST_CASE("tcb_attest recomputable from the documented mac input") {
  TcbContext ctx = make_ctx();
  CfLog log(8);
  log.append_word(0x0102);
  log.append_word(0x0304);

  AttestResult res = tcb_attest(ctx, log, Trigger::T2, 0, 4);
  CHECK(ctx.meta.trigger_state == trigger_bit(Trigger::T2));
  CHECK(ctx.last_prv_auth == res.prv_auth);
  // Header is 42 bytes: challenge, trigger word, region bounds, slice bounds.
  CHECK(res.mac_input_len == 42 + 4 + 32);

  std::vector<uint8_t> expected_input = attest_mac_input(
      ctx.meta.chal, trigger_bit(Trigger::T2), 0x4000, 0x4400, 0, 4,
      log.span_bytes(0, 4), ctx.aer_digest);
  CHECK(res.prv_auth == hmac_sha256(ctx.key, expected_input));

  // Determinism: same inputs, same tag.
  TcbContext ctx2 = make_ctx();
  AttestResult res2 = tcb_attest(ctx2, log, Trigger::T2, 0, 4);
  CHECK(res2.prv_auth == res.prv_auth);
}

TEST_CASE("tcb_attest over an empty slice still tags 42+32 bytes") {
  TcbContext ctx = make_ctx();
  CfLog log(8);
  AttestResult res = tcb_attest(ctx, log, Trigger::T1, 4, 4);
  CHECK(res.mac_input_len == 42 + 32);
  CHECK(ctx.meta.trigger_state == trigger_bit(Trigger::T1));
}

TEST_CASE("any slice byte flip changes the tag") {
  TcbContext ctx = make_ctx();
  CfLog log(64);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 32; ++i) log.append_word(static_cast<uint16_t>(rng()));
  AttestResult base = tcb_attest(ctx, log, Trigger::T2, 0, 32);

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<uint8_t> slice = log.span_bytes(0, 32);
    slice[rng() % slice.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
    std::vector<uint8_t> input =
        attest_mac_input(ctx.meta.chal, trigger_bit(Trigger::T2), 0x4000,
                         0x4400, 0, 32, slice, ctx.aer_digest);
    REQUIRE(hmac_sha256(ctx.key, input) != base.prv_auth);
  }
}

TEST_CASE("attestation cost grows linearly with the slice") {
  TcbContext ctx = make_ctx();
  CfLog log(2048);
  for (int i = 0; i < 1024; ++i) log.append_word(static_cast<uint16_t>(i));
  size_t l0 = tcb_attest(ctx, log, Trigger::T2, 0, 512).mac_input_len;
  size_t l1 = tcb_attest(ctx, log, Trigger::T2, 0, 1024).mac_input_len;
  CHECK(l1 - l0 == 512);
}

TEST_CASE("tcb_parse_response verdicts") {
  TcbContext ctx = make_ctx();
  CfLog log(8);
  log.append_word(0xBEEF);
  tcb_attest(ctx, log, Trigger::T2, 0, 2);
  Challenge before = ctx.meta.chal;

  SUBCASE("authentic acceptance adopts the next challenge") {
    ResponseFrame resp = authentic_response(ctx, 1, 0x42);
    CHECK(tcb_parse_response(ctx, resp) == ParseVerdict::Accepted);
    CHECK(ctx.meta.chal == resp.chal_next);
  }

  SUBCASE("authentic rejection keeps the challenge") {
    ResponseFrame resp = authentic_response(ctx, 0, 0x42);
    CHECK(tcb_parse_response(ctx, resp) == ParseVerdict::Rejected);
    CHECK(ctx.meta.chal == before);
  }

  SUBCASE("any flipped bit fails authentication and changes nothing") {
    ResponseFrame resp = authentic_response(ctx, 1, 0x42);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 64; ++trial) {
      ResponseFrame bad = resp;
      switch (trial % 3) {
        case 0: bad.vrf_auth[rng() % 32] ^= 1; break;
        case 1: bad.chal_next[rng() % 32] ^= 0x80; break;
        case 2: bad.vrf_check ^= 1; break;
      }
      REQUIRE(tcb_parse_response(ctx, bad) == ParseVerdict::AuthFail);
      REQUIRE(ctx.meta.chal == before);
    }
  }

  SUBCASE("a response for an older report fails against the new tag") {
    ResponseFrame stale = authentic_response(ctx, 1, 0x42);
    log.append_word(0xCAFE);
    tcb_attest(ctx, log, Trigger::T2, 2, 4);  // new report, new last tag
    CHECK(tcb_parse_response(ctx, stale) == ParseVerdict::AuthFail);
  }
}

TEST_CASE("measured_region_digest is stable and bound to the region") {
  Digest a = measured_region_digest(0x4000, 0x4400);
  Digest b = measured_region_digest(0x4000, 0x4400);
  Digest c = measured_region_digest(0x4000, 0x4402);
  Digest d = measured_region_digest(0x4002, 0x4402);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(c != d);
  CHECK_THROWS_AS(measured_region_digest(0x4400, 0x4400),
                  std::invalid_argument);
}

TEST_CASE("name tables cover every enumerator") {
  CHECK(std::string(heal_action_name(HealAction::Reset)) == "reset");
  CHECK(std::string(heal_action_name(HealAction::EraseDmem)) == "erase_dmem");
  CHECK(std::string(heal_action_name(HealAction::Halt)) == "halt");
  CHECK(std::string(heal_action_name(HealAction::Update)) == "update");
  CHECK(std::string(parse_verdict_name(ParseVerdict::Accepted)) == "accepted");
  CHECK(std::string(parse_verdict_name(ParseVerdict::Rejected)) == "rejected");
  CHECK(std::string(parse_verdict_name(ParseVerdict::AuthFail)) == "authfail");
}

#include <cmath>
#include <vector>

#include "cfaudit/channel.hpp"
#include "cfaudit/frames.hpp"
#include "doctest.h"

using namespace cfaudit;

namespace {

LinkConfig default_link() { return LinkConfig{}; }

ResponseFrame sample_response() {
  ResponseFrame f;
  f.vrf_auth.fill(0x11);
  f.chal_next.fill(0x22);
  f.vrf_check = 1;
  return f;
}

}  // namespace

TEST_CASE("uart byte time at 115200 baud with 8N1 framing") {
  LinkConfig link = default_link();
  // 10 bits / 115200 baud = 86.806 us, to the nearest nanosecond.
  CHECK(byte_time_ns(link) == 86806);

  link.baud = 230400;
  CHECK(byte_time_ns(link) == 43403);

  link.baud = 0;
  CHECK_THROWS_AS(byte_time_ns(link), std::invalid_argument);
}

TEST_CASE("transmission duration is computed whole, not per-byte") {
  LinkConfig link = default_link();
  // A 2048+36 byte report: 20840 bits / 115200 = 180.90 ms.
  CHECK(tx_duration_ns(link, 2084) == 180'902'778);
  // A response frame: 660 bits / 115200 = 5.73 ms.
  CHECK(tx_duration_ns(link, 66) == 5'729'167);
  // No accumulation error: duration(k) is within one rounding step of
  // k * duration(1).
  for (uint64_t k : {1ull, 7ull, 100ull, 2084ull, 1000000ull}) {
    long double exact = static_cast<long double>(k) * 10.0L * 1e9L / 115200.0L;
    long double got = static_cast<long double>(tx_duration_ns(link, k));
    CHECK(std::abs(static_cast<double>(got - exact)) <= 0.5);
  }
}

TEST_CASE("a response crosses the wire in serialization plus half the rtt") {
  Channel ch(default_link(), {}, 1);
  std::vector<VtopDelivery> d = ch.vtop_send(sample_response(), 1'000'000);
  REQUIRE(d.size() == 1);
  CHECK(d[0].bytes == encode_response(sample_response()));
  // Transmission starts after the propagation leg; the engine adds per-byte
  // serialization on top of start_ns.
  CHECK(d[0].start_ns == 1'000'000 + 50'000'000);
  int64_t last_byte = d[0].start_ns + tx_duration_ns(ch.link(), 66);
  CHECK(last_byte == 1'000'000 + 50'000'000 + 5'729'167);
}

TEST_CASE("report bytes buffer until close and arrive after half the rtt") {
  Channel ch(default_link(), {}, 1);
  for (uint8_t b : {1, 2, 3}) ch.ptov_push_byte(b);
  std::vector<PtovDelivery> d = ch.ptov_close(7'000, 0x2);
  REQUIRE(d.size() == 1);
  CHECK(d[0].bytes == std::vector<uint8_t>{1, 2, 3});
  CHECK(d[0].declared_trigger_state == 0x2);
  CHECK(d[0].arrive_ns == 7'000 + 50'000'000);
  CHECK(ch.ptov_messages() == 1);

  // An aborted stream leaves nothing behind.
  ch.ptov_push_byte(9);
  ch.ptov_abort();
  d = ch.ptov_close(8'000, 0x1);
  CHECK(d[0].bytes.empty());
}

TEST_CASE("drop rules suppress the matched message only") {
  AdvRule drop;
  drop.kind = AdvKind::Drop;
  drop.dir = Direction::VtoP;
  drop.msg_index = 0;
  Channel ch(default_link(), {drop}, 1);
  CHECK(ch.vtop_send(sample_response(), 0).empty());
  CHECK(ch.vtop_send(sample_response(), 0).size() == 1);

  // Prover-direction traffic is untouched.
  ch.ptov_push_byte(5);
  CHECK(ch.ptov_close(0, 0).size() == 1);
}

TEST_CASE("delay shifts arrival, tamper flips the addressed byte") {
  AdvRule delay;
  delay.kind = AdvKind::Delay;
  delay.dir = Direction::PtoV;
  delay.msg_index = -1;  // every message
  delay.delay_ns = 1'000'000;

  AdvRule tamper;
  tamper.kind = AdvKind::TamperByte;
  tamper.dir = Direction::PtoV;
  tamper.msg_index = 0;
  tamper.byte_offset = 1;
  tamper.xor_mask = 0x0F;

  Channel ch(default_link(), {delay, tamper}, 1);
  ch.ptov_push_byte(0xA0);
  ch.ptov_push_byte(0xB0);
  std::vector<PtovDelivery> d = ch.ptov_close(0, 0);
  REQUIRE(d.size() == 1);
  CHECK(d[0].arrive_ns == 50'000'000 + 1'000'000);
  CHECK(d[0].bytes == std::vector<uint8_t>{0xA0, 0xBF});

  // Second message: the -1 delay still applies, the indexed tamper does not.
  ch.ptov_push_byte(0xA0);
  ch.ptov_push_byte(0xB0);
  d = ch.ptov_close(0, 0);
  CHECK(d[0].arrive_ns == 50'000'000 + 1'000'000);
  CHECK(d[0].bytes == std::vector<uint8_t>{0xA0, 0xB0});
}

TEST_CASE("forged bytes keep the length and are seed-deterministic") {
  AdvRule forge;
  forge.kind = AdvKind::Forge;
  forge.dir = Direction::VtoP;
  forge.msg_index = 0;

  Channel a(default_link(), {forge}, 77);
  Channel b(default_link(), {forge}, 77);
  Channel c(default_link(), {forge}, 78);
  std::vector<VtopDelivery> da = a.vtop_send(sample_response(), 0);
  std::vector<VtopDelivery> db = b.vtop_send(sample_response(), 0);
  std::vector<VtopDelivery> dc = c.vtop_send(sample_response(), 0);
  REQUIRE(da.size() == 1);
  CHECK(da[0].bytes.size() == 66);
  CHECK(da[0].bytes != encode_response(sample_response()));
  CHECK(da[0].bytes == db[0].bytes);
  CHECK(da[0].bytes != dc[0].bytes);
}

TEST_CASE("replay re-delivers an earlier report behind the live one") {
  AdvRule replay;
  replay.kind = AdvKind::Replay;
  replay.dir = Direction::PtoV;
  replay.msg_index = 1;
  replay.replay_of = 0;
  Channel ch(default_link(), {replay}, 1);

  ch.ptov_push_byte(0xAA);
  std::vector<PtovDelivery> first = ch.ptov_close(0, 0x2);
  REQUIRE(first.size() == 1);

  ch.ptov_push_byte(0xBB);
  ch.ptov_push_byte(0xCC);
  std::vector<PtovDelivery> second = ch.ptov_close(10'000, 0x1);
  REQUIRE(second.size() == 2);
  CHECK(second[0].bytes == std::vector<uint8_t>{0xBB, 0xCC});
  CHECK(second[1].bytes == std::vector<uint8_t>{0xAA});
  CHECK(second[1].declared_trigger_state == 0x2);
  CHECK(second[1].arrive_ns > second[0].arrive_ns);
}

TEST_CASE("replay of a message not yet sent is a scripting error") {
  AdvRule replay;
  replay.kind = AdvKind::Replay;
  replay.dir = Direction::VtoP;
  replay.msg_index = 0;
  replay.replay_of = 3;
  Channel ch(default_link(), {replay}, 1);
  CHECK_THROWS_AS(ch.vtop_send(sample_response(), 0), std::out_of_range);
}

TEST_CASE("rules apply in declaration order") {
  // Tamper then forge: the forge wins. Forge then tamper: the tamper marks
  // the forged bytes. Distinguishable because the forged stream is seeded.
  AdvRule tamper;
  tamper.kind = AdvKind::TamperByte;
  tamper.dir = Direction::VtoP;
  tamper.byte_offset = 0;
  tamper.xor_mask = 0xFF;
  AdvRule forge;
  forge.kind = AdvKind::Forge;
  forge.dir = Direction::VtoP;

  Channel tf(default_link(), {tamper, forge}, 5);
  Channel ft(default_link(), {forge, tamper}, 5);
  std::vector<uint8_t> a = tf.vtop_send(sample_response(), 0)[0].bytes;
  std::vector<uint8_t> b = ft.vtop_send(sample_response(), 0)[0].bytes;
  CHECK(a[0] == (b[0] ^ 0xFF));
  CHECK(std::vector<uint8_t>(a.begin() + 1, a.end()) ==
        std::vector<uint8_t>(b.begin() + 1, b.end()));
}

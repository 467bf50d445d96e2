/* Copyright 2026-present the pisasim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "pisa/bitvec.hpp"
#include "pisa/scheduler.hpp"

using namespace pisa;

namespace {

/// Reference replay for the pop-order contract: stable sort by rank.
/// Maintained as a plain sorted vector with linear insertion, nothing
/// shared with the queue implementations.
class StableSortOracle {
 public:
  void push(const RankedEntry& e) {
    auto it = entries_.begin();
    while (it != entries_.end() && !(e < *it)) ++it;
    entries_.insert(it, e);
  }
  std::optional<RankedEntry> pop() {
    if (entries_.empty()) return std::nullopt;
    RankedEntry e = entries_.front();
    entries_.erase(entries_.begin());
    return e;
  }

 private:
  std::vector<RankedEntry> entries_;
};

}  // namespace

TEST_CASE("pifo: ranks pop in sorted order") {
  PifoQueue q(16);
  uint64_t seq = 0;
  for (uint64_t r : {5ull, 2ull, 9ull}) q.push({r, r, seq++});
  CHECK(q.pop()->rank == 2);
  CHECK(q.pop()->rank == 5);
  CHECK(q.pop()->rank == 9);
  CHECK_FALSE(q.pop().has_value());
}

TEST_CASE("pifo: equal ranks keep arrival order") {
  PifoQueue q(16);
  q.push({7, 100, 1});
  q.push({7, 200, 2});
  CHECK(q.pop()->pkt == 100);
  CHECK(q.pop()->pkt == 200);
}

TEST_CASE("pifo: empty pop and capacity") {
  PifoQueue q(2);
  CHECK_FALSE(q.pop().has_value());
  CHECK(q.push({1, 1, 1}) == PushOutcome::Ok);
  CHECK(q.push({2, 2, 2}) == PushOutcome::Ok);
  CHECK(q.push({3, 3, 3}) == PushOutcome::Full);
  CHECK(q.pop()->rank == 1);
  CHECK(q.size() == 1);
}

TEST_CASE("pifo: random workload equals the stable-sort oracle") {
  std::mt19937_64 rng(3);
  PifoQueue q(20000);
  StableSortOracle oracle;
  uint64_t seq = 0;
  for (int op = 0; op < 10000; ++op) {
    if (rng() % 3 != 0) {
      RankedEntry e{rng() % 64, seq, seq};
      ++seq;
      q.push(e);
      oracle.push(e);
    } else {
      auto a = q.pop();
      auto b = oracle.pop();
      REQUIRE(a.has_value() == b.has_value());
      if (a) CHECK(*a == *b);
    }
  }
  for (;;) {
    auto a = q.pop();
    auto b = oracle.pop();
    REQUIRE(a.has_value() == b.has_value());
    if (!a) break;
    CHECK(*a == *b);
  }
}

TEST_CASE("systolic: one step after two pushes exposes the minimum") {
  SystolicQueue q(8);
  q.push({9, 9, 0});
  q.push({3, 3, 1});
  q.step();
  REQUIRE(q.head().has_value());
  CHECK(q.head()->rank == 3);
}

TEST_CASE("systolic: a quiescent queue performs no swaps") {
  SystolicQueue q(8);
  uint64_t seq = 0;
  for (uint64_t r : {1ull, 4ull, 6ull}) {
    q.push({r, r, seq++});
    q.settle();
  }
  REQUIRE(q.quiescent());
  CHECK(q.step() == 0);
  CHECK(q.step() == 0);
}

TEST_CASE("systolic: head is correct within one step of a single op from rest") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    SystolicQueue q(32);
    const size_t fill = rng() % 20;
    uint64_t seq = 0;
    for (size_t i = 0; i < fill; ++i) q.push({rng() % 100, seq, seq}), ++seq;
    q.settle();
    REQUIRE(q.quiescent());

    std::vector<uint64_t> ranks;
    for (size_t i = 0; i < q.size(); ++i) ranks.push_back(q.cell(i)->rank);

    if (rng() & 1 && !ranks.empty()) {
      q.pop();
      ranks.erase(std::min_element(ranks.begin(), ranks.end()));
    } else if (q.size() < q.capacity()) {
      const uint64_t r = rng() % 100;
      q.push({r, seq, seq});
      ++seq;
      ranks.push_back(r);
    }
    q.step();  // at most one step restores head correctness
    if (ranks.empty()) {
      CHECK_FALSE(q.head().has_value());
    } else {
      REQUIRE(q.head().has_value());
      CHECK(q.head()->rank == *std::min_element(ranks.begin(), ranks.end()));
    }
  }
}

TEST_CASE("systolic: settling makes it observationally a pifo") {
  std::mt19937_64 rng(7);
  for (int seed = 0; seed < 20; ++seed) {
    SystolicQueue sys(64);
    PifoQueue pifo(64);
    uint64_t seq = 0;
    for (int op = 0; op < 2000; ++op) {
      if (rng() % 3 != 0) {
        RankedEntry e{rng() % 32, seq, seq};
        ++seq;
        const PushOutcome a = sys.push(e);
        const PushOutcome b = pifo.push(e);
        CHECK(a == b);
        sys.settle();
      } else {
        auto a = sys.pop();
        auto b = pifo.pop();
        sys.settle();
        REQUIRE(a.has_value() == b.has_value());
        if (a) CHECK(*a == *b);
      }
    }
  }
}

TEST_CASE("systolic: cells are sorted and contiguous after settling") {
  std::mt19937_64 rng(11);
  SystolicQueue q(32);
  uint64_t seq = 0;
  for (int i = 0; i < 24; ++i) q.push({rng() % 50, seq, seq}), ++seq;
  q.settle();
  REQUIRE(q.quiescent());
  for (size_t i = 0; i < q.capacity(); ++i) CHECK(q.cell(i).has_value() == (i < q.size()));
  for (size_t i = 0; i + 1 < q.size(); ++i) CHECK_FALSE(*q.cell(i + 1) < *q.cell(i));
}

TEST_CASE("cam primitive: entry-vs-key comparison per configured op") {
  CamPrimitive lt(CamOp::Lt, 2, 16);
  lt.write(0, 3);
  lt.write(1, 8);
  MatchBitmap m = lt.match(5);
  CHECK(m.test(0));        // 3 < 5
  CHECK_FALSE(m.test(1));  // 8 < 5 is false

  CamPrimitive eq(CamOp::Eq, 2, 16);
  eq.write(0, 5);
  CHECK(eq.match(5).test(0));
  CHECK_FALSE(eq.match(6).test(0));
  CHECK_FALSE(eq.match(5).test(1));  // unoccupied entries never match

  CamPrimitive gt(CamOp::Gt, 1, 16);
  gt.write(0, 10);
  CHECK(gt.match(5).test(0));
  CHECK_FALSE(gt.match(15).test(0));
}

TEST_CASE("range cam: interval membership") {
  RangeCam rc(4, 16);
  rc.write(0, 10, 20);
  CHECK(rc.match(15).test(0));
  CHECK(rc.match(10).test(0));
  CHECK(rc.match(20).test(0));
  CHECK_FALSE(rc.match(21).test(0));
  CHECK_FALSE(rc.match(9).test(0));
  CHECK(rc.lookup(15) == std::vector<size_t>{0});
}

TEST_CASE("range cam is literally two primitives with > and < ops") {
  RangeCam rc(8, 16);
  CHECK(rc.lo_primitive().op() == CamOp::Gt);
  CHECK(rc.hi_primitive().op() == CamOp::Lt);
  rc.write(3, 100, 200);
  // composition law: match == NOT(lo > key) AND NOT(hi < key)
  for (uint64_t key : {50ull, 100ull, 150ull, 200ull, 250ull}) {
    const bool lo_ok = !rc.lo_primitive().match(key).test(3);
    const bool hi_ok = !rc.hi_primitive().match(key).test(3);
    CHECK(rc.match(key).test(3) == (lo_ok && hi_ok));
  }
}

TEST_CASE("range cam: random ranges equal the interval oracle") {
  std::mt19937_64 rng(13);
  RangeCam rc(256, 16);
  std::vector<std::pair<uint64_t, uint64_t>> ranges;
  for (size_t i = 0; i < 256; ++i) {
    uint64_t a = rng() & 0xffff, b = rng() & 0xffff;
    if (a > b) std::swap(a, b);
    rc.write(i, a, b);
    ranges.push_back({a, b});
  }
  for (int it = 0; it < 2000; ++it) {
    const uint64_t key = rng() & 0xffff;
    MatchBitmap m = rc.match(key);
    for (size_t i = 0; i < ranges.size(); ++i)
      CHECK(m.test(i) == (ranges[i].first <= key && key <= ranges[i].second));
  }
}

TEST_CASE("buffer: occupancy accounting at the sizing boundary") {
  PacketBuffer buf(1'250'000);  // one RTT of a 100 Gb/s port
  std::vector<uint8_t> pkt(1518, 0xee);
  std::vector<uint64_t> handles;
  for (int i = 0; i < 823; ++i) {
    AdmitResult r = buf.admit(pkt);
    REQUIRE(r.stored());
    handles.push_back(r.handle);
  }
  CHECK(buf.occupancy_bytes() == 823ull * 1518);
  CHECK_FALSE(buf.admit(pkt).stored());  // the 824th would exceed 1.25 MB
  CHECK(buf.occupancy_bytes() == 823ull * 1518);

  for (uint64_t h : handles) buf.release(h);
  CHECK(buf.occupancy_bytes() == 0);
}

TEST_CASE("buffer: release returns identical bytes") {
  PacketBuffer buf(10000);
  std::mt19937_64 rng(17);
  std::vector<uint8_t> pkt(777);
  for (auto& b : pkt) b = static_cast<uint8_t>(rng());
  const size_t pkt_hash = std::hash<std::string>{}(std::string(pkt.begin(), pkt.end()));

  AdmitResult r = buf.admit(pkt);
  REQUIRE(r.stored());
  CHECK(buf.occupancy_bytes() == 777);
  std::vector<uint8_t> back = buf.release(r.handle);
  CHECK(back == pkt);
  CHECK(std::hash<std::string>{}(std::string(back.begin(), back.end())) == pkt_hash);
  CHECK(buf.occupancy_bytes() == 0);
}

TEST_CASE("buffer: zero capacity drops everything") {
  PacketBuffer buf(0);
  CHECK_FALSE(buf.admit(std::vector<uint8_t>(1, 0)).stored());
}

TEST_CASE("buffer: unknown handle is a contract violation") {
  PacketBuffer buf(100);
  CHECK_THROWS_AS(buf.release(42), std::logic_error);
}

TEST_CASE("buffer: occupancy is the sum of stored lengths at all times") {
  std::mt19937_64 rng(19);
  PacketBuffer buf(5000);
  std::map<uint64_t, size_t> live;
  uint64_t expect = 0;
  for (int op = 0; op < 2000; ++op) {
    if (rng() & 1 || live.empty()) {
      std::vector<uint8_t> pkt(1 + rng() % 400);
      AdmitResult r = buf.admit(pkt);
      CHECK(r.stored() == (expect + pkt.size() <= 5000));
      if (r.stored()) {
        live[r.handle] = pkt.size();
        expect += pkt.size();
      }
    } else {
      auto it = live.begin();
      std::advance(it, rng() % live.size());
      buf.release(it->first);
      expect -= it->second;
      live.erase(it);
    }
    CHECK(buf.occupancy_bytes() == expect);
  }
  CHECK(buf.high_water_bytes() <= 5000);
  CHECK(buf.high_water_bytes() >= expect);
}

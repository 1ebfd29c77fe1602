#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "../oracles.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/net/network.hpp"

using namespace wfsim;

namespace {

struct Sink : net::DeliverySink {
  explicit Sink(sim::ModelEngine& e) : engine(e) {}
  void deliver(const net::NetRequest& r) override { got.push_back({r.op, engine.now()}); }
  sim::ModelEngine& engine;
  std::vector<std::pair<std::uint64_t, VirtualTime>> got;
};

struct Rig {
  explicit Rig(PlatformProfile p, std::uint32_t hosts = 4) : profile(std::move(p)), sink(engine), net(profile, hosts, engine, sink) {}
  void run() { engine.run_until_idle([&](const sim::ModelEvent& ev) { net.handle(ev); }); }
  PlatformProfile profile;
  sim::ModelEngine engine;
  Sink sink;
  net::Network net;
};

net::NetRequest req(HostId src, HostId dst, Bytes payload, std::uint64_t tag) {
  net::NetRequest r;
  r.src = src;
  r.dst = dst;
  r.payload_bytes = payload;
  r.kind = payload > 0 ? net::MessageKind::data : net::MessageKind::control;
  r.op = tag;
  return r;
}

}  // namespace

TEST_SUITE("net") {
  TEST_CASE("decompose") {
    auto f = net::decompose(req(1, 2, 1024 * 1024, 0), 64 * kKiB, kKiB);
    CHECK(f.size() == 16);
    CHECK(std::all_of(f.begin(), f.end(), [](const net::Frame& x) { return x.bytes == 64 * kKiB; }));

    f = net::decompose(req(1, 2, 100 * kKiB, 0), 64 * kKiB, kKiB);
    REQUIRE(f.size() == 2);
    CHECK(f[0].bytes == 64 * kKiB);
    CHECK(f[1].bytes == 36 * kKiB);

    f = net::decompose(req(1, 2, 0, 0), 64 * kKiB, kKiB);
    REQUIRE(f.size() == 1);
    CHECK(f[0].bytes == kKiB);

    f = net::decompose(req(1, 2, 0, 0), 64 * kKiB, 0);
    REQUIRE(f.size() == 1);
    CHECK(f[0].bytes == 0);

    for (Bytes payload : {1, 999, 65536, 65537, 1000000}) {
      Bytes sum = 0;
      for (const auto& x : net::decompose(req(1, 2, payload, 0), 64 * kKiB, kKiB)) sum += x.bytes;
      CHECK(sum == std::max<Bytes>(payload, kKiB));
    }
  }

  TEST_CASE("frame service time") {
    PlatformProfile p;
    p.mu_net_remote = Ratio(8);
    p.mu_net_loopback = Ratio(4, 5);
    net::Frame f{0, 0, 64 * kKiB};
    CHECK(net::frame_service_time(f, net::LinkKind::remote, p) == 524'288);
    CHECK(net::frame_service_time(f, net::LinkKind::loopback, p) == 52'429);
    p.core_latency = 10'000;
    CHECK(net::frame_service_time(net::Frame{0, 0, 0}, net::LinkKind::remote, p) == 10'000);
  }

  TEST_CASE("delivery at the last frame's completion") {
    PlatformProfile p;
    p.mu_net_remote = Ratio(10);
    p.frame_size = 1;
    p.control_message_size = 0;
    Rig rig(p);
    rig.net.send(req(1, 2, 3, 7));
    rig.run();
    REQUIRE(rig.sink.got.size() == 1);
    CHECK(rig.sink.got[0].second == 30);
    rig.net.check_drained();
  }

  TEST_CASE("single-frame control request") {
    PlatformProfile p;
    Rig rig(p);
    rig.net.send(req(1, 2, 0, 1));
    rig.run();
    REQUIRE(rig.sink.got.size() == 1);
    CHECK(rig.sink.got[0].second == oracle::remote(0, p));
  }

  TEST_CASE("unloaded transit matches the frame sum") {
    PlatformProfile p;
    p.core_latency = 1234;
    for (Bytes payload : {0, 1, 65536, 100 * 1024, 1000000}) {
      CHECK(net::unloaded_transit(payload, 1, 2, p) == oracle::remote(payload, p));
      CHECK(net::unloaded_transit(payload, 1, 1, p) ==
            oracle::transit(payload, p.mu_net_loopback, p.frame_size, p.control_message_size, 0));
    }
  }

  TEST_CASE("interleaved frames: every request delivered once, never early") {
    // Three senders to one receiver; all start-time orders over a small grid.
    PlatformProfile p;
    p.frame_size = 1000;
    p.control_message_size = 100;
    p.mu_net_remote = Ratio(1);
    p.core_latency = 7;
    const std::vector<Bytes> sizes{2500, 100, 1800};
    std::vector<VirtualTime> grid{0, 500, 1000, 3000};
    int cases = 0;
    for (auto t0 : grid) {
      for (auto t1 : grid) {
        for (auto t2 : grid) {
          Rig rig(p, 5);
          std::vector<VirtualTime> at{t0, t1, t2};
          sim::ModelEngine& e = rig.engine;
          // Sends are injected by wake events so they happen at the right clock.
          for (int i = 0; i < 3; ++i) e.schedule(at[i], {sim::EventKind::driver_wake, 0, static_cast<std::uint64_t>(i), 0});
          e.run_until_idle([&](const sim::ModelEvent& ev) {
            if (ev.kind == sim::EventKind::driver_wake) {
              rig.net.send(req(static_cast<HostId>(ev.id + 1), 4, sizes[ev.id], ev.id));
            } else {
              rig.net.handle(ev);
            }
          });
          REQUIRE(rig.sink.got.size() == 3);
          std::map<std::uint64_t, VirtualTime> when;
          for (auto [id, t] : rig.sink.got) {
            CHECK(when.count(id) == 0);
            when[id] = t;
          }
          Bytes total = 0;
          for (int i = 0; i < 3; ++i) {
            CHECK(when.at(i) >= at[i] + oracle::remote(sizes[i], p));
            total += std::max(sizes[i], p.control_message_size);
          }
          // The receiver serves every byte once: the last delivery is no
          // earlier than the first send plus the total receive work.
          CHECK(std::max({when[0], when[1], when[2]}) >= *std::min_element(at.begin(), at.end()) + total);
          CHECK(rig.net.counters().remote_bytes == total);
          rig.net.check_drained();
          ++cases;
        }
      }
    }
    CHECK(cases == 64);
  }

  TEST_CASE("isolated requests take exactly their unloaded transit") {
    PlatformProfile p;
    Rig rig(p);
    rig.net.send(req(1, 3, 1'000'000, 0));
    rig.run();
    REQUIRE(rig.sink.got.size() == 1);
    CHECK(rig.sink.got[0].second == oracle::remote(1'000'000, p));
  }

  TEST_CASE("a host serializes its outgoing frames") {
    PlatformProfile p;
    const Bytes size = 1'000'000;
    const Duration single = oracle::remote(size, p);
    Rig rig(p, 6);
    for (HostId d = 2; d <= 5; ++d) rig.net.send(req(1, d, size, d));
    rig.run();
    VirtualTime last = 0;
    for (auto [id, t] : rig.sink.got) last = std::max(last, t);
    CHECK(last >= 4 * single);
  }

  TEST_CASE("byte conservation and loopback isolation") {
    PlatformProfile p;
    Rig rig(p);
    Bytes expect_remote = 0;
    Bytes expect_loop = 0;
    const std::vector<std::tuple<HostId, HostId, Bytes>> sends{
        {1, 2, 0}, {1, 1, 5000}, {2, 1, 1'000'000}, {3, 3, 0}, {3, 2, 70'000}, {2, 2, 65536}};
    for (auto [s, d, b] : sends) {
      rig.net.send(req(s, d, b, 0));
      (s == d ? expect_loop : expect_remote) += std::max(b, p.control_message_size);
    }
    rig.run();
    CHECK(rig.net.counters().remote_bytes == expect_remote);
    CHECK(rig.net.counters().loopback_bytes == expect_loop);
    CHECK(rig.net.counters().delivered == sends.size());

    Rig loop(p);
    loop.net.send(req(2, 2, 10'000'000, 0));
    loop.run();
    CHECK(loop.net.counters().remote_bytes == 0);
    CHECK(loop.net.out_queue(2).admitted() == 0);
    CHECK(loop.net.in_queue(2).admitted() == 0);
  }

  TEST_CASE("core cap slows concurrent remote traffic") {
    PlatformProfile p;
    p.core_mu = Ratio(16);  // half the per-host rate
    Rig rig(p);
    rig.net.send(req(1, 2, 1'000'000, 0));
    rig.run();
    CHECK(rig.sink.got.at(0).second >= 16'000'000);
    rig.net.check_drained();
  }

  TEST_CASE("sending to an unknown host is rejected") {
    PlatformProfile p;
    Rig rig(p, 2);
    CHECK_THROWS_AS(rig.net.send(req(0, 5, 10, 0)), SimulationError);
  }
}

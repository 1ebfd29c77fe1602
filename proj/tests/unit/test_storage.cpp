#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "../oracles.hpp"
#include "../support.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/storage/manager.hpp"

using namespace wfsim;
using storage::Manager;

namespace {

EffectivePolicy rr(std::uint32_t stripe, std::uint32_t repl) {
  return {Placement{}, repl, stripe};
}

std::vector<HostId> primaries(const storage::FileMeta& f) {
  std::vector<HostId> out;
  for (const auto& c : f.chunks) out.push_back(c.replicas.front());
  return out;
}

}  // namespace

TEST_SUITE("storage") {
  TEST_CASE("round robin primaries cycle over the stripe set") {
    auto cfg = support::split(3, 1);
    Manager m(cfg, Deployment::layout(cfg));
    auto range = m.allocate("f", 0, 5 * cfg.chunk_size, rr(3, 1), 4);
    CHECK(range.count == 5);
    const auto& f = m.file(m.file_index("f"));
    CHECK(primaries(f) == std::vector<HostId>{1, 2, 3, 1, 2});
    for (const auto& c : f.chunks) CHECK(c.replicas.size() == 1);
  }

  TEST_CASE("stripe sets advance with the cursor") {
    auto cfg = support::split(3, 1);
    Manager m(cfg, Deployment::layout(cfg));
    m.allocate("a", 0, 2 * cfg.chunk_size, rr(2, 1), 4);
    m.allocate("b", 0, 2 * cfg.chunk_size, rr(2, 1), 4);
    CHECK(primaries(m.file(m.file_index("a"))) == std::vector<HostId>{1, 2});
    CHECK(primaries(m.file(m.file_index("b"))) == std::vector<HostId>{2, 3});
  }

  TEST_CASE("local placement puts every primary on the writer") {
    auto cfg = support::collocated(4);
    Manager m(cfg, Deployment::layout(cfg));
    m.allocate("f", 0, 3 * cfg.chunk_size, {Placement{PlacementKind::local, {}}, 1, 4}, 3);
    CHECK(primaries(m.file(m.file_index("f"))) == std::vector<HostId>{3, 3, 3});
  }

  TEST_CASE("local placement without a storage service is a config error") {
    auto cfg = support::split(2, 1);
    Manager m(cfg, Deployment::layout(cfg));
    CHECK_THROWS_AS(m.allocate("f", 0, 10, {Placement{PlacementKind::local, {}}, 1, 2}, 3), ConfigError);
  }

  TEST_CASE("co-locate places on the group host") {
    auto cfg = support::collocated(4);
    Manager m(cfg, Deployment::layout(cfg));
    m.set_group_host("g", 2);
    m.allocate("x", 0, 3 * cfg.chunk_size, {Placement{PlacementKind::co_locate, "g"}, 1, 4}, 4);
    m.allocate("y", 0, 1, {Placement{PlacementKind::co_locate, "g"}, 1, 4}, 1);
    CHECK(primaries(m.file(m.file_index("x"))) == std::vector<HostId>{2, 2, 2});
    CHECK(primaries(m.file(m.file_index("y"))) == std::vector<HostId>{2});
  }

  TEST_CASE("replica chains follow cycle order") {
    // Oracle: replicas of chunk i are the r nodes starting at its primary,
    // first the rest of the stripe set, then other nodes in cyclic order.
    auto cfg = support::split(2, 1);
    Manager m(cfg, Deployment::layout(cfg));
    m.allocate("f", 0, 2 * cfg.chunk_size, rr(2, 2), 3);
    const auto& f = m.file(m.file_index("f"));
    CHECK(f.chunks[0].replicas == std::vector<HostId>{1, 2});
    CHECK(f.chunks[1].replicas == std::vector<HostId>{2, 1});

    auto cfg5 = support::split(5, 1);
    Manager m5(cfg5, Deployment::layout(cfg5));
    m5.allocate("g", 0, 4 * cfg5.chunk_size, rr(2, 3), 6);
    for (const auto& c : m5.file(m5.file_index("g")).chunks) {
      std::set<HostId> distinct(c.replicas.begin(), c.replicas.end());
      CHECK(distinct.size() == 3);
    }
    const auto& g = m5.file(m5.file_index("g"));
    CHECK(g.chunks[0].replicas == std::vector<HostId>{1, 2, 3});
    CHECK(g.chunks[1].replicas == std::vector<HostId>{2, 1, 3});
  }

  TEST_CASE("replication beyond the node count is a config error") {
    auto cfg = support::split(2, 1);
    Manager m(cfg, Deployment::layout(cfg));
    CHECK_THROWS_AS(m.allocate("f", 0, 10, rr(2, 3), 3), ConfigError);
  }

  TEST_CASE("replica_select") {
    std::mt19937_64 rng(42);
    CHECK(storage::replica_select({1, 2}, 1, rng) == 1);
    CHECK(storage::replica_select({2, 1}, 1, rng) == 1);

    std::mt19937_64 a(7), b(7);
    for (int i = 0; i < 20; ++i) CHECK(storage::replica_select({2, 3}, 1, a) == storage::replica_select({2, 3}, 1, b));

    std::mt19937_64 r(12345);
    int twos = 0;
    const int n = 10'000;
    for (int i = 0; i < n; ++i) twos += storage::replica_select({2, 3}, 1, r) == 2;
    CHECK(twos / double(n) == doctest::Approx(0.5).epsilon(0.04));
    CHECK(std::abs(twos / double(n) - 0.5) <= 0.02);
  }

  TEST_CASE("write message counts") {
    for (std::uint32_t repl : {1u, 2u, 3u, 5u}) {
      auto cfg = support::collocated(5);
      cfg.replication_level = repl;
      auto r = support::run(support::single_write("f", 100 * kMB, 1), cfg);
      const auto& w = support::first(r, OpKind::write);
      CHECK(w.manager_requests == 2);
      CHECK(w.chunk_requests == 100);
      CHECK(w.replica_forwards == 100 * (repl - 1));
      CHECK(w.storage_delta == 100 * kMB * repl);
      CHECK(r.storage_final == 100 * kMB * repl);
    }
  }

  TEST_CASE("zero-byte write is two manager round trips") {
    PlatformProfile p;
    auto r = support::run(support::single_write("z", 0, 2), support::split(1, 1), p);
    const auto& w = support::first(r, OpKind::write);
    CHECK(w.manager_requests == 2);
    CHECK(w.chunk_requests == 0);
    CHECK(w.duration() == 2 * oracle::control_round_trip(p));
  }

  TEST_CASE("one chunk at replication 3") {
    auto cfg = support::split(3, 1);
    cfg.replication_level = 3;
    auto r = support::run(support::single_write("f", kMB, 4), cfg);
    const auto& w = support::first(r, OpKind::write);
    CHECK(w.chunk_requests == 1);
    CHECK(w.replica_forwards == 2);
    CHECK(r.storage_final == 3 * kMB);
  }

  TEST_CASE("storage service time") {
    PlatformProfile p;
    CHECK(p.storage_mu(1).ceil_mul(kMB) == 3'000'000);
  }

  TEST_CASE("contention-free writes match the closed form") {
    PlatformProfile p;
    for (Bytes size : {Bytes{1}, kMB, 3 * kMB, 2 * kMB + 12345, 10 * kMB}) {
      auto r = support::run(support::single_write("f", size, 2), support::split(1, 1), p);
      CHECK(support::first(r, OpKind::write).duration() == oracle::write_duration(size, kMB, p));
    }
    // Storage slower than the link.
    p.mu_storage = Ratio(20);
    auto r = support::run(support::single_write("f", 5 * kMB, 2), support::split(1, 1), p);
    CHECK(support::first(r, OpKind::write).duration() == oracle::write_duration(5 * kMB, kMB, p));
  }

  TEST_CASE("contention-free reads match the closed form") {
    PlatformProfile p;
    p.core_latency = 2000;
    p.mu_client = Ratio(100);
    const Bytes size = 4 * kMB + 5;
    const std::string text = "[files]\nin " + std::to_string(size) +
                             "\n[tasks]\ntask r pin=2\n0,0,open,in,0,0\n0,0,read,in,0," + std::to_string(size) +
                             "\n0,0,read,in,0,1\n0,0,read,in,1500000,1000000\n0,0,close,in,0,0\n";
    auto r = support::run(text, support::split(1, 1), p);
    std::vector<const OpRecord*> reads;
    for (const auto& rec : r.records) {
      if (rec.kind == OpKind::read) reads.push_back(&rec);
    }
    REQUIRE(reads.size() == 3);
    CHECK(reads[0]->duration() == oracle::read_duration(0, size, kMB, p));
    CHECK(reads[0]->chunk_requests == 5);
    CHECK(reads[0]->manager_requests == 1);
    CHECK(reads[1]->duration() == oracle::read_duration(0, 1, kMB, p));
    CHECK(reads[1]->chunk_requests == 1);
    CHECK(reads[2]->duration() == oracle::read_duration(1'500'000, 1'000'000, kMB, p));
    CHECK(reads[2]->chunk_requests == 2);
  }

  TEST_CASE("replication chain slows the write ack") {
    PlatformProfile p;
    Duration single = 0;
    Duration prev = 0;
    for (std::uint32_t repl = 1; repl <= 3; ++repl) {
      auto cfg = support::split(3, 1);
      cfg.stripe_width = 1;
      cfg.replication_level = repl;
      auto r = support::run(support::single_write("f", kMB, 4), cfg, p);
      const Duration d = support::first(r, OpKind::write).duration();
      const Duration control = 2 * oracle::control_round_trip(p);
      if (repl == 1) single = d - control;
      CHECK(d >= prev);
      prev = d;
      if (repl == 3) CHECK(d - control >= 3 * (oracle::remote(kMB, p) + oracle::store(kMB, p)));
    }
    CHECK(single > 0);
  }

  TEST_CASE("write time is non-decreasing in replication") {
    for (std::uint32_t stripe : {1u, 3u, 5u}) {
      Duration prev = 0;
      for (std::uint32_t repl = 1; repl <= 5; ++repl) {
        auto cfg = support::collocated(5);
        cfg.stripe_width = stripe;
        cfg.replication_level = repl;
        auto r = support::run(support::single_write("f", 20 * kMB, 1), cfg);
        CHECK(r.makespan >= prev);
        prev = r.makespan;
      }
    }
  }

  TEST_CASE("footprint is chunk-rounded size times replication") {
    auto cfg = support::collocated(4);
    cfg.replication_level = 2;
    const std::string text =
        "[files]\nin 1500000 replication=3\n[tasks]\ntask a pin=1\n0,0,open,in,0,0\n0,0,read,in,0,1500000\n"
        "0,0,close,in,0,0\n0,0,open,out,0,0\n0,0,write,out,0,2500001\n0,0,close,out,0,0\n";
    auto r = support::run(text, cfg);
    CHECK(r.storage_final == 2 * kMB * 3 + 3 * kMB * 2);
    CHECK(r.storage_peak == r.storage_final);
  }

  TEST_CASE("local placement then locality-scheduled read stays off the wire") {
    auto cfg = support::collocated(4);
    const std::string text =
        "[files]\nmid - placement=local\n[tasks]\ntask p pin=3\n0,0,open,mid,0,0\n0,0,write,mid,0,5000000\n"
        "0,0,close,mid,0,0\ntask c pin=1\n0,1,open,mid,0,0\n0,1,read,mid,0,5000000\n0,1,close,mid,0,0\n";
    auto r = support::run(text, cfg);
    const auto& rd = support::first(r, OpKind::read);
    CHECK(rd.host == 3);
    CHECK(rd.data_remote_bytes == 0);
    CHECK(support::first(r, OpKind::write).data_remote_bytes == 0);
  }

  TEST_CASE("reading past the committed size is a workload error with the op") {
    const std::string text =
        "[files]\nin 100\n[tasks]\ntask r pin=2\n0,0,open,in,0,0\n0,0,read,in,50,100\n0,0,close,in,0,0\n";
    try {
      support::run(text, support::split(1, 1));
      FAIL("expected a workload error");
    } catch (const WorkloadError& e) {
      REQUIRE(e.op_id());
      CHECK(*e.op_id() == 1);
      CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }
  }
}

#include <doctest.h>

#include <string>
#include <vector>

#include "wfsim/errors.hpp"
#include "wfsim/sim/engine.hpp"
#include "wfsim/sim/service_queue.hpp"

using namespace wfsim;

TEST_SUITE("sim") {
  TEST_CASE("events run in time order, simultaneous ones in insertion order") {
    sim::Engine<std::string> e;
    e.schedule(20, "c");
    e.schedule(10, "a");
    e.schedule(20, "d");
    e.schedule(10, "b");
    std::vector<std::string> seen;
    std::vector<VirtualTime> at;
    e.run_until_idle([&](const std::string& s) {
      seen.push_back(s);
      at.push_back(e.now());
    });
    CHECK(seen == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(at == std::vector<VirtualTime>{10, 10, 20, 20});
    CHECK(e.events_processed() == 4);
    CHECK(e.idle());
  }

  TEST_CASE("handlers can schedule at the current time") {
    sim::Engine<int> e;
    e.schedule(5, 0);
    std::vector<int> seen;
    e.run_until_idle([&](int v) {
      seen.push_back(v);
      if (v < 3) e.schedule_in(0, v + 1);
    });
    CHECK(seen == std::vector<int>{0, 1, 2, 3});
    CHECK(e.now() == 5);
  }

  TEST_CASE("scheduling in the past is a model error") {
    sim::Engine<int> e;
    e.schedule(10, 1);
    e.run_until_idle([](int) {});
    CHECK_THROWS_AS(e.schedule(9, 2), SimulationError);
    CHECK_NOTHROW(e.schedule(10, 2));
  }

  TEST_CASE("event budget stops runaway models") {
    sim::Engine<int> e(100);
    e.schedule(0, 0);
    CHECK_THROWS_AS(e.run_until_idle([&](int v) { e.schedule_in(1, v + 1); }), SimulationError);
    CHECK(e.events_processed() == 100);
  }

  TEST_CASE("service queue is FIFO with deterministic service") {
    sim::ServiceQueue q(sim::EntityId{3, sim::ServiceKind::storage});
    auto a = q.admit(0, 10);
    auto b = q.admit(2, 5);
    auto c = q.admit(30, 1);
    CHECK(a.start == 0);
    CHECK(a.end == 10);
    CHECK(b.start == 10);
    CHECK(b.end == 15);
    CHECK(c.start == 30);
    CHECK(q.in_flight() == 3);
    q.complete();
    q.complete();
    q.complete();
    CHECK_THROWS_AS(q.complete(), SimulationError);
    CHECK(q.busy_time() == 16);
  }

  TEST_CASE("cut-through admission waits for the tail") {
    sim::ServiceQueue q;
    auto s = q.admit_not_before(0, 10, 25);
    CHECK(s.start == 0);
    CHECK(s.end == 25);
    auto t = q.admit_not_before(0, 10, 0);
    CHECK(t.start == 25);
    CHECK(t.end == 35);
  }
}

#include <doctest.h>

#include <sstream>

#include "../support.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/synthgen.hpp"

using namespace wfsim;

namespace {

OpRecord rec(std::uint32_t task, VirtualTime s, VirtualTime e, Bytes remote = 0) {
  OpRecord r;
  r.task = task;
  r.start = s;
  r.end = e;
  r.remote_bytes = remote;
  return r;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("aggregate") {
    auto r = aggregate({rec(0, 0, 5, 10), rec(0, 2, 9, 7)}, {0});
    CHECK(r.makespan == 9);
    CHECK(r.totals.ops == 2);
    CHECK(r.totals.remote_bytes == 17);

    auto empty = aggregate({}, {});
    CHECK(empty.makespan == 0);
    CHECK(empty.totals == Totals{});
    CHECK(empty.stages.empty());
  }

  TEST_CASE("stage windows") {
    auto r = aggregate({rec(0, 0, 5), rec(1, 5, 12), rec(2, 6, 9)}, {0, 1, 1});
    REQUIRE(r.stages.size() == 2);
    CHECK(r.stages[0].end == 5);
    CHECK(r.stages[1].start == 5);
    CHECK(r.stages[1].end == 12);
    CHECK(r.stages[1].tasks == 2);
    CHECK(r.stages[1].totals.ops == 2);
  }

  TEST_CASE("reduce workload reports two stages inside the makespan") {
    synthgen::PatternSpec s;
    s.pattern = synthgen::Pattern::reduce;
    s.width = 4;
    s.input_size = s.intermediate_size = s.output_size = 2 * kMB;
    auto r = support::run(synthgen::gen_reduce(s), support::collocated(4));
    REQUIRE(r.stages.size() == 2);
    for (const auto& st : r.stages) {
      CHECK(st.start >= r.first_start);
      CHECK(st.end <= r.last_end);
    }
    Totals sum;
    for (const auto& x : r.records) {
      sum.remote_bytes += x.remote_bytes;
      sum.manager_requests += x.manager_requests;
    }
    CHECK(sum.remote_bytes == r.totals.remote_bytes);
    CHECK(sum.manager_requests == r.totals.manager_requests);
  }

  TEST_CASE("compare") {
    auto rank = compare({{"A", 5'000'000'000}, {"B", 3'000'000'000}, {"C", 7'000'000'000}});
    REQUIRE(rank.size() == 3);
    CHECK(rank[0].label == "B");
    CHECK(rank[1].label == "A");
    CHECK(rank[2].label == "C");
    CHECK(rank[2].group == 3);

    rank = compare({{"A", 100'000'000'000}, {"B", 100'500'000'000}});
    CHECK(rank[1].equivalent_to_previous);
    CHECK(rank[1].group == 1);

    rank = compare({{"A", 100}, {"B", 103}}, 0.02);
    CHECK_FALSE(rank[1].equivalent_to_previous);

    rank = compare({{"only", 1}});
    REQUIRE(rank.size() == 1);
    CHECK(rank[0].rank == 1);
  }

  TEST_CASE("json summary round trip and csv") {
    auto r = support::run(support::single_write("f", 3 * kMB, 2), support::split(1, 1));
    const auto text = report_to_json(r);
    CHECK(text.find("wall") == std::string::npos);
    auto back = report_from_json(text);
    CHECK(back.makespan == r.makespan);
    CHECK(back.totals == r.totals);
    CHECK(back.stages == r.stages);
    CHECK(report_to_json(back) == text);
    CHECK_THROWS_AS(report_from_json("{"), ParseError);

    std::ostringstream csv;
    write_records_csv(csv, r);
    const auto s = csv.str();
    CHECK(s.rfind("op_id,task,", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
  }
}

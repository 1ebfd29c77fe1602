#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wfsim/ops.hpp"
#include "wfsim/units.hpp"

namespace wfsim {

// What one trace operation cost. Network bytes are wire bytes (payload or
// control-message size) of every message the operation generated; the data_*
// fields count chunk payload only.
struct OpRecord {
  std::uint64_t op_id = 0;
  std::uint32_t task = 0;
  std::uint32_t trace_client = 0;
  HostId host = 0;
  OpKind kind = OpKind::open;
  std::uint32_t file = 0;
  Bytes offset = 0;
  Bytes size = 0;
  VirtualTime start = 0;
  VirtualTime end = 0;

  Bytes remote_bytes = 0;
  Bytes loopback_bytes = 0;
  Bytes data_remote_bytes = 0;
  Bytes data_loopback_bytes = 0;
  std::uint32_t control_messages = 0;
  std::uint32_t manager_requests = 0;
  std::uint32_t chunk_requests = 0;   // client -> storage writes or chunk fetches
  std::uint32_t replica_forwards = 0;  // storage -> storage replication transfers
  Bytes storage_delta = 0;

  Duration duration() const noexcept { return end - start; }
  friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

struct Totals {
  std::uint64_t ops = 0;
  Bytes remote_bytes = 0;
  Bytes loopback_bytes = 0;
  Bytes data_remote_bytes = 0;
  Bytes data_loopback_bytes = 0;
  std::uint64_t control_messages = 0;
  std::uint64_t manager_requests = 0;
  std::uint64_t chunk_requests = 0;
  std::uint64_t replica_forwards = 0;
  Bytes storage_delta = 0;
  friend bool operator==(const Totals&, const Totals&) = default;
};

// A stage is a topological level of the task graph. Its window covers the
// operations of its tasks; windows of different stages may overlap.
struct StageSummary {
  std::uint32_t stage = 0;
  std::uint32_t tasks = 0;
  VirtualTime start = 0;
  VirtualTime end = 0;
  Totals totals;
  friend bool operator==(const StageSummary&, const StageSummary&) = default;
};

struct RunReport {
  VirtualTime first_start = 0;
  VirtualTime last_end = 0;
  Duration makespan = 0;
  Totals totals;
  std::vector<StageSummary> stages;
  Bytes storage_final = 0;
  Bytes storage_peak = 0;
  std::uint64_t events = 0;
  double wall_seconds = 0.0;  // informational; never serialized into report files

  std::vector<OpRecord> records;
  std::vector<std::string> task_names;
  std::vector<std::string> file_names;
};

// Folds records into totals, stage windows and makespan. task_stage maps a
// record's task index to its stage; records of tasks outside it land in stage 0.
RunReport aggregate(std::vector<OpRecord> records, const std::vector<std::uint32_t>& task_stage);

struct RankEntry {
  std::string label;
  std::size_t index = 0;  // position in the input
  Duration makespan = 0;
  std::size_t rank = 0;   // 1-based position after sorting
  std::size_t group = 0;  // 1-based equivalence group
  bool equivalent_to_previous = false;
};

inline constexpr double kDefaultEquivalenceBand = 0.02;

struct Labeled {
  std::string label;
  Duration makespan = 0;
};

// Ascending by makespan (ties by input order). A run opens a new group unless
// it is within `band` (relative) of its group's fastest member.
std::vector<RankEntry> compare(const std::vector<Labeled>& runs, double band = kDefaultEquivalenceBand);

// Serialization. Output is deterministic for identical reports.
std::string report_to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);
void write_records_csv(std::ostream& out, const RunReport& r);
void write_ranking_csv(std::ostream& out, const std::vector<RankEntry>& ranking);

}  // namespace wfsim

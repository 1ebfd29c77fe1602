#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/profile.hpp"
#include "wfsim/report.hpp"
#include "wfsim/workload/driver.hpp"
#include "wfsim/workload/workload.hpp"

namespace wfsim::sweep {

// Empty axes are an error; use a single value to hold a knob fixed.
struct Axes {
  std::vector<std::uint32_t> stripe_widths;
  std::vector<std::uint32_t> replication_levels;
  std::vector<Bytes> chunk_sizes;
  std::vector<Placement> placements;

  static Axes fixed(const StorageConfig& base);
};

enum class Status : std::uint8_t { ok, skipped, failed };
std::string to_string(Status s);

struct Point {
  std::size_t index = 0;
  std::string label;
  StorageConfig config;
  Status status = Status::ok;
  std::string note;
};

// Cartesian product in stripe, replication, chunk, placement order (last
// axis fastest). Combinations the deployment cannot host are marked skipped.
std::vector<Point> expand(const StorageConfig& base, const Axes& axes);

struct Result {
  std::vector<Point> points;
  std::vector<std::optional<RunReport>> reports;  // by point index
  std::vector<RankEntry> ranking;                 // over points that ran; index is the point index
};

// Each point runs on its own simulator instance; results are ordered by point
// index whatever the completion order.
Result run(const workload::Workload& w, std::vector<Point> points, const PlatformProfile& profile,
           const workload::DriveOptions& options = {}, double band = kDefaultEquivalenceBand);
Result run_serial(const workload::Workload& w, std::vector<Point> points, const PlatformProfile& profile,
                  const workload::DriveOptions& options = {}, double band = kDefaultEquivalenceBand);

// One row per point: index,label,stripe_width,replication_level,chunk_size,
// placement,status,makespan_ns,rank,group,note.
void write_table_csv(std::ostream& out, const Result& r);

}  // namespace wfsim::sweep

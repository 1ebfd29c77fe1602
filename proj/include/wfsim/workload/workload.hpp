#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/ops.hpp"
#include "wfsim/units.hpp"

namespace wfsim::workload {

struct TraceOp {
  Duration timestamp = 0;  // offset within the task; gaps become compute time
  std::uint32_t client = 0;
  OpKind op = OpKind::open;
  std::string file;
  Bytes offset = 0;
  Bytes size = 0;

  std::uint64_t id = 0;   // global position in the trace
  std::size_t line = 0;   // source line, 0 when built in memory
};

struct Task {
  std::string id;
  std::optional<HostId> pin;
  std::vector<TraceOp> ops;
  std::size_t line = 0;
};

// A [files] entry: a concrete file (with a size when it is a workload input)
// or a glob pattern carrying only overrides.
struct FileDecl {
  std::string name;
  std::optional<Bytes> size;
  FilePolicy policy;
  std::optional<HostId> origin;
  std::size_t line = 0;

  bool is_pattern() const noexcept;
};

struct GroupDecl {
  std::string name;
  std::optional<std::string> task;
  std::optional<HostId> host;
  std::size_t line = 0;
};

// Derived from file production and consumption: B depends on A iff B reads
// a file A writes.
struct TaskGraph {
  std::vector<std::vector<std::string>> inputs;   // by task, sorted
  std::vector<std::vector<std::string>> outputs;  // by task, sorted
  std::vector<std::vector<std::uint32_t>> producers;  // by task, sorted
  std::vector<std::vector<std::uint32_t>> consumers;  // by task, sorted
  std::vector<std::uint32_t> stage;  // topological level
  std::vector<std::uint32_t> topo_order;
  std::map<std::string, std::uint32_t> producer_of;
  std::vector<std::string> preloaded;  // inputs not produced by any task, in [files] order
  std::uint32_t n_stages = 0;
};

struct Workload {
  std::vector<FileDecl> files;
  std::vector<GroupDecl> groups;
  std::vector<Task> tasks;
  TaskGraph graph;

  std::size_t op_count() const;
  std::optional<std::uint32_t> task_index(std::string_view id) const;
  const FileDecl* find_decl(std::string_view name) const;  // exact names only
  // Exact entry first, then the first matching pattern.
  FilePolicy policy_for(std::string_view name) const;
};

// Parses and validates. Syntax problems raise ParseError with the line;
// semantic problems (cycles, read-before-write, bad op order) raise
// WorkloadError naming the offending file, task or cycle.
Workload parse_workload(std::string_view text);

// Builds graph from files/groups/tasks, assigns op ids, validates.
void finalize(Workload& w);

// Canonical text form; parse_workload(serialize(w)) reproduces w.
std::string serialize(const Workload& w);

bool same_content(const Workload& a, const Workload& b);  // ignores source lines

}  // namespace wfsim::workload

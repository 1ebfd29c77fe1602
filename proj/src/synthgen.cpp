#include "wfsim/synthgen.hpp"

#include <algorithm>
#include <optional>

#include "wfsim/errors.hpp"
#include "wfsim/workload/workload.hpp"

namespace wfsim::synthgen {

namespace {

using workload::FileDecl;
using workload::GroupDecl;
using workload::Task;
using workload::TraceOp;
using workload::Workload;

void add_op(Task& t, std::uint32_t client, OpKind kind, const std::string& file, Bytes offset = 0, Bytes size = 0) {
  TraceOp op;
  op.client = client;
  op.op = kind;
  op.file = file;
  op.offset = offset;
  op.size = size;
  t.ops.push_back(std::move(op));
}

void read_whole(Task& t, std::uint32_t client, const std::string& file, Bytes size) {
  add_op(t, client, OpKind::open, file);
  add_op(t, client, OpKind::read, file, 0, size);
  add_op(t, client, OpKind::close, file);
}

void write_whole(Task& t, std::uint32_t client, const std::string& file, Bytes size) {
  add_op(t, client, OpKind::open, file);
  add_op(t, client, OpKind::write, file, 0, size);
  add_op(t, client, OpKind::close, file);
}

Task make_task(std::string id, std::optional<HostId> pin) {
  Task t;
  t.id = std::move(id);
  t.pin = pin;
  return t;
}

FileDecl input_decl(const std::string& name, Bytes size, bool local, HostId origin) {
  FileDecl d;
  d.name = name;
  d.size = size;
  if (local) {
    d.policy.placement = Placement{PlacementKind::local, {}};
    d.origin = origin;
  }
  return d;
}

FileDecl override_decl(const std::string& name, FilePolicy policy) {
  FileDecl d;
  d.name = name;
  d.policy = std::move(policy);
  return d;
}

FilePolicy local_policy() {
  FilePolicy p;
  p.placement = Placement{PlacementKind::local, {}};
  return p;
}

void check_width(const PatternSpec& s) {
  if (s.width == 0) throw ConfigError("width must be >= 1");
  if (s.scale == 0) throw ConfigError("scale must be >= 1");
}

std::string emit(Workload& w) {
  workload::finalize(w);
  return workload::serialize(w);
}

std::string idx(std::uint32_t i) { return std::to_string(i); }

}  // namespace

Pattern parse_pattern(const std::string& name) {
  if (name == "micro_write" || name == "micro-write") return Pattern::micro_write;
  if (name == "micro_read" || name == "micro-read") return Pattern::micro_read;
  if (name == "pipeline") return Pattern::pipeline;
  if (name == "reduce") return Pattern::reduce;
  if (name == "broadcast") return Pattern::broadcast;
  if (name == "blast") return Pattern::blast;
  throw ConfigError("unknown pattern '" + name + "'");
}

std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::micro_write: return "micro_write";
    case Pattern::micro_read: return "micro_read";
    case Pattern::pipeline: return "pipeline";
    case Pattern::reduce: return "reduce";
    case Pattern::broadcast: return "broadcast";
    case Pattern::blast: return "blast";
  }
  return "?";
}

std::string gen_micro(const PatternSpec& spec) {
  if (spec.repetitions == 0) throw ConfigError("repetitions must be >= 1");
  const Bytes size = spec.intermediate_size * spec.scale;
  const HostId host = spec.first_host;
  Workload w;
  if (spec.pattern == Pattern::micro_read) {
    // Reads need something to read: a setup task writes the files first.
    Task setup = make_task("setup", host);
    for (std::uint32_t k = 0; k < spec.repetitions; ++k) write_whole(setup, 0, "micro_" + idx(k), size);
    w.tasks.push_back(std::move(setup));
  }
  Task t = make_task("micro", host);
  for (std::uint32_t k = 0; k < spec.repetitions; ++k) {
    const std::string f = "micro_" + idx(k);
    if (spec.pattern == Pattern::micro_read) {
      read_whole(t, 0, f, size);
    } else {
      write_whole(t, 0, f, size);
    }
  }
  w.tasks.push_back(std::move(t));
  return emit(w);
}

std::string gen_pipeline(const PatternSpec& spec) {
  check_width(spec);
  if (spec.stages == 0) throw ConfigError("stages must be >= 1");
  const Bytes in_size = spec.input_size * spec.scale;
  const Bytes mid_size = spec.intermediate_size * spec.scale;
  const Bytes out_size = spec.output_size * spec.scale;
  Workload w;
  for (std::uint32_t i = 0; i < spec.width; ++i) {
    w.files.push_back(input_decl("pipe" + idx(i) + "_in", in_size, spec.wass, spec.first_host + i));
  }
  if (spec.wass) w.files.push_back(override_decl("pipe*_s*", local_policy()));
  for (std::uint32_t i = 0; i < spec.width; ++i) {
    const HostId host = spec.first_host + i;
    std::string prev = "pipe" + idx(i) + "_in";
    Bytes prev_size = in_size;
    for (std::uint32_t k = 1; k <= spec.stages; ++k) {
      Task t = make_task("pipe" + idx(i) + "_stage" + idx(k), host);
      const std::string out = "pipe" + idx(i) + "_s" + idx(k);
      const Bytes size = k == spec.stages ? out_size : mid_size;
      read_whole(t, i, prev, prev_size);
      write_whole(t, i, out, size);
      w.tasks.push_back(std::move(t));
      prev = out;
      prev_size = size;
    }
  }
  return emit(w);
}

std::string gen_reduce(const PatternSpec& spec) {
  check_width(spec);
  const Bytes in_size = spec.input_size * spec.scale;
  const Bytes mid_size = spec.intermediate_size * spec.scale;
  const Bytes out_size = spec.output_size * spec.scale;
  const HostId reduce_host = spec.first_host;
  Workload w;
  for (std::uint32_t i = 0; i < spec.width; ++i) {
    w.files.push_back(input_decl("red" + idx(i) + "_in", in_size, spec.wass, spec.first_host + i));
  }
  if (spec.wass) {
    FilePolicy co;
    co.placement = Placement{PlacementKind::co_locate, "gather"};
    w.files.push_back(override_decl("red*_mid", co));
    w.files.push_back(override_decl("reduce_out", local_policy()));
    w.groups.push_back(GroupDecl{"gather", std::string("reduce"), std::nullopt, 0});
  }
  for (std::uint32_t i = 0; i < spec.width; ++i) {
    Task t = make_task("red" + idx(i), spec.first_host + i);
    read_whole(t, i, "red" + idx(i) + "_in", in_size);
    write_whole(t, i, "red" + idx(i) + "_mid", mid_size);
    w.tasks.push_back(std::move(t));
  }
  Task r = make_task("reduce", reduce_host);
  for (std::uint32_t i = 0; i < spec.width; ++i) read_whole(r, 0, "red" + idx(i) + "_mid", mid_size);
  write_whole(r, 0, "reduce_out", out_size);
  w.tasks.push_back(std::move(r));
  return emit(w);
}

std::string gen_broadcast(const PatternSpec& spec) {
  check_width(spec);
  if (spec.replication == 0) throw ConfigError("replication must be >= 1");
  const Bytes in_size = spec.input_size * spec.scale;
  const Bytes mid_size = spec.intermediate_size * spec.scale;
  const Bytes out_size = spec.output_size * spec.scale;
  Workload w;
  w.files.push_back(input_decl("bcast_in", in_size, spec.wass, spec.first_host));
  FilePolicy rep;
  rep.replication_level = spec.replication;
  w.files.push_back(override_decl("bcast_shared", rep));
  if (spec.wass) w.files.push_back(override_decl("bcast*_out", local_policy()));
  Task p = make_task("producer", spec.first_host);
  read_whole(p, 0, "bcast_in", in_size);
  write_whole(p, 0, "bcast_shared", mid_size);
  w.tasks.push_back(std::move(p));
  for (std::uint32_t i = 0; i < spec.width; ++i) {
    Task c = make_task("consumer" + idx(i), spec.first_host + i);
    read_whole(c, i, "bcast_shared", mid_size);
    write_whole(c, i, "bcast" + idx(i) + "_out", out_size);
    w.tasks.push_back(std::move(c));
  }
  return emit(w);
}

std::string gen_blast(const PatternSpec& spec) {
  check_width(spec);
  if (spec.replication == 0) throw ConfigError("replication must be >= 1");
  if (spec.db_read_size <= 0) throw ConfigError("db_read_size must be > 0");
  const Bytes db = spec.db_size * spec.scale;
  Workload w;
  for (std::uint32_t i = 0; i < spec.width; ++i) {
    w.files.push_back(input_decl("query" + idx(i), spec.query_size, spec.wass, spec.first_host + i));
  }
  w.files.push_back(input_decl("db_source", db, false, spec.first_host));
  FilePolicy rep;
  rep.replication_level = spec.replication;
  w.files.push_back(override_decl("db", rep));
  if (spec.wass) w.files.push_back(override_decl("result*", local_policy()));

  Task stage = make_task("stage_db", spec.first_host);
  read_whole(stage, 0, "db_source", db);
  write_whole(stage, 0, "db", db);
  w.tasks.push_back(std::move(stage));

  for (std::uint32_t i = 0; i < spec.width; ++i) {
    Task s = make_task("search" + idx(i), spec.first_host + i);
    read_whole(s, i, "query" + idx(i), spec.query_size);
    add_op(s, i, OpKind::open, "db");
    for (Bytes off = 0; off < db; off += spec.db_read_size) {
      add_op(s, i, OpKind::read, "db", off, std::min(spec.db_read_size, db - off));
    }
    add_op(s, i, OpKind::close, "db");
    write_whole(s, i, "result" + idx(i), spec.result_size);
    w.tasks.push_back(std::move(s));
  }
  Task g = make_task("gather", spec.first_host);
  for (std::uint32_t i = 0; i < spec.width; ++i) read_whole(g, 0, "result" + idx(i), spec.result_size);
  write_whole(g, 0, "blast_out", spec.result_size * spec.width);
  w.tasks.push_back(std::move(g));
  return emit(w);
}

std::string generate(const PatternSpec& spec) {
  switch (spec.pattern) {
    case Pattern::micro_write:
    case Pattern::micro_read: return gen_micro(spec);
    case Pattern::pipeline: return gen_pipeline(spec);
    case Pattern::reduce: return gen_reduce(spec);
    case Pattern::broadcast: return gen_broadcast(spec);
    case Pattern::blast: return gen_blast(spec);
  }
  throw ConfigError("bad pattern");
}

StorageConfig testbed_config(std::uint32_t nodes) {
  StorageConfig cfg;
  cfg.n_hosts = nodes + 1;
  cfg.n_storage_nodes = nodes;
  cfg.n_clients = nodes;
  cfg.collocated = true;
  cfg.chunk_size = kMB;
  cfg.stripe_width = nodes;
  cfg.replication_level = 1;
  return cfg;
}

std::vector<std::pair<std::string, StorageConfig>> micro_configs(const StorageConfig& base,
                                                                 const std::vector<std::uint32_t>& stripes,
                                                                 const std::vector<std::uint32_t>& replications) {
  std::vector<std::pair<std::string, StorageConfig>> out;
  for (auto s : stripes) {
    for (auto r : replications) {
      StorageConfig c = base;
      c.stripe_width = s;
      c.replication_level = r;
      out.emplace_back("stripe" + std::to_string(s) + "_repl" + std::to_string(r), c);
    }
  }
  return out;
}

}  // namespace wfsim::synthgen

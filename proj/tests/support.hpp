#pragma once

#include <string>

#include "wfsim/config.hpp"
#include "wfsim/profile.hpp"
#include "wfsim/report.hpp"
#include "wfsim/workload/driver.hpp"
#include "wfsim/workload/workload.hpp"

namespace support {

// Manager on host 0, storage on 1..storage, clients after them.
inline wfsim::StorageConfig split(std::uint32_t storage = 1, std::uint32_t clients = 1) {
  wfsim::StorageConfig c;
  c.n_storage_nodes = storage;
  c.n_clients = clients;
  c.collocated = false;
  c.n_hosts = 1 + storage + clients;
  c.stripe_width = storage;
  c.replication_level = 1;
  return c;
}

inline wfsim::StorageConfig collocated(std::uint32_t nodes) {
  wfsim::StorageConfig c;
  c.n_storage_nodes = nodes;
  c.n_clients = nodes;
  c.collocated = true;
  c.n_hosts = 1 + nodes;
  c.stripe_width = nodes;
  c.replication_level = 1;
  return c;
}

inline wfsim::RunReport run(const std::string& text, const wfsim::StorageConfig& cfg,
                            const wfsim::PlatformProfile& profile = {}, std::uint64_t seed = 1) {
  auto w = wfsim::workload::parse_workload(text);
  wfsim::workload::DriveOptions opt;
  opt.seed = seed;
  return wfsim::workload::drive(w, cfg, profile, opt);
}

inline std::string single_write(const std::string& file, long long size, unsigned host) {
  return "[tasks]\ntask w pin=" + std::to_string(host) + "\n0,0,open," + file + ",0,0\n0,0,write," + file + ",0," +
         std::to_string(size) + "\n0,0,close," + file + ",0,0\n";
}

// First record of the given kind.
inline const wfsim::OpRecord& first(const wfsim::RunReport& r, wfsim::OpKind kind) {
  for (const auto& rec : r.records) {
    if (rec.kind == kind) return rec;
  }
  throw std::runtime_error("no record of that kind");
}

}  // namespace support

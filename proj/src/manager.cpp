#include "wfsim/storage/manager.hpp"

#include <algorithm>

#include "wfsim/errors.hpp"

namespace wfsim::storage {

ChunkRange chunks_covering(Bytes offset, Bytes size, Bytes chunk_size) {
  if (size <= 0) return {static_cast<std::uint32_t>(offset / chunk_size), 0};
  auto first = static_cast<std::uint32_t>(offset / chunk_size);
  auto last = static_cast<std::uint32_t>((offset + size - 1) / chunk_size);
  return {first, last - first + 1};
}

Manager::Manager(const StorageConfig& cfg, const Deployment& deployment)
    : chunk_size_(cfg.chunk_size),
      storage_hosts_(deployment.storage_hosts),
      storage_on_(deployment.storage_on),
      usage_(deployment.n_hosts, 0) {}

void Manager::set_group_host(const std::string& group, HostId host) {
  if (host >= storage_on_.size() || !storage_on_[host]) {
    throw ConfigError("co-locate group '" + group + "' targets host " + std::to_string(host) +
                      " which runs no storage service");
  }
  group_host_[group] = host;
}

std::uint32_t Manager::file_index(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw WorkloadError("no such file '" + name + "'");
  return it->second;
}

std::vector<HostId> Manager::stripe_for(const EffectivePolicy& policy, HostId writer) {
  const auto n = static_cast<std::uint32_t>(storage_hosts_.size());
  if (policy.replication_level == 0 || policy.replication_level > n) {
    throw ConfigError("replication level " + std::to_string(policy.replication_level) + " needs more than the " +
                      std::to_string(n) + " storage nodes available");
  }
  if (policy.replication_level > 64) throw ConfigError("replication level above 64 is not supported");
  switch (policy.placement.kind) {
    case PlacementKind::round_robin: {
      if (policy.stripe_width == 0 || policy.stripe_width > n) {
        throw ConfigError("stripe width " + std::to_string(policy.stripe_width) + " outside [1, " +
                          std::to_string(n) + "]");
      }
      std::vector<HostId> stripe;
      for (std::uint32_t i = 0; i < policy.stripe_width; ++i) stripe.push_back(storage_hosts_[(cursor_ + i) % n]);
      cursor_ = (cursor_ + 1) % n;
      return stripe;
    }
    case PlacementKind::local:
      if (writer >= storage_on_.size() || !storage_on_[writer]) {
        throw ConfigError("local placement requested from host " + std::to_string(writer) +
                          " which runs no storage service");
      }
      return {writer};
    case PlacementKind::co_locate: {
      auto it = group_host_.find(policy.placement.group);
      if (it == group_host_.end()) {
        throw ConfigError("co-locate group '" + policy.placement.group + "' has no target host");
      }
      return {it->second};
    }
  }
  throw ConfigError("bad placement");
}

// Chain for chunk i: the stripe set rotated to start at the chunk's primary,
// followed by the remaining storage nodes in cyclic order after the stripe.
std::vector<HostId> Manager::replica_chain(const FileMeta& f, std::uint32_t chunk_index) const {
  const auto w = static_cast<std::uint32_t>(f.stripe.size());
  const std::uint32_t r = f.policy.replication_level;
  std::vector<HostId> chain;
  chain.reserve(r);
  for (std::uint32_t k = 0; k < w && chain.size() < r; ++k) chain.push_back(f.stripe[(chunk_index + k) % w]);
  if (chain.size() < r) {
    const auto n = static_cast<std::uint32_t>(storage_hosts_.size());
    auto last = std::find(storage_hosts_.begin(), storage_hosts_.end(), f.stripe.back()) - storage_hosts_.begin();
    for (std::uint32_t k = 1; k <= n && chain.size() < r; ++k) {
      HostId h = storage_hosts_[(last + k) % n];
      if (std::find(f.stripe.begin(), f.stripe.end(), h) == f.stripe.end()) chain.push_back(h);
    }
  }
  return chain;
}

ChunkRange Manager::allocate(const std::string& file, Bytes offset, Bytes size, const EffectivePolicy& policy,
                             HostId writer) {
  auto it = by_name_.find(file);
  std::uint32_t idx;
  if (it == by_name_.end()) {
    FileMeta meta;
    meta.name = file;
    meta.policy = policy;
    meta.stripe = stripe_for(policy, writer);
    idx = static_cast<std::uint32_t>(files_.size());
    files_.push_back(std::move(meta));
    by_name_.emplace(file, idx);
  } else {
    idx = it->second;
  }
  FileMeta& f = files_[idx];
  ChunkRange range = chunks_covering(offset, size, chunk_size_);
  const std::uint32_t needed = range.first + range.count;
  while (f.chunks.size() < needed) {
    auto ci = static_cast<std::uint32_t>(f.chunks.size());
    f.chunks.push_back({next_chunk_id_++, replica_chain(f, ci), 0, 0});
  }
  f.allocated_size = std::max(f.allocated_size, offset + size);
  return range;
}

void Manager::commit(const std::string& file, Bytes end) {
  FileMeta& f = files_.at(file_index(file));
  f.size = std::max(f.size, end);
  f.committed = true;
}

Bytes Manager::record_store(std::uint32_t file, std::uint32_t chunk, std::uint32_t replica_index,
                            Bytes end_in_chunk) {
  FileMeta& f = files_.at(file);
  ChunkPlacement& c = f.chunks.at(chunk);
  c.stored_bytes = std::max(c.stored_bytes, end_in_chunk);
  const std::uint64_t bit = std::uint64_t{1} << replica_index;
  if (c.stored_mask & bit) return 0;
  c.stored_mask |= bit;
  usage_.at(c.replicas.at(replica_index)) += chunk_size_;
  footprint_ += chunk_size_;
  return chunk_size_;
}

HostId replica_select(const std::vector<HostId>& replicas, HostId reader, std::mt19937_64& rng) {
  if (replicas.empty()) throw SimulationError("chunk without replicas");
  if (std::find(replicas.begin(), replicas.end(), reader) != replicas.end()) return reader;
  if (replicas.size() == 1) return replicas.front();
  return replicas[rng() % replicas.size()];
}

}  // namespace wfsim::storage

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/units.hpp"

namespace wfsim::storage {

struct ChunkPlacement {
  std::uint64_t chunk_id = 0;
  std::vector<HostId> replicas;  // replicas[0] is the primary; chain order
  std::uint64_t stored_mask = 0;   // bit k: replica k has been written at least once
  Bytes stored_bytes = 0;          // highest byte offset written within the chunk
};

struct FileMeta {
  std::string name;
  Bytes size = 0;            // committed size, readable
  Bytes allocated_size = 0;  // covered by the chunk map
  bool committed = false;
  bool preloaded = false;
  EffectivePolicy policy{};
  std::vector<HostId> stripe;  // primaries cycle over this set
  std::vector<ChunkPlacement> chunks;
};

// Chunk indices [first, first + count) touched by a byte range.
struct ChunkRange {
  std::uint32_t first = 0;
  std::uint32_t count = 0;
};

ChunkRange chunks_covering(Bytes offset, Bytes size, Bytes chunk_size);

// Metadata manager: file -> chunk map, data placement, per-host usage.
class Manager {
 public:
  Manager(const StorageConfig& cfg, const Deployment& deployment);

  void set_group_host(const std::string& group, HostId host);

  // Ensures chunks covering [offset, offset+size) exist and returns them.
  // New files take their stripe set from the policy; new chunks get
  // replication_level distinct replicas. Throws ConfigError when the policy
  // cannot be honored.
  ChunkRange allocate(const std::string& file, Bytes offset, Bytes size, const EffectivePolicy& policy,
                      HostId writer);

  // Makes [0, end) readable.
  void commit(const std::string& file, Bytes end);

  // Records that replica `replica_index` of a chunk holds `end_in_chunk`
  // bytes. Returns the footprint added (chunk_size on first store, else 0).
  Bytes record_store(std::uint32_t file, std::uint32_t chunk, std::uint32_t replica_index, Bytes end_in_chunk);

  std::uint32_t file_index(const std::string& name) const;  // throws WorkloadError
  bool exists(const std::string& name) const { return by_name_.count(name) != 0; }
  const FileMeta& file(std::uint32_t index) const { return files_.at(index); }
  FileMeta& file_mut(std::uint32_t index) { return files_.at(index); }
  const std::vector<FileMeta>& files() const noexcept { return files_; }

  const std::vector<Bytes>& usage() const noexcept { return usage_; }  // by host
  Bytes footprint() const noexcept { return footprint_; }
  std::uint32_t cursor() const noexcept { return cursor_; }
  Bytes chunk_size() const noexcept { return chunk_size_; }

 private:
  std::vector<HostId> stripe_for(const EffectivePolicy& policy, HostId writer);
  std::vector<HostId> replica_chain(const FileMeta& f, std::uint32_t chunk_index) const;

  Bytes chunk_size_;
  std::vector<HostId> storage_hosts_;
  std::vector<bool> storage_on_;
  std::map<std::string, HostId> group_host_;
  std::map<std::string, std::uint32_t> by_name_;
  std::vector<FileMeta> files_;
  std::vector<Bytes> usage_;
  Bytes footprint_ = 0;
  std::uint32_t cursor_ = 0;  // index into storage_hosts_
  std::uint64_t next_chunk_id_ = 0;
};

// Read replica choice: a replica on the reader's host if there is one,
// otherwise uniform over the replicas. Draws from rng only when it has to
// choose among several remote replicas.
HostId replica_select(const std::vector<HostId>& replicas, HostId reader, std::mt19937_64& rng);

}  // namespace wfsim::storage

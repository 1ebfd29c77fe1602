#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfsim/units.hpp"

namespace wfsim {

enum class PlacementKind : std::uint8_t { round_robin, local, co_locate };

struct Placement {
  PlacementKind kind = PlacementKind::round_robin;
  std::string group;  // co_locate only

  static Placement parse(const std::string& text);  // "round_robin", "local", "co_locate:<group>"
  std::string to_string() const;
  friend bool operator==(const Placement&, const Placement&) = default;
};

// System-wide configuration knobs and deployment shape.
struct StorageConfig {
  std::uint32_t n_hosts = 20;
  std::uint32_t n_storage_nodes = 19;
  std::uint32_t n_clients = 19;
  bool collocated = true;
  Bytes chunk_size = kMB;
  std::uint32_t stripe_width = 19;
  std::uint32_t replication_level = 1;
  Placement placement{};

  // Driver knobs.
  bool locality_scheduling = true;
  Duration dispatch_stagger = 0;

  // Throws ConfigError.
  void validate() const;
  friend bool operator==(const StorageConfig&, const StorageConfig&) = default;
};

// Per-file override of the system-wide policy.
struct FilePolicy {
  std::optional<Placement> placement;
  std::optional<std::uint32_t> replication_level;
  std::optional<std::uint32_t> stripe_width;
  friend bool operator==(const FilePolicy&, const FilePolicy&) = default;
};

struct EffectivePolicy {
  Placement placement;
  std::uint32_t replication_level;
  std::uint32_t stripe_width;
};

EffectivePolicy effective_policy(const StorageConfig& cfg, const FilePolicy& file);

// Host 0 runs the manager. Storage services occupy hosts 1..S. Clients
// share those hosts when collocated (client i on host 1+i), otherwise they
// follow the storage hosts.
struct Deployment {
  HostId manager_host = 0;
  std::uint32_t n_hosts = 0;
  std::vector<HostId> storage_hosts;
  std::vector<HostId> client_hosts;
  std::vector<bool> storage_on;  // by host
  std::vector<bool> client_on;   // by host

  static Deployment layout(const StorageConfig& cfg);
  bool has_storage(HostId h) const { return h < storage_on.size() && storage_on[h]; }
  bool has_client(HostId h) const { return h < client_on.size() && client_on[h]; }
};

}  // namespace wfsim

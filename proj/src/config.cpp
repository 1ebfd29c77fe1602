#include "wfsim/config.hpp"

#include <algorithm>

#include "wfsim/errors.hpp"
#include "wfsim/profile.hpp"

namespace wfsim {

Placement Placement::parse(const std::string& text) {
  if (text == "round_robin") return {PlacementKind::round_robin, {}};
  if (text == "local") return {PlacementKind::local, {}};
  const std::string prefix = "co_locate:";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
    return {PlacementKind::co_locate, text.substr(prefix.size())};
  }
  throw ConfigError("unknown placement policy '" + text + "'");
}

std::string Placement::to_string() const {
  switch (kind) {
    case PlacementKind::round_robin: return "round_robin";
    case PlacementKind::local: return "local";
    case PlacementKind::co_locate: return "co_locate:" + group;
  }
  return "?";
}

void StorageConfig::validate() const {
  if (n_storage_nodes == 0) throw ConfigError("n_storage_nodes must be >= 1");
  if (n_clients == 0) throw ConfigError("n_clients must be >= 1");
  if (chunk_size <= 0) throw ConfigError("chunk_size must be > 0");
  if (stripe_width == 0 || stripe_width > n_storage_nodes) {
    throw ConfigError("stripe_width " + std::to_string(stripe_width) + " outside [1, n_storage_nodes=" +
                      std::to_string(n_storage_nodes) + "]");
  }
  if (replication_level == 0 || replication_level > n_storage_nodes) {
    throw ConfigError("replication_level " + std::to_string(replication_level) + " outside [1, n_storage_nodes=" +
                      std::to_string(n_storage_nodes) + "]");
  }
  std::uint32_t needed = 1 + (collocated ? std::max(n_storage_nodes, n_clients) : n_storage_nodes + n_clients);
  if (n_hosts != needed) {
    throw ConfigError("n_hosts is " + std::to_string(n_hosts) + " but the deployment needs " + std::to_string(needed) +
                      " (1 manager + " + (collocated ? "max(storage, clients)" : "storage + clients") + ")");
  }
  if (dispatch_stagger < 0) throw ConfigError("dispatch_stagger_ns must be >= 0");
}

EffectivePolicy effective_policy(const StorageConfig& cfg, const FilePolicy& file) {
  return {file.placement.value_or(cfg.placement), file.replication_level.value_or(cfg.replication_level),
          file.stripe_width.value_or(cfg.stripe_width)};
}

Deployment Deployment::layout(const StorageConfig& cfg) {
  Deployment d;
  d.n_hosts = cfg.n_hosts;
  d.storage_on.assign(cfg.n_hosts, false);
  d.client_on.assign(cfg.n_hosts, false);
  for (std::uint32_t i = 0; i < cfg.n_storage_nodes; ++i) {
    HostId h = 1 + i;
    d.storage_hosts.push_back(h);
    d.storage_on.at(h) = true;
  }
  HostId first_client = cfg.collocated ? 1 : 1 + cfg.n_storage_nodes;
  for (std::uint32_t i = 0; i < cfg.n_clients; ++i) {
    HostId h = first_client + i;
    d.client_hosts.push_back(h);
    d.client_on.at(h) = true;
  }
  return d;
}

Ratio PlatformProfile::storage_mu(HostId h) const {
  if (auto it = host_overrides.find(h); it != host_overrides.end() && it->second.mu_storage) {
    return *it->second.mu_storage;
  }
  return mu_storage;
}

Ratio PlatformProfile::remote_mu(HostId h) const {
  if (auto it = host_overrides.find(h); it != host_overrides.end() && it->second.mu_net_remote) {
    return *it->second.mu_net_remote;
  }
  return mu_net_remote;
}

Ratio PlatformProfile::loopback_mu(HostId h) const {
  if (auto it = host_overrides.find(h); it != host_overrides.end() && it->second.mu_net_loopback) {
    return *it->second.mu_net_loopback;
  }
  return mu_net_loopback;
}

void PlatformProfile::validate() const {
  auto nonneg = [](const Ratio& r, const char* name) {
    if (r.is_negative()) throw ConfigError(std::string(name) + " must be >= 0");
  };
  if (mu_net_remote <= Ratio(0)) throw ConfigError("mu_net_remote must be > 0");
  if (mu_net_loopback <= Ratio(0)) throw ConfigError("mu_net_loopback must be > 0");
  nonneg(core_mu, "core_mu");
  nonneg(mu_storage, "mu_storage");
  nonneg(mu_manager, "mu_manager");
  nonneg(mu_client, "mu_client");
  if (core_latency < 0) throw ConfigError("core_latency must be >= 0");
  if (frame_size <= 0) throw ConfigError("frame_size must be > 0");
  if (control_message_size < 0) throw ConfigError("control_message_size must be >= 0");
  for (const auto& [h, o] : host_overrides) {
    if (o.mu_storage) nonneg(*o.mu_storage, "host override mu_storage");
    if (o.mu_net_remote) nonneg(*o.mu_net_remote, "host override mu_net_remote");
    if (o.mu_net_loopback) nonneg(*o.mu_net_loopback, "host override mu_net_loopback");
  }
}

}  // namespace wfsim

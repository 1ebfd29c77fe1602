#pragma once

#include <map>
#include <optional>

#include "wfsim/units.hpp"

namespace wfsim {

struct HostOverride {
  std::optional<Ratio> mu_storage;
  std::optional<Ratio> mu_net_remote;
  std::optional<Ratio> mu_net_loopback;
  friend bool operator==(const HostOverride&, const HostOverride&) = default;
};

// Calibrated service times seeding the model. Per-byte costs are ns/byte,
// per-request costs are ns/request.
struct PlatformProfile {
  Ratio mu_net_remote{8};        // 1 Gbps
  Ratio mu_net_loopback{4, 5};   // 10 Gbps
  Duration core_latency = 0;     // per remote frame
  Ratio core_mu{0};              // aggregate fabric cap; zero disables it
  Ratio mu_storage{3};
  Ratio mu_manager{500'000};
  Ratio mu_client{0};
  Bytes frame_size = 64 * kKiB;
  Bytes control_message_size = kKiB;
  std::map<HostId, HostOverride> host_overrides;

  Ratio storage_mu(HostId h) const;
  Ratio remote_mu(HostId h) const;
  Ratio loopback_mu(HostId h) const;
  bool core_capped() const noexcept { return !core_mu.is_zero(); }

  // Throws ConfigError on negative times or non-positive sizes.
  void validate() const;

  friend bool operator==(const PlatformProfile&, const PlatformProfile&) = default;
};

}  // namespace wfsim

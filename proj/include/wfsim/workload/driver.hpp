#pragma once

#include <cstdint>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/profile.hpp"
#include "wfsim/report.hpp"
#include "wfsim/sim/engine.hpp"
#include "wfsim/storage/manager.hpp"
#include "wfsim/workload/workload.hpp"

namespace wfsim::workload {

// Host for a task whose producers have finished: the single storage host
// holding every chunk of every input (when locality scheduling is on and
// that host runs a client), else the pinned host, else the client host with
// the fewest running tasks (lowest id on ties).
HostId assign_task_node(const Workload& w, std::uint32_t task, const storage::Manager& manager,
                        const Deployment& deployment, const std::vector<std::uint32_t>& running, bool locality);

struct DriveOptions {
  std::uint64_t seed = 1;
  std::uint64_t event_budget = sim::kDefaultEventBudget;
};

// Runs the workload to completion on a fresh simulated system.
RunReport drive(const Workload& w, const StorageConfig& cfg, const PlatformProfile& profile,
                const DriveOptions& options = {});

}  // namespace wfsim::workload

#include "wfsim/workload/driver.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "wfsim/errors.hpp"
#include "wfsim/storage/cluster.hpp"

namespace wfsim::workload {

HostId assign_task_node(const Workload& w, std::uint32_t task, const storage::Manager& manager,
                        const Deployment& deployment, const std::vector<std::uint32_t>& running, bool locality) {
  const Task& t = w.tasks.at(task);
  if (locality) {
    std::optional<std::vector<HostId>> common;
    for (const auto& name : w.graph.inputs.at(task)) {
      if (!manager.exists(name)) continue;
      for (const auto& chunk : manager.file(manager.file_index(name)).chunks) {
        std::vector<HostId> reps = chunk.replicas;
        std::sort(reps.begin(), reps.end());
        if (!common) {
          common = std::move(reps);
        } else {
          std::vector<HostId> both;
          std::set_intersection(common->begin(), common->end(), reps.begin(), reps.end(), std::back_inserter(both));
          common = std::move(both);
        }
        if (common->empty()) break;
      }
      if (common && common->empty()) break;
    }
    if (common && !common->empty()) {
      if (t.pin && std::binary_search(common->begin(), common->end(), *t.pin) && deployment.has_client(*t.pin)) {
        return *t.pin;
      }
      for (HostId h : *common) {
        if (deployment.has_client(h)) return h;
      }
    }
  }
  if (t.pin) return *t.pin;
  HostId best = deployment.client_hosts.front();
  for (HostId h : deployment.client_hosts) {
    if (running.at(h) < running.at(best) || (running.at(h) == running.at(best) && h < best)) best = h;
  }
  return best;
}

namespace {

constexpr std::int64_t kWakeStart = 0;
constexpr std::int64_t kWakeIssue = 1;

class Driver : public storage::OpListener {
 public:
  Driver(const Workload& w, const StorageConfig& cfg, const PlatformProfile& profile, const DriveOptions& opt)
      : w_(w),
        cfg_(cfg),
        engine_(opt.event_budget),
        cluster_(cfg, profile, engine_, opt.seed),
        running_(cfg.n_hosts, 0) {
    cluster_.set_listener(this);
    const auto n = w.tasks.size();
    tasks_.resize(n);
    records_.resize(w.op_count());
    filled_.assign(records_.size(), false);
    op_task_.resize(records_.size());

    for (const auto& f : w.files) {
      if (!f.is_pattern()) file_id(f.name);
    }
    for (std::uint32_t ti = 0; ti < n; ++ti) {
      for (const auto& op : w.tasks[ti].ops) {
        file_id(op.file);
        op_task_.at(op.id) = ti;
      }
      if (auto pin = w.tasks[ti].pin; pin && !cluster_.deployment().has_client(*pin)) {
        throw WorkloadError("task '" + w.tasks[ti].id + "' is pinned to host " + std::to_string(*pin) +
                            " which runs no client service");
      }
      for (const auto& in : w.graph.inputs[ti]) {
        if (auto it = w.graph.producer_of.find(in); it != w.graph.producer_of.end()) {
          ++tasks_[ti].unready;
          waiting_on_[in].push_back(ti);
        }
      }
    }
  }

  RunReport run() {
    const auto wall0 = std::chrono::steady_clock::now();
    for (const auto& g : w_.groups) {
      HostId h = g.host ? *g.host : *w_.tasks.at(*w_.task_index(*g.task)).pin;
      cluster_.set_group_host(g.name, h);
    }
    const HostId default_origin = cluster_.deployment().client_hosts.front();
    for (const auto& name : w_.graph.preloaded) {
      const FileDecl* d = w_.find_decl(name);
      cluster_.preload(name, *d->size, w_.policy_for(name), d->origin.value_or(default_origin));
    }
    for (std::uint32_t ti = 0; ti < tasks_.size(); ++ti) {
      if (tasks_[ti].unready == 0) make_eligible(ti);
    }
    try {
      engine_.run_until_idle([this](const sim::ModelEvent& e) {
        if (e.kind == sim::EventKind::driver_wake) {
          on_wake(e);
        } else {
          cluster_.handle(e);
        }
      });
    } catch (const WorkloadError& e) {
      if (auto id = e.op_id()) {
        const Task& t = w_.tasks.at(op_task_.at(*id));
        const TraceOp* op = nullptr;
        for (const auto& o : t.ops) {
          if (o.id == *id) op = &o;
        }
        throw WorkloadError("task '" + t.id + "'" + (op && op->line ? ", line " + std::to_string(op->line) : "") +
                            ": " + e.what(),
                            *id);
      }
      throw;
    }

    for (std::uint32_t ti = 0; ti < tasks_.size(); ++ti) {
      if (!tasks_[ti].done) {
        throw SimulationError("task '" + w_.tasks[ti].id + "' never completed (" +
                              std::to_string(tasks_[ti].unready) + " inputs never became ready)");
      }
    }
    cluster_.check_drained();
    for (std::size_t i = 0; i < filled_.size(); ++i) {
      if (!filled_[i]) throw SimulationError("trace op " + std::to_string(i) + " has no record");
    }

    RunReport report = aggregate(std::move(records_), w_.graph.stage);
    report.events = engine_.events_processed();
    report.storage_final = cluster_.manager().footprint();
    report.storage_peak = report.storage_final;  // nothing is ever deleted
    for (const auto& t : w_.tasks) report.task_names.push_back(t.id);
    report.file_names = file_names_;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return report;
  }

  void op_completed(std::uint64_t handle, const OpRecord& record) override {
    const std::uint32_t ti = handle_task_.at(handle);
    store(record);
    tasks_[ti].gap_paid = false;
    ++tasks_[ti].next;
    advance(ti);
  }

 private:
  struct TaskState {
    std::uint32_t unready = 0;
    std::uint32_t next = 0;
    HostId host = 0;
    bool gap_paid = false;
    bool started = false;
    bool done = false;
  };

  std::uint32_t file_id(const std::string& name) {
    auto [it, fresh] = file_ids_.emplace(name, static_cast<std::uint32_t>(file_names_.size()));
    if (fresh) file_names_.push_back(name);
    return it->second;
  }

  void make_eligible(std::uint32_t ti) {
    const VirtualTime now = engine_.now();
    if (now != batch_time_) {
      batch_time_ = now;
      batch_index_ = 0;
    }
    engine_.schedule(now + cfg_.dispatch_stagger * batch_index_++, {sim::EventKind::driver_wake, 0, ti, kWakeStart});
  }

  void on_wake(const sim::ModelEvent& e) {
    const auto ti = static_cast<std::uint32_t>(e.id);
    TaskState& t = tasks_.at(ti);
    if (e.aux == kWakeStart) {
      t.host = assign_task_node(w_, ti, cluster_.manager(), cluster_.deployment(), running_, cfg_.locality_scheduling);
      t.started = true;
      ++running_[t.host];
    } else {
      t.gap_paid = true;
    }
    advance(ti);
  }

  OpRecord base_record(std::uint32_t ti, const TraceOp& op) const {
    OpRecord r;
    r.op_id = op.id;
    r.task = ti;
    r.trace_client = op.client;
    r.host = tasks_[ti].host;
    r.kind = op.op;
    r.file = file_ids_.at(op.file);
    r.offset = op.offset;
    r.size = op.size;
    return r;
  }

  void store(const OpRecord& r) {
    if (filled_.at(r.op_id)) throw SimulationError("trace op " + std::to_string(r.op_id) + " recorded twice");
    filled_[r.op_id] = true;
    records_[r.op_id] = r;
  }

  // Issues ops of task ti until one has to wait for the storage system or
  // for a compute gap.
  void advance(std::uint32_t ti) {
    TaskState& t = tasks_[ti];
    const auto& ops = w_.tasks[ti].ops;
    while (t.next < ops.size()) {
      const TraceOp& op = ops[t.next];
      const Duration prev = t.next == 0 ? 0 : ops[t.next - 1].timestamp;
      const Duration gap = op.timestamp - prev;
      if (gap > 0 && !t.gap_paid) {
        engine_.schedule(engine_.now() + gap, {sim::EventKind::driver_wake, 0, ti, kWakeIssue});
        return;
      }
      t.gap_paid = false;
      if (op.op == OpKind::read || op.op == OpKind::write) {
        storage::IoRequest req{op.op, t.host, op.file, op.offset, op.size, w_.policy_for(op.file)};
        OpRecord rec = base_record(ti, op);
        std::uint64_t h = cluster_.submit(req, rec);
        if (handle_task_.size() <= h) handle_task_.resize(h + 1);
        handle_task_[h] = ti;
        return;
      }
      OpRecord rec = base_record(ti, op);
      rec.start = rec.end = engine_.now();
      store(rec);
      ++t.next;
      if (op.op == OpKind::close) file_closed(ti, op.file);
    }
    t.done = true;
    --running_[t.host];
  }

  void file_closed(std::uint32_t ti, const std::string& file) {
    auto p = w_.graph.producer_of.find(file);
    if (p == w_.graph.producer_of.end() || p->second != ti) return;
    auto it = waiting_on_.find(file);
    if (it == waiting_on_.end()) return;
    for (auto c : it->second) {
      if (--tasks_[c].unready == 0) make_eligible(c);
    }
    waiting_on_.erase(it);
  }

  const Workload& w_;
  const StorageConfig& cfg_;
  sim::ModelEngine engine_;
  storage::Cluster cluster_;
  std::vector<std::uint32_t> running_;
  std::vector<TaskState> tasks_;
  std::vector<OpRecord> records_;
  std::vector<bool> filled_;
  std::vector<std::uint32_t> op_task_;
  std::vector<std::uint32_t> handle_task_;
  std::map<std::string, std::vector<std::uint32_t>> waiting_on_;
  std::map<std::string, std::uint32_t> file_ids_;
  std::vector<std::string> file_names_;
  VirtualTime batch_time_ = -1;
  std::uint64_t batch_index_ = 0;
};

}  // namespace

RunReport drive(const Workload& w, const StorageConfig& cfg, const PlatformProfile& profile,
                const DriveOptions& options) {
  Driver d(w, cfg, profile, options);
  return d.run();
}

}  // namespace wfsim::workload

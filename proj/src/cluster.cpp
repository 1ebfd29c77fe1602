#include "wfsim/storage/cluster.hpp"

#include <algorithm>

#include "wfsim/errors.hpp"

namespace wfsim::storage {

using net::MessageKind;
using sim::ServiceKind;

Cluster::Cluster(const StorageConfig& cfg, const PlatformProfile& profile, sim::ModelEngine& engine,
                 std::uint64_t seed)
    : cfg_(cfg),
      profile_(profile),
      engine_(engine),
      deployment_((cfg.validate(), profile.validate(), Deployment::layout(cfg))),
      manager_(cfg_, deployment_),
      network_(profile_, cfg.n_hosts, engine, *this),
      rng_(seed),
      manager_q_(sim::EntityId{deployment_.manager_host, ServiceKind::manager}) {
  storage_q_.reserve(cfg.n_hosts);
  client_q_.reserve(cfg.n_hosts);
  for (HostId h = 0; h < cfg.n_hosts; ++h) {
    storage_q_.emplace_back(sim::EntityId{h, ServiceKind::storage});
    client_q_.emplace_back(sim::EntityId{h, ServiceKind::client});
  }
}

void Cluster::preload(const std::string& file, Bytes size, const FilePolicy& policy, HostId origin) {
  if (manager_.exists(file)) throw WorkloadError("input file '" + file + "' preloaded twice");
  EffectivePolicy eff = effective_policy(cfg_, policy);
  ChunkRange range = manager_.allocate(file, 0, size, eff, origin);
  std::uint32_t idx = manager_.file_index(file);
  for (std::uint32_t c = range.first; c < range.first + range.count; ++c) {
    Bytes end = std::min(size - static_cast<Bytes>(c) * cfg_.chunk_size, cfg_.chunk_size);
    for (std::uint32_t k = 0; k < eff.replication_level; ++k) manager_.record_store(idx, c, k, end);
  }
  manager_.commit(file, size);
  manager_.file_mut(idx).preloaded = true;
}

sim::ServiceQueue& Cluster::queue_for(HostId host, ServiceKind kind) {
  switch (kind) {
    case ServiceKind::manager: return manager_q_;
    case ServiceKind::storage: return storage_q_.at(host);
    case ServiceKind::client: return client_q_.at(host);
    default: throw SimulationError("no system service of that kind");
  }
}

Bytes Cluster::bytes_in_chunk(const OpState& s, std::uint32_t chunk) const {
  const Bytes lo = std::max(s.req.offset, static_cast<Bytes>(chunk) * cfg_.chunk_size);
  const Bytes hi = std::min(s.req.offset + s.req.size, static_cast<Bytes>(chunk + 1) * cfg_.chunk_size);
  return hi > lo ? hi - lo : 0;
}

std::uint64_t Cluster::submit(const IoRequest& request, const OpRecord& record) {
  if (request.kind != OpKind::read && request.kind != OpKind::write) {
    throw SimulationError("only reads and writes reach the storage system");
  }
  if (!deployment_.has_client(request.host)) {
    throw SimulationError("host " + std::to_string(request.host) + " runs no client service");
  }
  if (request.size < 0 || request.offset < 0) throw WorkloadError("negative offset or size");
  if (request.kind == OpKind::write && manager_.exists(request.file) &&
      manager_.file(manager_.file_index(request.file)).preloaded) {
    throw WorkloadError("write to input file '" + request.file + "'", record.op_id);
  }

  std::uint64_t h;
  if (!free_ops_.empty()) {
    h = free_ops_.back();
    free_ops_.pop_back();
  } else {
    h = ops_.size();
    ops_.emplace_back();
  }
  OpState& s = ops_[h];
  s = OpState{};
  s.req = request;
  s.rec = record;
  s.rec.host = request.host;
  s.rec.kind = request.kind;
  s.rec.offset = request.offset;
  s.rec.size = request.size;
  s.rec.start = engine_.now();
  s.live = true;
  ++live_ops_;

  const Purpose first = request.kind == OpKind::write ? Purpose::alloc_req : Purpose::map_req;
  send(h, request.host, deployment_.manager_host, ServiceKind::manager, first, MessageKind::control, 0);
  return h;
}

void Cluster::send(std::uint64_t op, HostId src, HostId dst, ServiceKind target, Purpose purpose, MessageKind kind,
                   Bytes payload, std::uint32_t chunk, std::uint16_t hop) {
  OpRecord& rec = ops_[op].rec;
  const Bytes wire = net::wire_bytes(payload, profile_.control_message_size);
  if (src == dst) {
    rec.loopback_bytes += wire;
    if (kind == MessageKind::data) rec.data_loopback_bytes += payload;
  } else {
    rec.remote_bytes += wire;
    if (kind == MessageKind::data) rec.data_remote_bytes += payload;
  }
  if (kind == MessageKind::control) ++rec.control_messages;
  if (target == ServiceKind::manager) ++rec.manager_requests;
  if (purpose == Purpose::chunk_write) {
    if (hop == 0) {
      ++rec.chunk_requests;
    } else {
      ++rec.replica_forwards;
    }
  }
  if (purpose == Purpose::chunk_read_req) ++rec.chunk_requests;

  net::NetRequest r;
  r.src = src;
  r.dst = dst;
  r.kind = kind;
  r.payload_bytes = payload;
  r.target = target;
  r.purpose = static_cast<std::uint8_t>(purpose);
  r.hop = hop;
  r.chunk = chunk;
  r.op = op;
  network_.send(std::move(r));
}

Duration Cluster::service_time(const net::NetRequest& r) const {
  switch (r.target) {
    case ServiceKind::manager: return profile_.mu_manager.ceil();
    case ServiceKind::client: return profile_.mu_client.ceil();
    case ServiceKind::storage: {
      const OpState& s = ops_[r.op];
      return profile_.storage_mu(r.dst).ceil_mul(bytes_in_chunk(s, r.chunk));
    }
    default: throw SimulationError("no service time for that service");
  }
}

void Cluster::deliver(const net::NetRequest& request) {
  const auto purpose = static_cast<Purpose>(request.purpose);
  if (!ops_.at(request.op).live) throw SimulationError("message for a finished operation");
  // Storage relays acks without queueing behind chunk work.
  if (purpose == Purpose::chunk_ack && request.target == ServiceKind::storage) {
    send_ack_upstream(request.op, request.dst, request.chunk, request.hop);
    return;
  }
  std::uint64_t j;
  if (!free_jobs_.empty()) {
    j = free_jobs_.back();
    free_jobs_.pop_back();
  } else {
    j = jobs_.size();
    jobs_.emplace_back();
  }
  jobs_[j] = Job{request, true};
  auto slot = queue_for(request.dst, request.target).admit(engine_.now(), service_time(request));
  engine_.schedule(slot.end, {sim::EventKind::service_done, request.dst, j, 0});
}

void Cluster::handle(const sim::ModelEvent& event) {
  if (event.kind == sim::EventKind::service_done) {
    on_service_done(event);
  } else {
    network_.handle(event);
  }
}

void Cluster::on_service_done(const sim::ModelEvent& e) {
  Job& job = jobs_.at(e.id);
  if (!job.live) throw SimulationError("service completion for a dead job");
  net::NetRequest r = job.request;
  job.live = false;
  free_jobs_.push_back(e.id);
  queue_for(r.dst, r.target).complete();
  after_service(r);
}

void Cluster::send_ack_upstream(std::uint64_t op, HostId from, std::uint32_t chunk, std::uint16_t hop) {
  const OpState& s = ops_[op];
  if (hop == 0) {
    send(op, from, s.req.host, ServiceKind::client, Purpose::chunk_ack, MessageKind::control, 0, chunk, 0);
    return;
  }
  const auto& chain = manager_.file(s.file).chunks.at(chunk).replicas;
  send(op, from, chain.at(hop - 1u), ServiceKind::storage, Purpose::chunk_ack, MessageKind::control, 0, chunk,
       static_cast<std::uint16_t>(hop - 1));
}

void Cluster::after_service(const net::NetRequest& r) {
  const std::uint64_t op = r.op;
  OpState& s = ops_[op];
  const HostId client = s.req.host;
  const HostId mgr = deployment_.manager_host;

  switch (static_cast<Purpose>(r.purpose)) {
    case Purpose::alloc_req: {
      s.range = manager_.allocate(s.req.file, s.req.offset, s.req.size, effective_policy(cfg_, s.req.policy), client);
      s.file = manager_.file_index(s.req.file);
      send(op, mgr, client, ServiceKind::client, Purpose::alloc_reply, MessageKind::control, 0);
      break;
    }
    case Purpose::alloc_reply: {
      if (s.range.count == 0) {
        send(op, client, mgr, ServiceKind::manager, Purpose::commit_req, MessageKind::control, 0);
        break;
      }
      const auto& chunks = manager_.file(s.file).chunks;
      for (std::uint32_t c = s.range.first; c < s.range.first + s.range.count; ++c) {
        send(op, client, chunks[c].replicas.front(), ServiceKind::storage, Purpose::chunk_write, MessageKind::data,
             bytes_in_chunk(s, c), c, 0);
      }
      break;
    }
    case Purpose::chunk_write: {
      const Bytes chunk_start = static_cast<Bytes>(r.chunk) * cfg_.chunk_size;
      const Bytes end_in_chunk = std::min(s.req.offset + s.req.size, chunk_start + cfg_.chunk_size) - chunk_start;
      s.rec.storage_delta += manager_.record_store(s.file, r.chunk, r.hop, end_in_chunk);
      const auto& chain = manager_.file(s.file).chunks.at(r.chunk).replicas;
      if (r.hop + 1u < chain.size()) {
        send(op, r.dst, chain[r.hop + 1u], ServiceKind::storage, Purpose::chunk_write, MessageKind::data,
             r.payload_bytes, r.chunk, static_cast<std::uint16_t>(r.hop + 1));
      } else {
        send_ack_upstream(op, r.dst, r.chunk, r.hop);
      }
      break;
    }
    case Purpose::chunk_ack: {
      if (++s.acks == s.range.count) {
        send(op, client, mgr, ServiceKind::manager, Purpose::commit_req, MessageKind::control, 0);
      }
      break;
    }
    case Purpose::commit_req: {
      manager_.commit(s.req.file, s.req.offset + s.req.size);
      send(op, mgr, client, ServiceKind::client, Purpose::commit_reply, MessageKind::control, 0);
      break;
    }
    case Purpose::commit_reply: finish(op); break;
    case Purpose::map_req: {
      if (!manager_.exists(s.req.file)) {
        throw WorkloadError("read of nonexistent file '" + s.req.file + "'", s.rec.op_id);
      }
      s.file = manager_.file_index(s.req.file);
      const FileMeta& f = manager_.file(s.file);
      if (!f.committed || s.req.offset + s.req.size > f.size) {
        throw WorkloadError("read of [" + std::to_string(s.req.offset) + ", " +
                            std::to_string(s.req.offset + s.req.size) + ") beyond the " + std::to_string(f.size) +
                            " committed bytes of '" + s.req.file + "'",
                            s.rec.op_id);
      }
      s.range = chunks_covering(s.req.offset, s.req.size, cfg_.chunk_size);
      send(op, mgr, client, ServiceKind::client, Purpose::map_reply, MessageKind::control, 0);
      break;
    }
    case Purpose::map_reply: fetch_next(op); break;
    case Purpose::chunk_read_req:
      send(op, r.dst, client, ServiceKind::client, Purpose::chunk_data, MessageKind::data, bytes_in_chunk(s, r.chunk),
           r.chunk, 0);
      break;
    case Purpose::chunk_data:
      ++s.next_fetch;
      fetch_next(op);
      break;
  }
}

void Cluster::fetch_next(std::uint64_t op) {
  OpState& s = ops_[op];
  if (s.next_fetch >= s.range.count) {
    finish(op);
    return;
  }
  const std::uint32_t c = s.range.first + s.next_fetch;
  const HostId from = replica_select(manager_.file(s.file).chunks.at(c).replicas, s.req.host, rng_);
  send(op, s.req.host, from, ServiceKind::storage, Purpose::chunk_read_req, MessageKind::control, 0, c, 0);
}

void Cluster::finish(std::uint64_t op) {
  OpState& s = ops_[op];
  s.rec.end = engine_.now();
  s.live = false;
  --live_ops_;
  OpRecord rec = s.rec;
  free_ops_.push_back(op);
  if (listener_) listener_->op_completed(op, rec);
}

void Cluster::check_drained() const {
  if (live_ops_ != 0) throw SimulationError(std::to_string(live_ops_) + " operations still in flight at drain");
  network_.check_drained();
  auto drained = [](const sim::ServiceQueue& q) {
    if (q.in_flight() != 0) {
      throw SimulationError(std::string(sim::to_string(q.owner().kind)) + " service of host " +
                            std::to_string(q.owner().host) + " not drained");
    }
  };
  drained(manager_q_);
  for (const auto& q : storage_q_) drained(q);
  for (const auto& q : client_q_) drained(q);
}

}  // namespace wfsim::storage

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/net/network.hpp"
#include "wfsim/profile.hpp"
#include "wfsim/report.hpp"
#include "wfsim/sim/model_event.hpp"
#include "wfsim/sim/service_queue.hpp"
#include "wfsim/storage/manager.hpp"

namespace wfsim::storage {

// A read or write handed to a client service by the application driver.
struct IoRequest {
  OpKind kind = OpKind::read;
  HostId host = 0;  // client host issuing the operation
  std::string file;
  Bytes offset = 0;
  Bytes size = 0;
  FilePolicy policy{};  // writes only
};

class OpListener {
 public:
  virtual ~OpListener() = default;
  virtual void op_completed(std::uint64_t handle, const OpRecord& record) = 0;
};

// The modeled storage system: manager, storage and client services on top of
// the network model, executing the chunk-level write and read protocols.
//
// Write: client -> manager allocate; reply; one data request per chunk to
// the chunk's primary, pipelined through the client's out-queue; each
// storage stores and forwards down the replica chain, acks travel back up
// the chain; after all acks, client -> manager commit; reply.
// Read: client -> manager chunk-map request; reply; then chunks are fetched
// one after another from a selected replica.
class Cluster : public net::DeliverySink {
 public:
  Cluster(const StorageConfig& cfg, const PlatformProfile& profile, sim::ModelEngine& engine, std::uint64_t seed);

  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  void set_listener(OpListener* listener) { listener_ = listener; }
  void set_group_host(const std::string& group, HostId host) { manager_.set_group_host(group, host); }

  // Places and stores a workload input before the run; takes no simulated time.
  void preload(const std::string& file, Bytes size, const FilePolicy& policy, HostId origin);

  // Starts an operation at engine.now(). `record` carries the trace identity
  // (op id, task, file index...); timing and counters are filled in. Returns
  // the handle passed back to the listener.
  std::uint64_t submit(const IoRequest& request, const OpRecord& record);

  // Dispatch for network and service_done events.
  void handle(const sim::ModelEvent& event);

  // Throws SimulationError if any operation, message or service is pending.
  void check_drained() const;

  const Manager& manager() const noexcept { return manager_; }
  const net::Network& network() const noexcept { return network_; }
  const Deployment& deployment() const noexcept { return deployment_; }
  const StorageConfig& config() const noexcept { return cfg_; }
  std::size_t ops_in_flight() const noexcept { return live_ops_; }

  void deliver(const net::NetRequest& request) override;

 private:
  enum class Purpose : std::uint8_t {
    alloc_req, alloc_reply, chunk_write, chunk_ack, commit_req, commit_reply,
    map_req, map_reply, chunk_read_req, chunk_data,
  };

  struct OpState {
    IoRequest req;
    OpRecord rec;
    std::uint32_t file = 0;
    ChunkRange range{};
    std::uint32_t acks = 0;
    std::uint32_t next_fetch = 0;
    bool live = false;
  };

  struct Job {
    net::NetRequest request;
    bool live = false;
  };

  void send(std::uint64_t op, HostId src, HostId dst, sim::ServiceKind target, Purpose purpose, net::MessageKind kind,
            Bytes payload, std::uint32_t chunk = 0, std::uint16_t hop = 0);
  void on_service_done(const sim::ModelEvent& e);
  void after_service(const net::NetRequest& r);
  void send_ack_upstream(std::uint64_t op, HostId from, std::uint32_t chunk, std::uint16_t hop);
  void fetch_next(std::uint64_t op);
  void finish(std::uint64_t op);
  Duration service_time(const net::NetRequest& r) const;
  sim::ServiceQueue& queue_for(HostId host, sim::ServiceKind kind);
  Bytes bytes_in_chunk(const OpState& s, std::uint32_t chunk) const;

  StorageConfig cfg_;
  const PlatformProfile& profile_;
  sim::ModelEngine& engine_;
  Deployment deployment_;
  Manager manager_;
  net::Network network_;
  std::mt19937_64 rng_;
  OpListener* listener_ = nullptr;

  sim::ServiceQueue manager_q_;
  std::vector<sim::ServiceQueue> storage_q_;
  std::vector<sim::ServiceQueue> client_q_;

  std::vector<OpState> ops_;
  std::vector<std::uint64_t> free_ops_;
  std::size_t live_ops_ = 0;
  std::vector<Job> jobs_;
  std::vector<std::uint64_t> free_jobs_;
};

}  // namespace wfsim::storage

#pragma once

#include <cstdint>
#include <vector>

#include "wfsim/profile.hpp"
#include "wfsim/sim/model_event.hpp"
#include "wfsim/sim/service_queue.hpp"
#include "wfsim/units.hpp"

namespace wfsim::net {

enum class MessageKind : std::uint8_t { control, data };
enum class LinkKind : std::uint8_t { remote, loopback };

inline LinkKind link_between(HostId src, HostId dst) { return src == dst ? LinkKind::loopback : LinkKind::remote; }

// A request travelling between two services. The routing fields after
// payload_bytes are opaque to the network and handed back on delivery.
struct NetRequest {
  std::uint64_t id = 0;
  HostId src = 0;
  HostId dst = 0;
  MessageKind kind = MessageKind::control;
  Bytes payload_bytes = 0;

  sim::ServiceKind target = sim::ServiceKind::client;
  std::uint8_t purpose = 0;
  std::uint16_t hop = 0;
  std::uint32_t chunk = 0;
  std::uint64_t op = 0;
};

struct Frame {
  std::uint64_t request_id = 0;
  std::uint32_t index = 0;
  Bytes bytes = 0;
  friend bool operator==(const Frame&, const Frame&) = default;
};

// Bytes put on the wire: control messages share one size and nothing is
// smaller than a control message.
inline Bytes wire_bytes(Bytes payload, Bytes control_message_size) {
  return payload > control_message_size ? payload : control_message_size;
}

std::uint32_t frame_count(Bytes wire, Bytes frame_size);
Bytes frame_bytes(Bytes wire, Bytes frame_size, std::uint32_t index);

std::vector<Frame> decompose(const NetRequest& request, Bytes frame_size, Bytes control_message_size);

// Unloaded time for one frame: serialization at the link's per-byte cost
// plus the core latency for remote frames.
Duration frame_service_time(const Frame& frame, LinkKind link, const PlatformProfile& profile);

// Unloaded end-to-end time of a whole request from src to dst: frames are
// pipelined, so latency is paid once.
Duration unloaded_transit(Bytes payload, HostId src, HostId dst, const PlatformProfile& profile);

class DeliverySink {
 public:
  virtual ~DeliverySink() = default;
  virtual void deliver(const NetRequest& request) = 0;
};

struct NetCounters {
  Bytes remote_bytes = 0;
  Bytes loopback_bytes = 0;
  std::uint64_t requests = 0;
  std::uint64_t delivered = 0;
  std::uint64_t control_messages = 0;
  std::uint64_t data_messages = 0;
  std::uint64_t frames = 0;
};

// Per-host network service: an out-queue and an in-queue for remote traffic
// (full duplex), a loopback queue for collocated services, and an optional
// shared core queue capping aggregate fabric bandwidth.
//
// Remote frames are serialized by the sender's out-queue. A frame's head
// reaches the receiver core_latency after its transmission starts and the
// receiver's in-queue cannot finish it before its tail arrives, so an
// unloaded request costs its serialization time plus one latency. Frames
// from different senders interleave at a busy receiver.
class Network {
 public:
  Network(const PlatformProfile& profile, std::uint32_t n_hosts, sim::ModelEngine& engine, DeliverySink& sink);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  // Sends at engine.now(). The returned id is valid until delivery.
  std::uint64_t send(NetRequest request);

  // Dispatch for frame_head, core_arrival and deliver events.
  void handle(const sim::ModelEvent& event);

  // Throws SimulationError if any request is undelivered or a queue is busy.
  void check_drained() const;

  const NetCounters& counters() const noexcept { return counters_; }
  const sim::ServiceQueue& out_queue(HostId h) const { return out_.at(h); }
  const sim::ServiceQueue& in_queue(HostId h) const { return in_.at(h); }
  std::size_t in_flight() const noexcept { return live_; }

 private:
  struct InFlight {
    NetRequest request;
    Bytes wire = 0;
    std::uint32_t frames = 0;
    std::uint32_t received = 0;
    std::uint32_t through_core = 0;
    bool live = false;
  };

  std::uint64_t allocate(NetRequest&& r);
  void on_core_arrival(const sim::ModelEvent& e);
  void on_frame_head(const sim::ModelEvent& e);
  void on_deliver(const sim::ModelEvent& e);

  const PlatformProfile& profile_;
  sim::ModelEngine& engine_;
  DeliverySink& sink_;
  std::vector<sim::ServiceQueue> out_;
  std::vector<sim::ServiceQueue> in_;
  std::vector<sim::ServiceQueue> loop_;
  sim::ServiceQueue core_;

  std::vector<InFlight> slots_;
  std::vector<std::uint64_t> free_;
  std::size_t live_ = 0;
  NetCounters counters_;
};

}  // namespace wfsim::net

#include "wfsim/net/network.hpp"

#include <string>

#include "wfsim/errors.hpp"

namespace wfsim::net {

std::uint32_t frame_count(Bytes wire, Bytes frame_size) {
  if (wire <= 0) return 1;
  return static_cast<std::uint32_t>(ceil_div(wire, frame_size));
}

Bytes frame_bytes(Bytes wire, Bytes frame_size, std::uint32_t index) {
  Bytes before = static_cast<Bytes>(index) * frame_size;
  Bytes rest = wire - before;
  return rest < frame_size ? (rest < 0 ? 0 : rest) : frame_size;
}

std::vector<Frame> decompose(const NetRequest& request, Bytes frame_size, Bytes control_message_size) {
  Bytes wire = wire_bytes(request.payload_bytes, control_message_size);
  std::uint32_t n = frame_count(wire, frame_size);
  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) frames.push_back({request.id, i, frame_bytes(wire, frame_size, i)});
  return frames;
}

Duration frame_service_time(const Frame& frame, LinkKind link, const PlatformProfile& profile) {
  if (link == LinkKind::loopback) return profile.mu_net_loopback.ceil_mul(frame.bytes);
  return profile.mu_net_remote.ceil_mul(frame.bytes) + profile.core_latency;
}

Duration unloaded_transit(Bytes payload, HostId src, HostId dst, const PlatformProfile& profile) {
  Bytes wire = wire_bytes(payload, profile.control_message_size);
  std::uint32_t n = frame_count(wire, profile.frame_size);
  if (src == dst) {
    Duration total = 0;
    Ratio mu = profile.loopback_mu(src);
    for (std::uint32_t i = 0; i < n; ++i) total += mu.ceil_mul(frame_bytes(wire, profile.frame_size, i));
    return total;
  }
  // The slower end of the link paces the pipeline; its last frame finishes
  // after every earlier frame cleared both ends.
  Ratio tx = profile.remote_mu(src);
  Ratio rx = profile.remote_mu(dst);
  VirtualTime out_free = 0;
  VirtualTime in_free = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    Bytes b = frame_bytes(wire, profile.frame_size, i);
    VirtualTime start = out_free;
    out_free = start + tx.ceil_mul(b);
    VirtualTime head = start + profile.core_latency;
    VirtualTime in_start = head > in_free ? head : in_free;
    VirtualTime in_end = in_start + rx.ceil_mul(b);
    VirtualTime tail = out_free + profile.core_latency;
    in_free = in_end > tail ? in_end : tail;
  }
  return in_free;
}

Network::Network(const PlatformProfile& profile, std::uint32_t n_hosts, sim::ModelEngine& engine, DeliverySink& sink)
    : profile_(profile), engine_(engine), sink_(sink), core_(sim::EntityId{0, sim::ServiceKind::core}) {
  out_.reserve(n_hosts);
  in_.reserve(n_hosts);
  loop_.reserve(n_hosts);
  for (HostId h = 0; h < n_hosts; ++h) {
    out_.emplace_back(sim::EntityId{h, sim::ServiceKind::net_out});
    in_.emplace_back(sim::EntityId{h, sim::ServiceKind::net_in});
    loop_.emplace_back(sim::EntityId{h, sim::ServiceKind::loopback});
  }
}

std::uint64_t Network::allocate(NetRequest&& r) {
  std::uint64_t id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = slots_.size();
    slots_.emplace_back();
  }
  r.id = id;
  InFlight& slot = slots_[id];
  slot.request = std::move(r);
  slot.wire = wire_bytes(slot.request.payload_bytes, profile_.control_message_size);
  slot.frames = frame_count(slot.wire, profile_.frame_size);
  slot.received = 0;
  slot.through_core = 0;
  slot.live = true;
  ++live_;
  return id;
}

std::uint64_t Network::send(NetRequest request) {
  if (request.src >= out_.size() || request.dst >= out_.size()) {
    throw SimulationError("send between unknown hosts " + std::to_string(request.src) + " -> " +
                          std::to_string(request.dst));
  }
  if (request.payload_bytes < 0) throw SimulationError("negative payload");
  const HostId src = request.src;
  const HostId dst = request.dst;
  const std::uint64_t id = allocate(std::move(request));
  InFlight& slot = slots_[id];
  const VirtualTime now = engine_.now();

  ++counters_.requests;
  counters_.frames += slot.frames;
  if (slot.request.kind == MessageKind::control) {
    ++counters_.control_messages;
  } else {
    ++counters_.data_messages;
  }

  if (src == dst) {
    counters_.loopback_bytes += slot.wire;
    Ratio mu = profile_.loopback_mu(src);
    Duration service = 0;
    for (std::uint32_t i = 0; i < slot.frames; ++i) service += mu.ceil_mul(frame_bytes(slot.wire, profile_.frame_size, i));
    auto s = loop_[src].admit(now, service);
    slot.received = slot.frames;
    engine_.schedule(s.end, {sim::EventKind::deliver, dst, id, 0});
    return id;
  }

  counters_.remote_bytes += slot.wire;
  Ratio tx = profile_.remote_mu(src);
  for (std::uint32_t i = 0; i < slot.frames; ++i) {
    auto s = out_[src].admit(now, tx.ceil_mul(frame_bytes(slot.wire, profile_.frame_size, i)));
    const VirtualTime head = s.start + profile_.core_latency;
    const VirtualTime tail = s.end + profile_.core_latency;
    engine_.schedule(head, {profile_.core_capped() ? sim::EventKind::core_arrival : sim::EventKind::frame_head, dst,
                            id, tail});
  }
  return id;
}

void Network::handle(const sim::ModelEvent& event) {
  switch (event.kind) {
    case sim::EventKind::core_arrival: on_core_arrival(event); break;
    case sim::EventKind::frame_head: on_frame_head(event); break;
    case sim::EventKind::deliver: on_deliver(event); break;
    default: throw SimulationError("network received a non-network event");
  }
}

void Network::on_core_arrival(const sim::ModelEvent& e) {
  InFlight& slot = slots_.at(e.id);
  Bytes b = frame_bytes(slot.wire, profile_.frame_size, slot.through_core++);
  auto s = core_.admit_not_before(engine_.now(), profile_.core_mu.ceil_mul(b), e.aux);
  core_.complete();
  engine_.schedule(s.start, {sim::EventKind::frame_head, e.host, e.id, s.end});
}

void Network::on_frame_head(const sim::ModelEvent& e) {
  InFlight& slot = slots_.at(e.id);
  if (!slot.live || slot.received >= slot.frames) {
    throw SimulationError("frame for request " + std::to_string(e.id) + " arrived after its last frame");
  }
  const HostId dst = slot.request.dst;
  Bytes b = frame_bytes(slot.wire, profile_.frame_size, slot.received);
  auto s = in_[dst].admit_not_before(engine_.now(), profile_.remote_mu(dst).ceil_mul(b), e.aux);
  in_[dst].complete();
  out_[slot.request.src].complete();
  ++slot.received;
  if (slot.received == slot.frames) engine_.schedule(s.end, {sim::EventKind::deliver, dst, e.id, 0});
}

void Network::on_deliver(const sim::ModelEvent& e) {
  InFlight& slot = slots_.at(e.id);
  if (!slot.live) throw SimulationError("delivery of a dead request " + std::to_string(e.id));
  if (slot.received != slot.frames) {
    throw SimulationError("request " + std::to_string(e.id) + " delivered with " + std::to_string(slot.received) + "/" +
                          std::to_string(slot.frames) + " frames");
  }
  if (slot.request.src == slot.request.dst) loop_[slot.request.src].complete();
  NetRequest request = slot.request;
  slot.live = false;
  --live_;
  free_.push_back(e.id);
  ++counters_.delivered;
  sink_.deliver(request);
}

void Network::check_drained() const {
  if (live_ != 0) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].live) {
        const auto& s = slots_[i];
        throw SimulationError("request " + std::to_string(i) + " (" + std::to_string(s.request.src) + " -> " +
                              std::to_string(s.request.dst) + ") missing frames at drain: " +
                              std::to_string(s.received) + "/" + std::to_string(s.frames));
      }
    }
  }
  auto drained = [](const std::vector<sim::ServiceQueue>& qs) {
    for (const auto& q : qs) {
      if (q.in_flight() != 0) {
        throw SimulationError(std::string(sim::to_string(q.owner().kind)) + " queue of host " +
                              std::to_string(q.owner().host) + " not drained");
      }
    }
  };
  drained(out_);
  drained(in_);
  drained(loop_);
}

}  // namespace wfsim::net

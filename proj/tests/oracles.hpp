#pragma once

// Closed forms for contention-free runs, written from the model rules and
// not from simulator code.

#include <algorithm>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "wfsim/profile.hpp"

namespace oracle {

using i64 = std::int64_t;

inline i64 ceil_frac(i64 bytes, i64 num, i64 den) {
  const __int128 p = static_cast<__int128>(bytes) * num;
  return static_cast<i64>((p + den - 1) / den);
}

// One request over an idle link: frames are max(payload, control) cut at
// frame_size; each costs ceil(bytes * mu); remote requests add one latency.
inline i64 transit(i64 payload, const wfsim::Ratio& mu, i64 frame, i64 control, i64 latency) {
  i64 wire = std::max(payload, control);
  i64 t = 0;
  if (wire == 0) return latency;
  for (i64 left = wire; left > 0; left -= frame) t += ceil_frac(std::min(left, frame), mu.num(), mu.den());
  return t + latency;
}

inline i64 remote(i64 payload, const wfsim::PlatformProfile& p) {
  return transit(payload, p.mu_net_remote, p.frame_size, p.control_message_size, p.core_latency);
}

inline i64 manager(const wfsim::PlatformProfile& p) { return ceil_frac(1, p.mu_manager.num(), p.mu_manager.den()); }
inline i64 client(const wfsim::PlatformProfile& p) { return ceil_frac(1, p.mu_client.num(), p.mu_client.den()); }
inline i64 store(i64 bytes, const wfsim::PlatformProfile& p) {
  return ceil_frac(bytes, p.mu_storage.num(), p.mu_storage.den());
}

inline std::vector<i64> chunk_sizes(i64 size, i64 chunk) {
  std::vector<i64> out;
  for (i64 off = 0; off < size; off += chunk) out.push_back(std::min(chunk, size - off));
  return out;
}

// Manager round trip: request, manager service, reply, client service.
inline i64 control_round_trip(const wfsim::PlatformProfile& p) { return 2 * remote(0, p) + manager(p) + client(p); }

// Write from a client host to one distinct storage host, replication 1.
// All chunks are released at once into four FIFO stations in tandem: the
// client's link, the storage service, the storage's link back (acks) and
// the client service. For tandem FIFO stations the completion of job j at
// station k is max(completion of j-1 at k, completion of j at k-1) plus
// its service; each link crossing adds one latency.
inline i64 write_duration(i64 size, i64 chunk, const wfsim::PlatformProfile& p) {
  if (size == 0) return 2 * control_round_trip(p);
  const i64 lat = p.core_latency;
  const i64 ack_tx = remote(0, p) - lat;
  i64 link = 0, disk = 0, back = 0, cli = 0;
  for (i64 s : chunk_sizes(size, chunk)) {
    link += remote(s, p) - lat;
    disk = std::max(disk, link + lat) + store(s, p);
    back = std::max(back, disk) + ack_tx;
    cli = std::max(cli, back + lat) + client(p);
  }
  return control_round_trip(p) + cli + control_round_trip(p);
}

// Read: map round trip, then per chunk a control request, storage service,
// data back, client service.
inline i64 read_duration(i64 offset, i64 size, i64 chunk, const wfsim::PlatformProfile& p) {
  i64 t = control_round_trip(p);
  if (size == 0) return t;
  for (i64 c = offset / chunk; c * chunk < offset + size; ++c) {
    const i64 lo = std::max(offset, c * chunk);
    const i64 hi = std::min(offset + size, (c + 1) * chunk);
    t += remote(0, p) + store(hi - lo, p) + remote(hi - lo, p) + client(p);
  }
  return t;
}

// Student-t interval from boost.
struct Interval {
  double mean;
  double half_width;
  bool sufficient;
};

inline Interval t_interval(const std::vector<double>& xs, double confidence = 0.95, double target = 0.05) {
  const double n = static_cast<double>(xs.size());
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0, false};
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double s = std::sqrt(ss / (n - 1));
  boost::math::students_t dist(n - 1);
  const double t = boost::math::quantile(dist, 0.5 + confidence / 2);
  const double hw = t * s / std::sqrt(n);
  return {mean, hw, hw <= target * mean};
}

inline double t_quantile(double p, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

}  // namespace oracle

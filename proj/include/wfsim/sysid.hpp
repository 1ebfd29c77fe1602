#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/profile.hpp"
#include "wfsim/units.hpp"

namespace wfsim::sysid {

// Raw calibration data: link throughputs and total times of single-chunk
// writes and of zero-size writes, measured with one client, one storage node
// and the manager on three different hosts.
struct MeasurementSet {
  std::int64_t remote_throughput_bps = 0;
  std::int64_t loopback_throughput_bps = 0;
  Bytes chunk_size = 0;
  std::vector<Duration> full_op_ns;
  std::vector<Duration> zero_size_ns;

  // Network shape carried into the profile.
  Bytes frame_size = 64 * kKiB;
  Bytes control_message_size = kKiB;
  Duration core_latency = 0;
};

struct CiResult {
  double mean = 0.0;
  double half_width = 0.0;
  double relative_half_width = 0.0;
  bool sufficient = false;
};

// Two-sided Student-t quantile: P(T <= t) = p for `dof` degrees of freedom.
double student_t_quantile(double p, double dof);
double student_t_cdf(double t, double dof);

// mean +- t(n-1, (1+confidence)/2) * s / sqrt(n); sufficient iff the half
// width is within target_rel of the mean. Fewer than two samples are never
// sufficient.
CiResult ci_check(std::span<const double> samples, double confidence = 0.95, double target_rel = 0.05);
CiResult ci_check(std::span<const Duration> samples, double confidence = 0.95, double target_rel = 0.05);

Ratio net_mu_from_throughput(std::int64_t bits_per_second);

// The textbook decomposition of the mean full-op time.
struct Decomposition {
  Ratio t_tot;  // mean(full_op_ns)
  Ratio t_net;  // chunk_size * remote ns/byte
  Ratio t_man;  // mean(zero_size_ns); client time is taken as zero
  Ratio t_sm;   // t_tot - t_net - t_man
};

struct Calibration {
  PlatformProfile profile;
  Decomposition decomposition;
  CiResult full_ci;
  CiResult zero_ci;
};

Decomposition decompose(const MeasurementSet& m);

// Builds a profile whose simulated calibration benchmark reproduces the
// measured means. The control-message transfers of a zero-size write (two
// manager round trips) are taken out of the manager time, and the chunk
// transfer plus its ack out of the storage time; with zero-size control
// messages and integral ns/byte this is exactly t_sm / chunk_size.
// Throws CalibrationError when the measurements leave no positive storage
// time or a negative manager time.
Calibration derive_profile(const MeasurementSet& m);

// Deployment used by the calibration benchmark: manager, one storage node
// and one client on three hosts.
StorageConfig calibration_config(Bytes chunk_size);

}  // namespace wfsim::sysid

#include "wfsim/sysid.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wfsim/errors.hpp"
#include "wfsim/net/network.hpp"

namespace wfsim::sysid {

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

Ratio mean_of(const std::vector<Duration>& xs) {
  Ratio sum(0);
  for (auto x : xs) sum = sum + Ratio(x);
  return sum / Ratio(static_cast<std::int64_t>(xs.size()));
}

}  // namespace

double student_t_cdf(double t, double dof) {
  double x = dof / (dof + t * t);
  double tail = 0.5 * incomplete_beta(dof / 2.0, 0.5, x);
  return t >= 0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0) || !(dof > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, dof);
  // Bracket, then bisect; the CDF is monotone.
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_cdf(hi, dof) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CiResult ci_check(std::span<const double> samples, double confidence, double target_rel) {
  CiResult r;
  const auto n = samples.size();
  if (n == 0) return r;
  r.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  if (n < 2) {
    r.half_width = r.relative_half_width = std::numeric_limits<double>::infinity();
    return r;
  }
  double ss = 0.0;
  for (double x : samples) ss += (x - r.mean) * (x - r.mean);
  const double s = std::sqrt(ss / static_cast<double>(n - 1));
  const double t = student_t_quantile(0.5 + confidence / 2.0, static_cast<double>(n - 1));
  r.half_width = t * s / std::sqrt(static_cast<double>(n));
  if (r.half_width == 0.0) {
    r.relative_half_width = 0.0;
  } else if (r.mean == 0.0) {
    r.relative_half_width = std::numeric_limits<double>::infinity();
  } else {
    r.relative_half_width = r.half_width / std::fabs(r.mean);
  }
  r.sufficient = r.relative_half_width <= target_rel;
  return r;
}

CiResult ci_check(std::span<const Duration> samples, double confidence, double target_rel) {
  std::vector<double> xs(samples.begin(), samples.end());
  return ci_check(std::span<const double>(xs), confidence, target_rel);
}

Ratio net_mu_from_throughput(std::int64_t bits_per_second) { return ns_per_byte_from_bps(bits_per_second); }

namespace {

void check_inputs(const MeasurementSet& m) {
  if (m.remote_throughput_bps <= 0) throw CalibrationError("remote_throughput_bps must be > 0");
  if (m.loopback_throughput_bps <= 0) throw CalibrationError("loopback_throughput_bps must be > 0");
  if (m.chunk_size <= 0) throw CalibrationError("chunk_size_bytes must be > 0");
  if (m.full_op_ns.empty()) throw CalibrationError("full_op_ns is empty");
  if (m.zero_size_ns.empty()) throw CalibrationError("zero_size_ns is empty");
  if (m.frame_size <= 0) throw CalibrationError("frame_size must be > 0");
  if (m.control_message_size < 0 || m.core_latency < 0) {
    throw CalibrationError("control_message_size and core_latency_ns must be >= 0");
  }
  for (auto x : m.full_op_ns) {
    if (x < 0) throw CalibrationError("negative full_op_ns sample");
  }
  for (auto x : m.zero_size_ns) {
    if (x < 0) throw CalibrationError("negative zero_size_ns sample");
  }
}

std::string ns(const Ratio& r) { return r.to_string() + " ns"; }

}  // namespace

Decomposition decompose(const MeasurementSet& m) {
  check_inputs(m);
  Decomposition d;
  d.t_tot = mean_of(m.full_op_ns);
  d.t_man = mean_of(m.zero_size_ns);
  d.t_net = Ratio(m.chunk_size) * net_mu_from_throughput(m.remote_throughput_bps);
  d.t_sm = d.t_tot - d.t_net - d.t_man;
  return d;
}

Calibration derive_profile(const MeasurementSet& m) {
  Calibration c;
  c.decomposition = decompose(m);
  const Decomposition& d = c.decomposition;
  if (d.t_sm <= Ratio(0)) {
    throw CalibrationError("mean full-op time " + ns(d.t_tot) + " does not exceed network time " + ns(d.t_net) +
                           " plus zero-size time " + ns(d.t_man) + "; storage time would be " + ns(d.t_sm));
  }

  PlatformProfile& p = c.profile;
  p.mu_net_remote = net_mu_from_throughput(m.remote_throughput_bps);
  p.mu_net_loopback = net_mu_from_throughput(m.loopback_throughput_bps);
  p.frame_size = m.frame_size;
  p.control_message_size = m.control_message_size;
  p.core_latency = m.core_latency;
  p.mu_client = Ratio(0);

  const StorageConfig cfg = calibration_config(m.chunk_size);
  const Deployment dep = Deployment::layout(cfg);
  const HostId mgr = dep.manager_host;
  const HostId storage = dep.storage_hosts.front();
  const HostId client = dep.client_hosts.front();

  // Zero-size write: allocate and commit round trips.
  const Duration control_rtt = net::unloaded_transit(0, client, mgr, p) + net::unloaded_transit(0, mgr, client, p);
  const Ratio manager_time = d.t_man - Ratio(2 * control_rtt);
  if (manager_time.is_negative()) {
    throw CalibrationError("zero-size mean " + ns(d.t_man) + " is shorter than its " + std::to_string(2 * control_rtt) +
                           " ns of control-message transfers");
  }
  p.mu_manager = manager_time / Ratio(2);

  const Duration data_path =
      net::unloaded_transit(m.chunk_size, client, storage, p) + net::unloaded_transit(0, storage, client, p);
  const Ratio storage_time = d.t_tot - d.t_man - Ratio(data_path);
  if (storage_time <= Ratio(0)) {
    throw CalibrationError("mean full-op time " + ns(d.t_tot) + " leaves no storage time after zero-size time " +
                           ns(d.t_man) + " and " + std::to_string(data_path) + " ns of chunk transfer and ack");
  }
  p.mu_storage = storage_time / Ratio(m.chunk_size);

  c.full_ci = ci_check(std::span<const Duration>(m.full_op_ns));
  c.zero_ci = ci_check(std::span<const Duration>(m.zero_size_ns));
  return c;
}

StorageConfig calibration_config(Bytes chunk_size) {
  StorageConfig cfg;
  cfg.n_hosts = 3;
  cfg.n_storage_nodes = 1;
  cfg.n_clients = 1;
  cfg.collocated = false;
  cfg.chunk_size = chunk_size;
  cfg.stripe_width = 1;
  cfg.replication_level = 1;
  return cfg;
}

}  // namespace wfsim::sysid

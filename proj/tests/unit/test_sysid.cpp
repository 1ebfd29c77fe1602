#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "../support.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/synthgen.hpp"
#include "wfsim/sysid.hpp"

using namespace wfsim;
using sysid::MeasurementSet;

namespace {

MeasurementSet example(Duration full, Duration zero) {
  MeasurementSet m;
  m.remote_throughput_bps = 1'000'000'000;
  m.loopback_throughput_bps = 10'000'000'000;
  m.chunk_size = kMB;
  m.full_op_ns = {full};
  m.zero_size_ns = {zero};
  return m;
}

Duration simulate_calibration(const PlatformProfile& p, Bytes size) {
  const auto cfg = sysid::calibration_config(kMB);
  const auto dep = Deployment::layout(cfg);
  auto r = support::run(support::single_write("cal", size, dep.client_hosts.front()), cfg, p);
  return support::first(r, OpKind::write).duration();
}

}  // namespace

TEST_SUITE("sysid") {
  TEST_CASE("network mu from throughput") {
    CHECK(sysid::net_mu_from_throughput(1'000'000'000) == Ratio(8));
    CHECK(sysid::net_mu_from_throughput(10'000'000'000) == Ratio(4, 5));
    CHECK(sysid::net_mu_from_throughput(8) == Ratio(1'000'000'000));
  }

  TEST_CASE("textbook decomposition: 12 ms total, 1 ms zero-size") {
    auto m = example(12'000'000, 1'000'000);
    auto d = sysid::decompose(m);
    CHECK(d.t_net == Ratio(8'000'000));
    CHECK(d.t_man == Ratio(1'000'000));
    CHECK(d.t_sm == Ratio(3'000'000));

    // With zero-size control messages the profile is the direct formula.
    m.control_message_size = 0;
    auto cal = sysid::derive_profile(m);
    CHECK(cal.profile.mu_storage == Ratio(3));
    CHECK(cal.profile.mu_manager == Ratio(500'000));
    CHECK(cal.profile.mu_client == Ratio(0));
    CHECK(cal.profile.mu_net_remote == Ratio(8));
    CHECK(cal.profile.mu_net_loopback == Ratio(4, 5));
  }

  TEST_CASE("non-positive storage time is rejected") {
    CHECK_THROWS_AS(sysid::derive_profile(example(8'000'000, 0)), CalibrationError);
    CHECK_THROWS_AS(sysid::derive_profile(example(7'000'000, 500'000)), CalibrationError);
    try {
      sysid::derive_profile(example(8'000'000, 0));
    } catch (const CalibrationError& e) {
      CHECK(std::string(e.what()).find("8000000") != std::string::npos);
    }
  }

  TEST_CASE("derived profile reproduces the calibration means") {
    auto m = example(12'000'000, 1'000'000);
    m.full_op_ns = {11'900'000, 12'100'000, 12'000'000};
    m.zero_size_ns = {990'000, 1'010'000};
    auto p = sysid::derive_profile(m).profile;
    CHECK(simulate_calibration(p, kMB) == 12'000'000);
    CHECK(simulate_calibration(p, 0) == 1'000'000);

    m.control_message_size = 0;
    p = sysid::derive_profile(m).profile;
    CHECK(simulate_calibration(p, kMB) == 12'000'000);
    CHECK(simulate_calibration(p, 0) == 1'000'000);
  }

  TEST_CASE("scale consistency") {
    auto a = example(12'000'000, 1'000'000);
    a.control_message_size = 0;
    auto b = a;
    b.chunk_size = 2 * kMB;
    b.full_op_ns = {1'000'000 + 16'000'000 + 6'000'000};
    CHECK(sysid::derive_profile(a).profile.mu_storage == sysid::derive_profile(b).profile.mu_storage);
  }

  TEST_CASE("ci examples") {
    std::vector<double> flat(5, 10.0);
    auto c = sysid::ci_check(flat);
    CHECK(c.half_width == 0.0);
    CHECK(c.sufficient);

    std::vector<double> two{1, 100};
    c = sysid::ci_check(two);
    CHECK_FALSE(c.sufficient);
    CHECK(c.half_width == doctest::Approx(oracle::t_interval(two).half_width).epsilon(1e-9));

    // n = 30 with s/mean = 0.01.
    std::vector<double> xs(30, 100.0);
    for (int i = 0; i < 15; ++i) {
      xs[2 * i] -= 1.0;
      xs[2 * i + 1] += 1.0;
    }
    double mean = 100.0;
    double s = std::sqrt(30.0 / 29.0);
    for (auto& x : xs) x = mean + (x - mean) / s;
    c = sysid::ci_check(xs);
    CHECK(c.sufficient);
    CHECK(c.half_width == doctest::Approx(oracle::t_quantile(0.975, 29) * 1.0 / std::sqrt(30.0)).epsilon(1e-9));

    std::vector<double> one{5};
    CHECK_FALSE(sysid::ci_check(one).sufficient);
  }

  TEST_CASE("t quantile against boost") {
    for (double dof : {1.0, 2.0, 3.0, 5.0, 9.0, 19.0, 29.0, 99.0, 1000.0}) {
      for (double p : {0.6, 0.9, 0.95, 0.975, 0.995}) {
        CHECK(std::abs(sysid::student_t_quantile(p, dof) - oracle::t_quantile(p, dof)) <= 1e-6);
      }
    }
    CHECK(sysid::student_t_quantile(0.5, 7) == doctest::Approx(0.0));
    CHECK(sysid::student_t_quantile(0.025, 7) == doctest::Approx(-oracle::t_quantile(0.975, 7)));
  }

  TEST_CASE("adding a sample at the mean never widens the interval") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> d(100.0, 7.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> xs;
      for (int i = 0; i < 2 + trial % 10; ++i) xs.push_back(d(rng));
      auto before = sysid::ci_check(xs);
      xs.push_back(before.mean);
      auto after = sysid::ci_check(xs);
      CHECK(after.relative_half_width <= before.relative_half_width + 1e-15);
    }
  }
}

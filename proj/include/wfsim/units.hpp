#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <string_view>

namespace wfsim {

// Simulated time in nanoseconds since simulation start.
using VirtualTime = std::int64_t;
using Duration = std::int64_t;
using Bytes = std::int64_t;
using HostId = std::uint32_t;

inline constexpr Bytes kKiB = 1024;
inline constexpr Bytes kMB = 1000 * 1000;

// Exact non-negative rational, used for per-byte service costs (ns/byte)
// and calibration arithmetic. Always stored reduced with den > 0.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den = 1);

  static Ratio from_double(double v);
  // Accepts "3", "0.8", "4/5".
  static Ratio parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const noexcept { return num_ == 0; }
  bool is_negative() const noexcept { return num_ < 0; }
  std::string to_string() const;

  // ceil(n * this), the integer-ns cost of n units.
  std::int64_t ceil_mul(std::int64_t n) const;
  std::int64_t ceil() const;

  friend Ratio operator+(const Ratio& a, const Ratio& b);
  friend Ratio operator-(const Ratio& a, const Ratio& b);
  friend Ratio operator*(const Ratio& a, const Ratio& b);
  friend Ratio operator/(const Ratio& a, const Ratio& b);
  friend bool operator==(const Ratio& a, const Ratio& b) = default;
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Per-byte cost of a link or device, 8e9 / (bits per second) ns per byte.
Ratio ns_per_byte_from_bps(std::int64_t bits_per_second);

// ceil(a / b) for non-negative a, positive b.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace wfsim

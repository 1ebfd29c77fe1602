#include "wfsim/units.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wfsim {

namespace {

using i128 = __int128;

Ratio make_reduced(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("ratio with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
  if (num > lim || num < -lim || den > lim) throw std::overflow_error("ratio overflow");
  return Ratio(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("ratio with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Ratio Ratio::from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite ratio");
  // Nine decimal digits covers every value written by the tools.
  constexpr double scale = 1e9;
  double scaled = std::round(v * scale);
  if (std::fabs(scaled) > 9.0e18) throw std::overflow_error("ratio overflow");
  return Ratio(static_cast<std::int64_t>(scaled), static_cast<std::int64_t>(scale));
}

Ratio Ratio::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty ratio");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Ratio(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (text.find_first_of(".eE") == std::string_view::npos) return Ratio(parse_int(text));
  return from_double(std::stod(std::string(text)));
}

std::string Ratio::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::int64_t Ratio::ceil_mul(std::int64_t n) const {
  i128 p = static_cast<i128>(n) * num_;
  i128 q = p / den_;
  if (p % den_ != 0 && p > 0) ++q;
  return static_cast<std::int64_t>(q);
}

std::int64_t Ratio::ceil() const { return ceil_mul(1); }

Ratio operator+(const Ratio& a, const Ratio& b) {
  return make_reduced(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                      static_cast<i128>(a.den_) * b.den_);
}

Ratio operator-(const Ratio& a, const Ratio& b) {
  return make_reduced(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                      static_cast<i128>(a.den_) * b.den_);
}

Ratio operator*(const Ratio& a, const Ratio& b) {
  return make_reduced(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Ratio operator/(const Ratio& a, const Ratio& b) {
  return make_reduced(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  i128 l = static_cast<i128>(a.num_) * b.den_;
  i128 r = static_cast<i128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Ratio ns_per_byte_from_bps(std::int64_t bits_per_second) {
  if (bits_per_second <= 0) throw std::invalid_argument("throughput must be positive");
  return Ratio(8'000'000'000LL, bits_per_second);
}

}  // namespace wfsim

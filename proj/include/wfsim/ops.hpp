#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace wfsim {

enum class OpKind : std::uint8_t { open, read, write, close };

constexpr std::string_view to_string(OpKind k) noexcept {
  switch (k) {
    case OpKind::open: return "open";
    case OpKind::read: return "read";
    case OpKind::write: return "write";
    case OpKind::close: return "close";
  }
  return "?";
}

constexpr std::optional<OpKind> parse_op_kind(std::string_view s) noexcept {
  if (s == "open") return OpKind::open;
  if (s == "read") return OpKind::read;
  if (s == "write") return OpKind::write;
  if (s == "close") return OpKind::close;
  return std::nullopt;
}

}  // namespace wfsim

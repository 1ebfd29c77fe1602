#include "wfsim/sim/service_queue.hpp"

namespace wfsim::sim {

const char* to_string(ServiceKind k) noexcept {
  switch (k) {
    case ServiceKind::manager: return "manager";
    case ServiceKind::storage: return "storage";
    case ServiceKind::client: return "client";
    case ServiceKind::net_out: return "net-out";
    case ServiceKind::net_in: return "net-in";
    case ServiceKind::loopback: return "loopback";
    case ServiceKind::core: return "core";
  }
  return "?";
}

}  // namespace wfsim::sim

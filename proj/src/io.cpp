#include "wfsim/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wfsim/errors.hpp"

namespace wfsim::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t line_at(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Line of the first occurrence of "key", 0 when absent.
std::size_t key_line(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 0 : line_at(text, pos);
}

class Doc {
 public:
  Doc(const std::string& text, const char* what) : text_(text), what_(what) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(what) + ": " + e.what(), line_at(text, e.byte == 0 ? 0 : e.byte - 1));
    }
    if (!root_.is_object()) throw ParseError(std::string(what) + ": top level must be an object", 1);
  }

  const json& root() const { return root_; }

  void only(const json& obj, const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.contains(k)) fail(k, "unknown key '" + k + "'");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ParseError(std::string(what_) + ": " + msg, key_line(text_, key));
  }

  template <class T>
  T get(const json& obj, const std::string& key) const {
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "bad value for '" + key + "'");
    }
  }

  std::int64_t non_negative(const json& obj, const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(key, "'" + key + "' must be an integer");
    const auto n = v.get<std::int64_t>();
    if (n < 0) fail(key, "'" + key + "' must be >= 0");
    return n;
  }

  Ratio ratio(const json& obj, const std::string& key) const {
    const auto& v = obj.at(key);
    try {
      Ratio r;
      if (v.is_number_integer()) {
        r = Ratio(v.get<std::int64_t>());
      } else if (v.is_number()) {
        r = Ratio::from_double(v.get<double>());
      } else if (v.is_string()) {
        r = Ratio::parse(v.get<std::string>());
      } else {
        fail(key, "'" + key + "' must be a number or \"a/b\"");
      }
      if (r.is_negative()) fail(key, "'" + key + "' must be >= 0");
      return r;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(key, "bad value for '" + key + "': " + e.what());
    }
  }

 private:
  const std::string& text_;
  const char* what_;
  json root_;
};

// Integers stay numbers; anything else is written as an exact fraction.
ordered_json ratio_json(const Ratio& r) {
  if (r.den() == 1) return r.num();
  return r.to_string();
}

}  // namespace

PlatformProfile parse_profile(const std::string& text) {
  Doc d(text, "profile");
  const json& j = d.root();
  d.only(j, {"mu_net_remote", "mu_net_loopback", "core_latency", "core_mu", "mu_storage", "mu_manager", "mu_client",
             "frame_size", "control_message_size", "host_overrides"});
  PlatformProfile p;
  if (j.contains("mu_net_remote")) p.mu_net_remote = d.ratio(j, "mu_net_remote");
  if (j.contains("mu_net_loopback")) p.mu_net_loopback = d.ratio(j, "mu_net_loopback");
  if (j.contains("core_latency")) p.core_latency = d.non_negative(j, "core_latency");
  if (j.contains("core_mu")) p.core_mu = d.ratio(j, "core_mu");
  if (j.contains("mu_storage")) p.mu_storage = d.ratio(j, "mu_storage");
  if (j.contains("mu_manager")) p.mu_manager = d.ratio(j, "mu_manager");
  if (j.contains("mu_client")) p.mu_client = d.ratio(j, "mu_client");
  if (j.contains("frame_size")) p.frame_size = d.non_negative(j, "frame_size");
  if (j.contains("control_message_size")) p.control_message_size = d.non_negative(j, "control_message_size");
  if (j.contains("host_overrides")) {
    const auto& ho = j.at("host_overrides");
    if (!ho.is_object()) d.fail("host_overrides", "'host_overrides' must be an object keyed by host id");
    for (const auto& [k, v] : ho.items()) {
      HostId h = 0;
      try {
        std::size_t used = 0;
        const auto n = std::stoul(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
        h = static_cast<HostId>(n);
      } catch (const std::exception&) {
        d.fail(k, "host override key '" + k + "' is not a host id");
      }
      if (!v.is_object()) d.fail(k, "host override '" + k + "' must be an object");
      d.only(v, {"mu_storage", "mu_net_remote", "mu_net_loopback"});
      HostOverride o;
      if (v.contains("mu_storage")) o.mu_storage = d.ratio(v, "mu_storage");
      if (v.contains("mu_net_remote")) o.mu_net_remote = d.ratio(v, "mu_net_remote");
      if (v.contains("mu_net_loopback")) o.mu_net_loopback = d.ratio(v, "mu_net_loopback");
      p.host_overrides[h] = o;
    }
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("profile: ") + e.what(), 0);
  }
  return p;
}

std::string profile_to_json(const PlatformProfile& p) {
  ordered_json j;
  j["mu_net_remote"] = ratio_json(p.mu_net_remote);
  j["mu_net_loopback"] = ratio_json(p.mu_net_loopback);
  j["core_latency"] = p.core_latency;
  j["core_mu"] = ratio_json(p.core_mu);
  j["mu_storage"] = ratio_json(p.mu_storage);
  j["mu_manager"] = ratio_json(p.mu_manager);
  j["mu_client"] = ratio_json(p.mu_client);
  j["frame_size"] = p.frame_size;
  j["control_message_size"] = p.control_message_size;
  if (!p.host_overrides.empty()) {
    ordered_json ho = ordered_json::object();
    for (const auto& [h, o] : p.host_overrides) {
      ordered_json e = ordered_json::object();
      if (o.mu_storage) e["mu_storage"] = ratio_json(*o.mu_storage);
      if (o.mu_net_remote) e["mu_net_remote"] = ratio_json(*o.mu_net_remote);
      if (o.mu_net_loopback) e["mu_net_loopback"] = ratio_json(*o.mu_net_loopback);
      ho[std::to_string(h)] = e;
    }
    j["host_overrides"] = ho;
  }
  return j.dump(2) + "\n";
}

StorageConfig parse_config(const std::string& text) {
  Doc d(text, "config");
  const json& j = d.root();
  d.only(j, {"n_hosts", "n_storage_nodes", "n_clients", "collocated", "chunk_size", "stripe_width",
             "replication_level", "placement", "locality_scheduling", "dispatch_stagger_ns"});
  StorageConfig c;
  auto u32 = [&](const char* key, std::uint32_t& out) {
    if (!j.contains(key)) return;
    const auto n = d.non_negative(j, key);
    if (n > UINT32_MAX) d.fail(key, std::string("'") + key + "' out of range");
    out = static_cast<std::uint32_t>(n);
  };
  u32("n_hosts", c.n_hosts);
  u32("n_storage_nodes", c.n_storage_nodes);
  u32("n_clients", c.n_clients);
  u32("stripe_width", c.stripe_width);
  u32("replication_level", c.replication_level);
  if (j.contains("collocated")) c.collocated = d.get<bool>(j, "collocated");
  if (j.contains("locality_scheduling")) c.locality_scheduling = d.get<bool>(j, "locality_scheduling");
  if (j.contains("chunk_size")) c.chunk_size = d.non_negative(j, "chunk_size");
  if (j.contains("dispatch_stagger_ns")) c.dispatch_stagger = d.non_negative(j, "dispatch_stagger_ns");
  if (j.contains("placement")) {
    try {
      c.placement = Placement::parse(d.get<std::string>(j, "placement"));
    } catch (const ConfigError& e) {
      d.fail("placement", e.what());
    }
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  return c;
}

std::string config_to_json(const StorageConfig& c) {
  ordered_json j;
  j["n_hosts"] = c.n_hosts;
  j["n_storage_nodes"] = c.n_storage_nodes;
  j["n_clients"] = c.n_clients;
  j["collocated"] = c.collocated;
  j["chunk_size"] = c.chunk_size;
  j["stripe_width"] = c.stripe_width;
  j["replication_level"] = c.replication_level;
  j["placement"] = c.placement.to_string();
  j["locality_scheduling"] = c.locality_scheduling;
  j["dispatch_stagger_ns"] = c.dispatch_stagger;
  return j.dump(2) + "\n";
}

sysid::MeasurementSet parse_measurements(const std::string& text) {
  Doc d(text, "measurements");
  const json& j = d.root();
  d.only(j, {"remote_throughput_bps", "loopback_throughput_bps", "chunk_size_bytes", "full_op_ns", "zero_size_ns",
             "frame_size", "control_message_size", "core_latency", "comment"});
  for (const char* key : {"remote_throughput_bps", "loopback_throughput_bps", "chunk_size_bytes", "full_op_ns",
                          "zero_size_ns"}) {
    if (!j.contains(key)) throw ParseError(std::string("measurements: missing key '") + key + "'", 1);
  }
  sysid::MeasurementSet m;
  m.remote_throughput_bps = d.non_negative(j, "remote_throughput_bps");
  m.loopback_throughput_bps = d.non_negative(j, "loopback_throughput_bps");
  m.chunk_size = d.non_negative(j, "chunk_size_bytes");
  if (m.remote_throughput_bps == 0) d.fail("remote_throughput_bps", "'remote_throughput_bps' must be > 0");
  if (m.loopback_throughput_bps == 0) d.fail("loopback_throughput_bps", "'loopback_throughput_bps' must be > 0");
  if (m.chunk_size == 0) d.fail("chunk_size_bytes", "'chunk_size_bytes' must be > 0");
  auto samples = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.empty()) d.fail(key, std::string("'") + key + "' must be a non-empty list");
    std::vector<Duration> out;
    for (const auto& s : v) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
        d.fail(key, std::string("'") + key + "' must hold non-negative integer nanoseconds");
      }
      out.push_back(s.get<Duration>());
    }
    return out;
  };
  m.full_op_ns = samples("full_op_ns");
  m.zero_size_ns = samples("zero_size_ns");
  if (j.contains("frame_size")) m.frame_size = d.non_negative(j, "frame_size");
  if (j.contains("control_message_size")) m.control_message_size = d.non_negative(j, "control_message_size");
  if (j.contains("core_latency")) m.core_latency = d.non_negative(j, "core_latency");
  return m;
}

std::string measurements_to_json(const sysid::MeasurementSet& m) {
  ordered_json j;
  j["remote_throughput_bps"] = m.remote_throughput_bps;
  j["loopback_throughput_bps"] = m.loopback_throughput_bps;
  j["chunk_size_bytes"] = m.chunk_size;
  j["frame_size"] = m.frame_size;
  j["control_message_size"] = m.control_message_size;
  j["core_latency"] = m.core_latency;
  j["full_op_ns"] = m.full_op_ns;
  j["zero_size_ns"] = m.zero_size_ns;
  return j.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << contents;
  if (!out) throw ConfigError("cannot write " + path.string());
}

}  // namespace wfsim::io

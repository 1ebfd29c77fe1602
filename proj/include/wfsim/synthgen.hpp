#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/units.hpp"

namespace wfsim::synthgen {

enum class Pattern : std::uint8_t { micro_write, micro_read, pipeline, reduce, broadcast, blast };

Pattern parse_pattern(const std::string& name);  // throws ConfigError
std::string to_string(Pattern p);

// Generator parameters. Branch i of a parallel pattern is pinned to host
// first_host + i, matching the collocated deployment where client i runs on
// host 1 + i. Sizes are multiplied by `scale` (10 gives the large workload).
struct PatternSpec {
  Pattern pattern = Pattern::pipeline;
  std::uint32_t width = 19;
  std::uint32_t stages = 3;
  Bytes input_size = 100 * kMB;
  Bytes intermediate_size = 100 * kMB;
  Bytes output_size = 100 * kMB;
  std::uint32_t scale = 1;
  bool wass = false;
  std::uint32_t replication = 1;  // broadcast / blast shared file
  std::uint32_t repetitions = 1;  // micro
  HostId first_host = 1;

  // BLAST-like broadcast + gather.
  Bytes db_size = 1'700'000'000;
  Bytes query_size = 5'600;
  Bytes result_size = 82'000;
  Bytes db_read_size = 56 * kKiB;
};

std::string gen_micro(const PatternSpec& spec);
std::string gen_pipeline(const PatternSpec& spec);
std::string gen_reduce(const PatternSpec& spec);
std::string gen_broadcast(const PatternSpec& spec);
std::string gen_blast(const PatternSpec& spec);
std::string generate(const PatternSpec& spec);  // dispatch on spec.pattern

// The paper-testbed deployment: one manager host plus `nodes` hosts each
// running a storage service and a client, striping over all of them.
StorageConfig testbed_config(std::uint32_t nodes = 19);

// Cartesian stripe x replication grid over `base`, named
// "stripe<s>_repl<r>", stripe-major.
std::vector<std::pair<std::string, StorageConfig>> micro_configs(const StorageConfig& base,
                                                                 const std::vector<std::uint32_t>& stripes,
                                                                 const std::vector<std::uint32_t>& replications);

}  // namespace wfsim::synthgen

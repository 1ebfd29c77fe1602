#include "wfsim/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wfsim/errors.hpp"
#include "wfsim/io.hpp"
#include "wfsim/report.hpp"
#include "wfsim/sweep.hpp"
#include "wfsim/synthgen.hpp"
#include "wfsim/sysid.hpp"
#include "wfsim/workload/driver.hpp"
#include "wfsim/workload/workload.hpp"

namespace wfsim::cli {

namespace fs = std::filesystem;

namespace {

struct Inputs {
  std::string profile;
  std::string config;
  std::string workload;
  std::uint64_t seed = 1;
};

PlatformProfile load_profile(const std::string& path) {
  if (path.empty()) return PlatformProfile{};
  return io::parse_profile(io::read_file(path));
}

StorageConfig load_config(const std::string& path) {
  if (path.empty()) return StorageConfig{};
  return io::parse_config(io::read_file(path));
}

workload::Workload load_workload(const std::string& path) { return workload::parse_workload(io::read_file(path)); }

std::string ms(Duration ns) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(3) << static_cast<double>(ns) / 1e6 << " ms";
  return ss.str();
}

void print_summary(std::ostream& out, const RunReport& r) {
  out << "makespan: " << r.makespan << " ns (" << ms(r.makespan) << ")\n"
      << "ops: " << r.totals.ops << "\n"
      << "events: " << r.events << "\n"
      << "remote bytes: " << r.totals.remote_bytes << " (data " << r.totals.data_remote_bytes << ")\n"
      << "loopback bytes: " << r.totals.loopback_bytes << " (data " << r.totals.data_loopback_bytes << ")\n"
      << "control messages: " << r.totals.control_messages << "\n"
      << "manager requests: " << r.totals.manager_requests << "\n"
      << "chunk requests: " << r.totals.chunk_requests << "\n"
      << "replica forwards: " << r.totals.replica_forwards << "\n"
      << "storage final/peak: " << r.storage_final << "/" << r.storage_peak << " bytes\n";
  for (const auto& s : r.stages) {
    out << "stage " << s.stage << ": " << s.tasks << " tasks, [" << s.start << ", " << s.end << "] ns, "
        << s.totals.ops << " ops\n";
  }
}

void write_report_files(const RunReport& r, const std::string& report_path, const std::string& records_path) {
  if (!report_path.empty()) io::write_file(report_path, report_to_json(r));
  if (!records_path.empty()) {
    std::ostringstream ss;
    write_records_csv(ss, r);
    io::write_file(records_path, ss.str());
  }
}

int cmd_seed(const std::string& in, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto m = io::parse_measurements(io::read_file(in));
  const auto cal = sysid::derive_profile(m);
  const auto& d = cal.decomposition;
  err << "T_tot " << d.t_tot.to_double() << " ns, T_net " << d.t_net.to_double() << " ns, T_man "
      << d.t_man.to_double() << " ns, T_sm " << d.t_sm.to_double() << " ns\n";
  auto warn = [&](const char* what, const sysid::CiResult& ci) {
    if (!ci.sufficient) {
      err << "warning: " << what << " samples insufficient: mean " << ci.mean << " ns +- " << ci.half_width
          << " ns (" << ci.relative_half_width * 100.0 << "%), need <= 5% at 95% confidence\n";
    }
  };
  warn("full-op", cal.full_ci);
  warn("zero-size", cal.zero_ci);
  const auto text = io::profile_to_json(cal.profile);
  if (out_path.empty()) out << text;
  else io::write_file(out_path, text);
  return kExitOk;
}

int cmd_simulate(const Inputs& in, const std::string& report_path, const std::string& records_path, bool quiet,
                 std::ostream& out) {
  const auto profile = load_profile(in.profile);
  const auto cfg = load_config(in.config);
  const auto w = load_workload(in.workload);
  workload::DriveOptions opt;
  opt.seed = in.seed;
  const auto r = workload::drive(w, cfg, profile, opt);
  write_report_files(r, report_path, records_path);
  if (!quiet) {
    print_summary(out, r);
    out << "wall: " << std::fixed << std::setprecision(3) << r.wall_seconds << " s\n";
  }
  return kExitOk;
}

struct SweepFlags {
  std::vector<std::uint32_t> stripes;
  std::vector<std::uint32_t> repls;
  std::vector<Bytes> chunks;
  std::vector<std::string> placements;
  std::string out_dir;
  double band = kDefaultEquivalenceBand;
  bool serial = false;
};

int cmd_sweep(const Inputs& in, const SweepFlags& f, std::ostream& out, std::ostream& err) {
  const auto profile = load_profile(in.profile);
  const auto base = load_config(in.config);
  const auto w = load_workload(in.workload);
  auto axes = sweep::Axes::fixed(base);
  if (!f.stripes.empty()) axes.stripe_widths = f.stripes;
  if (!f.repls.empty()) axes.replication_levels = f.repls;
  if (!f.chunks.empty()) axes.chunk_sizes = f.chunks;
  if (!f.placements.empty()) {
    axes.placements.clear();
    for (const auto& p : f.placements) axes.placements.push_back(Placement::parse(p));
  }
  auto points = sweep::expand(base, axes);
  workload::DriveOptions opt;
  opt.seed = in.seed;
  const auto r = f.serial ? sweep::run_serial(w, std::move(points), profile, opt, f.band)
                          : sweep::run(w, std::move(points), profile, opt, f.band);

  std::ostringstream table;
  sweep::write_table_csv(table, r);
  if (f.out_dir.empty()) {
    out << table.str();
  } else {
    io::write_file(fs::path(f.out_dir) / "sweep.csv", table.str());
    std::ostringstream ranking;
    write_ranking_csv(ranking, r.ranking);
    io::write_file(fs::path(f.out_dir) / "ranking.csv", ranking.str());
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      if (!r.reports[i]) continue;
      io::write_file(fs::path(f.out_dir) / "reports" / (r.points[i].label + ".json"), report_to_json(*r.reports[i]));
      io::write_file(fs::path(f.out_dir) / "configs" / (r.points[i].label + ".json"),
                     io::config_to_json(r.points[i].config));
    }
    for (const auto& e : r.ranking) {
      out << e.rank << ". " << e.label << " " << ms(e.makespan) << (e.equivalent_to_previous ? " (equivalent)" : "")
          << "\n";
    }
  }
  bool any_failed = false;
  for (const auto& p : r.points) {
    if (p.status == sweep::Status::skipped) err << "note: skipped " << p.label << ": " << p.note << "\n";
    if (p.status == sweep::Status::failed) {
      err << "error: " << p.label << ": " << p.note << "\n";
      any_failed = true;
    }
  }
  return any_failed ? kExitSimulation : kExitOk;
}

struct GenFlags {
  std::string pattern = "pipeline";
  synthgen::PatternSpec spec;
  std::string out;
};

int cmd_gen_workload(GenFlags f, std::ostream& out) {
  f.spec.pattern = synthgen::parse_pattern(f.pattern);
  const auto text = synthgen::generate(f.spec);
  if (f.out.empty()) out << text;
  else io::write_file(f.out, text);
  return kExitOk;
}

int cmd_gen_configs(const std::string& base_path, const std::vector<std::uint32_t>& stripes,
                    const std::vector<std::uint32_t>& repls, std::uint32_t nodes, const std::string& dir,
                    std::ostream& out) {
  const StorageConfig base = base_path.empty() ? synthgen::testbed_config(nodes) : load_config(base_path);
  const auto configs = synthgen::micro_configs(base, stripes, repls);
  for (const auto& [name, cfg] : configs) {
    io::write_file(fs::path(dir) / (name + ".json"), io::config_to_json(cfg));
    out << (fs::path(dir) / (name + ".json")).string() << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& paths, double band, std::ostream& out) {
  std::vector<RunReport> reports;
  for (const auto& p : paths) reports.push_back(report_from_json(io::read_file(p)));
  if (reports.size() == 1) {
    print_summary(out, reports[0]);
    return kExitOk;
  }
  std::vector<Labeled> runs;
  for (std::size_t i = 0; i < reports.size(); ++i) runs.push_back({paths[i], reports[i].makespan});
  write_ranking_csv(out, compare(runs, band));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"wfsim: workflow storage performance simulator"};
  app.require_subcommand(1);

  // seed
  std::string seed_in, seed_out;
  auto* seed = app.add_subcommand("seed", "derive a platform profile from a measurement file");
  seed->add_option("measurements", seed_in, "measurement JSON")->required();
  seed->add_option("-o,--out", seed_out, "profile output (stdout when omitted)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate workloads and configuration sets");
  gen->require_subcommand(1);
  GenFlags gf;
  auto* gen_w = gen->add_subcommand("workload", "synthetic workload for a workflow pattern");
  gen_w->add_option("-p,--pattern", gf.pattern, "micro_write|micro_read|pipeline|reduce|broadcast|blast")
      ->capture_default_str();
  gen_w->add_option("--width", gf.spec.width, "parallel branches")->capture_default_str();
  gen_w->add_option("--stages", gf.spec.stages, "pipeline stages")->capture_default_str();
  gen_w->add_option("--input-size", gf.spec.input_size, "bytes")->capture_default_str();
  gen_w->add_option("--intermediate-size", gf.spec.intermediate_size, "bytes (also the micro file size)")
      ->capture_default_str();
  gen_w->add_option("--output-size", gf.spec.output_size, "bytes")->capture_default_str();
  gen_w->add_option("--scale", gf.spec.scale, "size multiplier; 10 for the large workload")->capture_default_str();
  gen_w->add_flag("--wass", gf.spec.wass, "emit workflow-aware per-file placement");
  gen_w->add_option("--replication", gf.spec.replication, "replication of the shared file (broadcast, blast)")
      ->capture_default_str();
  gen_w->add_option("--repetitions", gf.spec.repetitions, "micro repetitions")->capture_default_str();
  gen_w->add_option("--db-size", gf.spec.db_size, "blast database bytes")->capture_default_str();
  gen_w->add_option("--db-read-size", gf.spec.db_read_size, "blast database read size")->capture_default_str();
  gen_w->add_option("-o,--out", gf.out, "output file (stdout when omitted)");

  std::string gc_base, gc_dir;
  std::vector<std::uint32_t> gc_stripes{1, 2, 3, 4, 5}, gc_repls{1, 2, 3, 4, 5};
  std::uint32_t gc_nodes = 19;
  auto* gen_c = gen->add_subcommand("configs", "stripe x replication configuration grid");
  gen_c->add_option("--base", gc_base, "base config JSON (default: testbed of --nodes hosts)");
  gen_c->add_option("--nodes", gc_nodes, "testbed nodes")->capture_default_str();
  gen_c->add_option("--stripes", gc_stripes, "stripe widths")->delimiter(',')->capture_default_str();
  gen_c->add_option("--replications", gc_repls, "replication levels")->delimiter(',')->capture_default_str();
  gen_c->add_option("-d,--dir", gc_dir, "output directory")->required();

  // simulate
  Inputs sim_in;
  std::string sim_report, sim_records;
  bool sim_quiet = false;
  auto add_inputs = [](CLI::App* c, Inputs& in) {
    c->add_option("-p,--profile", in.profile, "profile JSON (built-in testbed defaults when omitted)");
    c->add_option("-c,--config", in.config, "storage config JSON (built-in defaults when omitted)");
    c->add_option("-w,--workload", in.workload, "workload file")->required();
    c->add_option("-s,--seed", in.seed, "replica selection seed")->capture_default_str();
  };
  auto* simulate = app.add_subcommand("simulate", "run one workload on one configuration");
  add_inputs(simulate, sim_in);
  simulate->add_option("-r,--report", sim_report, "report JSON output");
  simulate->add_option("--records", sim_records, "per-op records CSV output");
  simulate->add_flag("-q,--quiet", sim_quiet, "no summary on stdout");

  // sweep
  Inputs sw_in;
  SweepFlags sf;
  auto* sw = app.add_subcommand("sweep", "simulate the cartesian product of configuration axes and rank them");
  add_inputs(sw, sw_in);
  sw->add_option("--stripes", sf.stripes, "stripe widths (default: from config)")->delimiter(',');
  sw->add_option("--replications", sf.repls, "replication levels")->delimiter(',');
  sw->add_option("--chunks", sf.chunks, "chunk sizes in bytes")->delimiter(',');
  sw->add_option("--placements", sf.placements, "round_robin, local, co_locate:<group>")->delimiter(',');
  sw->add_option("--band", sf.band, "relative equivalence band")->capture_default_str();
  sw->add_option("-d,--dir", sf.out_dir, "output directory for sweep.csv, ranking.csv, reports/, configs/");
  sw->add_flag("--serial", sf.serial, "run configurations one at a time");

  // report
  std::vector<std::string> rep_paths;
  double rep_band = kDefaultEquivalenceBand;
  auto* rep = app.add_subcommand("report", "summarize one report or rank several");
  rep->add_option("reports", rep_paths, "report JSON files")->required();
  rep->add_option("--band", rep_band, "relative equivalence band")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*seed) return cmd_seed(seed_in, seed_out, out, err);
    if (*gen_w) return cmd_gen_workload(gf, out);
    if (*gen_c) return cmd_gen_configs(gc_base, gc_stripes, gc_repls, gc_nodes, gc_dir, out);
    if (*simulate) return cmd_simulate(sim_in, sim_report, sim_records, sim_quiet, out);
    if (*sw) return cmd_sweep(sw_in, sf, out, err);
    if (*rep) return cmd_report(rep_paths, rep_band, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CalibrationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const WorkloadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const SimulationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSimulation;
  }
  return kExitInput;
}

}  // namespace wfsim::cli

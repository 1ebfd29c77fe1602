#include "wfsim/sweep.hpp"

#include <ostream>

#include "wfsim/errors.hpp"

namespace wfsim::sweep {

namespace {

std::string label_for(const StorageConfig& c) {
  return "stripe" + std::to_string(c.stripe_width) + "_repl" + std::to_string(c.replication_level) + "_chunk" +
         std::to_string(c.chunk_size) + "_" + c.placement.to_string();
}

void run_point(const workload::Workload& w, Point& p, std::optional<RunReport>& out, const PlatformProfile& profile,
               const workload::DriveOptions& options) {
  if (p.status == Status::skipped) return;
  try {
    out = workload::drive(w, p.config, profile, options);
    p.status = Status::ok;
  } catch (const WorkloadError& e) {
    p.status = Status::failed;
    p.note = e.what();
  } catch (const ConfigError& e) {
    p.status = Status::failed;
    p.note = e.what();
  }
}

void rank(Result& r, double band) {
  std::vector<Labeled> runs;
  std::vector<std::size_t> which;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (!r.reports[i]) continue;
    runs.push_back({r.points[i].label, r.reports[i]->makespan});
    which.push_back(i);
  }
  r.ranking = compare(runs, band);
  for (auto& e : r.ranking) e.index = which[e.index];
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

}  // namespace

Axes Axes::fixed(const StorageConfig& base) {
  return {{base.stripe_width}, {base.replication_level}, {base.chunk_size}, {base.placement}};
}

std::string to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::skipped: return "skipped";
    case Status::failed: return "failed";
  }
  return "?";
}

std::vector<Point> expand(const StorageConfig& base, const Axes& axes) {
  if (axes.stripe_widths.empty()) throw ConfigError("sweep axis stripe_width is empty");
  if (axes.replication_levels.empty()) throw ConfigError("sweep axis replication_level is empty");
  if (axes.chunk_sizes.empty()) throw ConfigError("sweep axis chunk_size is empty");
  if (axes.placements.empty()) throw ConfigError("sweep axis placement is empty");
  std::vector<Point> out;
  for (auto s : axes.stripe_widths) {
    for (auto r : axes.replication_levels) {
      for (auto c : axes.chunk_sizes) {
        for (const auto& pl : axes.placements) {
          Point p;
          p.index = out.size();
          p.config = base;
          p.config.stripe_width = s;
          p.config.replication_level = r;
          p.config.chunk_size = c;
          p.config.placement = pl;
          p.label = label_for(p.config);
          try {
            p.config.validate();
          } catch (const ConfigError& e) {
            p.status = Status::skipped;
            p.note = e.what();
          }
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

Result run(const workload::Workload& w, std::vector<Point> points, const PlatformProfile& profile,
           const workload::DriveOptions& options, double band) {
  Result r;
  r.points = std::move(points);
  r.reports.resize(r.points.size());
  const auto n = static_cast<std::int64_t>(r.points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    run_point(w, r.points[static_cast<std::size_t>(i)], r.reports[static_cast<std::size_t>(i)], profile, options);
  }
  rank(r, band);
  return r;
}

Result run_serial(const workload::Workload& w, std::vector<Point> points, const PlatformProfile& profile,
                  const workload::DriveOptions& options, double band) {
  Result r;
  r.points = std::move(points);
  r.reports.resize(r.points.size());
  for (std::size_t i = 0; i < r.points.size(); ++i) run_point(w, r.points[i], r.reports[i], profile, options);
  rank(r, band);
  return r;
}

void write_table_csv(std::ostream& out, const Result& r) {
  std::vector<const RankEntry*> by_point(r.points.size(), nullptr);
  for (const auto& e : r.ranking) by_point[e.index] = &e;
  out << "index,label,stripe_width,replication_level,chunk_size,placement,status,makespan_ns,rank,group,note\n";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    out << p.index << ',' << p.label << ',' << p.config.stripe_width << ',' << p.config.replication_level << ','
        << p.config.chunk_size << ',' << p.config.placement.to_string() << ',' << to_string(p.status) << ',';
    if (r.reports[i]) out << r.reports[i]->makespan;
    out << ',';
    if (by_point[i]) out << by_point[i]->rank << ',' << by_point[i]->group;
    else out << ',';
    out << ',' << csv_field(p.note) << '\n';
  }
}

}  // namespace wfsim::sweep

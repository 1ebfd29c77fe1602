#include "wfsim/report.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "wfsim/errors.hpp"

namespace wfsim {

namespace {

void add(Totals& t, const OpRecord& r) {
  ++t.ops;
  t.remote_bytes += r.remote_bytes;
  t.loopback_bytes += r.loopback_bytes;
  t.data_remote_bytes += r.data_remote_bytes;
  t.data_loopback_bytes += r.data_loopback_bytes;
  t.control_messages += r.control_messages;
  t.manager_requests += r.manager_requests;
  t.chunk_requests += r.chunk_requests;
  t.replica_forwards += r.replica_forwards;
  t.storage_delta += r.storage_delta;
}

nlohmann::ordered_json totals_json(const Totals& t) {
  nlohmann::ordered_json j;
  j["ops"] = t.ops;
  j["remote_bytes"] = t.remote_bytes;
  j["loopback_bytes"] = t.loopback_bytes;
  j["data_remote_bytes"] = t.data_remote_bytes;
  j["data_loopback_bytes"] = t.data_loopback_bytes;
  j["control_messages"] = t.control_messages;
  j["manager_requests"] = t.manager_requests;
  j["chunk_requests"] = t.chunk_requests;
  j["replica_forwards"] = t.replica_forwards;
  j["storage_delta"] = t.storage_delta;
  return j;
}

Totals totals_from_json(const nlohmann::json& j) {
  Totals t;
  t.ops = j.at("ops").get<std::uint64_t>();
  t.remote_bytes = j.at("remote_bytes").get<Bytes>();
  t.loopback_bytes = j.at("loopback_bytes").get<Bytes>();
  t.data_remote_bytes = j.at("data_remote_bytes").get<Bytes>();
  t.data_loopback_bytes = j.at("data_loopback_bytes").get<Bytes>();
  t.control_messages = j.at("control_messages").get<std::uint64_t>();
  t.manager_requests = j.at("manager_requests").get<std::uint64_t>();
  t.chunk_requests = j.at("chunk_requests").get<std::uint64_t>();
  t.replica_forwards = j.at("replica_forwards").get<std::uint64_t>();
  t.storage_delta = j.at("storage_delta").get<Bytes>();
  return t;
}

}  // namespace

RunReport aggregate(std::vector<OpRecord> records, const std::vector<std::uint32_t>& task_stage) {
  RunReport r;
  if (records.empty()) return r;

  r.first_start = std::numeric_limits<VirtualTime>::max();
  std::uint32_t n_stages = 0;
  for (auto s : task_stage) n_stages = std::max(n_stages, s + 1);
  if (n_stages == 0) n_stages = 1;

  std::vector<StageSummary> stages(n_stages);
  std::vector<bool> seen(n_stages, false);
  for (std::uint32_t s = 0; s < n_stages; ++s) stages[s].stage = s;
  for (auto s : task_stage) ++stages[s].tasks;

  for (const auto& rec : records) {
    r.first_start = std::min(r.first_start, rec.start);
    r.last_end = std::max(r.last_end, rec.end);
    add(r.totals, rec);
    std::uint32_t s = rec.task < task_stage.size() ? task_stage[rec.task] : 0;
    auto& st = stages[s];
    if (!seen[s]) {
      st.start = rec.start;
      st.end = rec.end;
      seen[s] = true;
    } else {
      st.start = std::min(st.start, rec.start);
      st.end = std::max(st.end, rec.end);
    }
    add(st.totals, rec);
  }
  r.makespan = r.last_end - r.first_start;
  r.stages = std::move(stages);
  r.storage_final = r.totals.storage_delta;
  r.storage_peak = r.totals.storage_delta;
  r.records = std::move(records);
  return r;
}

std::vector<RankEntry> compare(const std::vector<Labeled>& runs, double band) {
  std::vector<std::size_t> order(runs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return runs[a].makespan < runs[b].makespan; });

  std::vector<RankEntry> out;
  out.reserve(runs.size());
  std::size_t group = 0;
  Duration leader = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& run = runs[order[i]];
    bool same = i > 0 && static_cast<long double>(run.makespan) <=
                             static_cast<long double>(leader) * (1.0L + static_cast<long double>(band));
    if (!same) {
      ++group;
      leader = run.makespan;
    }
    out.push_back({run.label, order[i], run.makespan, i + 1, group, same});
  }
  return out;
}

std::string report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["makespan_ns"] = r.makespan;
  j["first_start_ns"] = r.first_start;
  j["last_end_ns"] = r.last_end;
  j["events"] = r.events;
  j["storage_final_bytes"] = r.storage_final;
  j["storage_peak_bytes"] = r.storage_peak;
  j["totals"] = totals_json(r.totals);
  auto stages = nlohmann::ordered_json::array();
  for (const auto& s : r.stages) {
    nlohmann::ordered_json sj;
    sj["stage"] = s.stage;
    sj["tasks"] = s.tasks;
    sj["start_ns"] = s.start;
    sj["end_ns"] = s.end;
    sj["duration_ns"] = s.end - s.start;
    sj["totals"] = totals_json(s.totals);
    stages.push_back(std::move(sj));
  }
  j["stages"] = std::move(stages);
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what(), 0);
  }
  try {
    RunReport r;
    r.makespan = j.at("makespan_ns").get<Duration>();
    r.first_start = j.at("first_start_ns").get<VirtualTime>();
    r.last_end = j.at("last_end_ns").get<VirtualTime>();
    r.events = j.at("events").get<std::uint64_t>();
    r.storage_final = j.at("storage_final_bytes").get<Bytes>();
    r.storage_peak = j.at("storage_peak_bytes").get<Bytes>();
    r.totals = totals_from_json(j.at("totals"));
    for (const auto& sj : j.at("stages")) {
      StageSummary s;
      s.stage = sj.at("stage").get<std::uint32_t>();
      s.tasks = sj.at("tasks").get<std::uint32_t>();
      s.start = sj.at("start_ns").get<VirtualTime>();
      s.end = sj.at("end_ns").get<VirtualTime>();
      s.totals = totals_from_json(sj.at("totals"));
      r.stages.push_back(s);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what(), 0);
  }
}

void write_records_csv(std::ostream& out, const RunReport& r) {
  out << "op_id,task,trace_client,host,kind,file,offset,size,start_ns,end_ns,duration_ns,remote_bytes,"
         "loopback_bytes,data_remote_bytes,data_loopback_bytes,control_messages,manager_requests,chunk_requests,"
         "replica_forwards,storage_delta\n";
  auto name = [](const std::vector<std::string>& names, std::uint32_t i) -> const std::string& {
    static const std::string none;
    return i < names.size() ? names[i] : none;
  };
  for (const auto& x : r.records) {
    out << x.op_id << ',' << name(r.task_names, x.task) << ',' << x.trace_client << ',' << x.host << ','
        << to_string(x.kind) << ',' << name(r.file_names, x.file) << ',' << x.offset << ',' << x.size << ','
        << x.start << ',' << x.end << ',' << x.duration() << ',' << x.remote_bytes << ',' << x.loopback_bytes << ','
        << x.data_remote_bytes << ',' << x.data_loopback_bytes << ',' << x.control_messages << ','
        << x.manager_requests << ',' << x.chunk_requests << ',' << x.replica_forwards << ',' << x.storage_delta
        << '\n';
  }
}

void write_ranking_csv(std::ostream& out, const std::vector<RankEntry>& ranking) {
  out << "rank,label,input_index,makespan_ns,group,equivalent_to_previous\n";
  for (const auto& e : ranking) {
    out << e.rank << ',' << e.label << ',' << e.index << ',' << e.makespan << ',' << e.group << ','
        << (e.equivalent_to_previous ? 1 : 0) << '\n';
  }
}

}  // namespace wfsim

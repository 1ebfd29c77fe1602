#include "wfsim/workload/workload.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "wfsim/errors.hpp"

namespace wfsim::workload {

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      std::string_view f = s.substr(start, i - start);
      while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
      while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
      out.push_back(f);
      start = i + 1;
    }
  }
  return out;
}

template <class T>
T parse_num(std::string_view s, const char* what, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'", line);
  }
  if constexpr (std::is_signed_v<T>) {
    if (v < 0) throw ParseError(std::string(what) + " must be >= 0", line);
  }
  return v;
}

std::pair<std::string_view, std::string_view> key_value(std::string_view tok, std::size_t line) {
  auto eq = tok.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.size()) {
    throw ParseError("expected key=value, got '" + std::string(tok) + "'", line);
  }
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

bool valid_name(std::string_view s) {
  return !s.empty() && s.find_first_of(",#=") == std::string_view::npos && s != "-";
}

enum class Section { none, files, groups, tasks };

}  // namespace

bool FileDecl::is_pattern() const noexcept { return name.find_first_of("*?[") != std::string::npos; }

std::size_t Workload::op_count() const {
  std::size_t n = 0;
  for (const auto& t : tasks) n += t.ops.size();
  return n;
}

std::optional<std::uint32_t> Workload::task_index(std::string_view id) const {
  for (std::uint32_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].id == id) return i;
  }
  return std::nullopt;
}

const FileDecl* Workload::find_decl(std::string_view name) const {
  for (const auto& f : files) {
    if (!f.is_pattern() && f.name == name) return &f;
  }
  return nullptr;
}

FilePolicy Workload::policy_for(std::string_view name) const {
  if (const FileDecl* d = find_decl(name)) return d->policy;
  const std::string n(name);
  for (const auto& f : files) {
    if (f.is_pattern() && fnmatch(f.name.c_str(), n.c_str(), 0) == 0) return f.policy;
  }
  return {};
}

Workload parse_workload(std::string_view text) {
  Workload w;
  Section section = Section::none;
  Task* current = nullptr;
  std::set<std::string> task_ids;
  std::set<std::string> file_names;
  std::set<std::string> group_names;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
      if (nl == text.size()) break;
      continue;
    }
    line = line.substr(first);
    if (line.front() == '#') continue;

    if (line.front() == '[') {
      if (line == "[files]") {
        section = Section::files;
      } else if (line == "[groups]") {
        section = Section::groups;
      } else if (line == "[tasks]") {
        section = Section::tasks;
      } else {
        throw ParseError("unknown section " + std::string(line), line_no);
      }
      current = nullptr;
      continue;
    }

    switch (section) {
      case Section::none: throw ParseError("content before any section", line_no);
      case Section::files: {
        auto toks = split_ws(line);
        if (toks.size() < 2) throw ParseError("expected '<name> <size|-> [key=value...]'", line_no);
        FileDecl d;
        d.name = std::string(toks[0]);
        d.line = line_no;
        if (!valid_name(d.name)) throw ParseError("bad file name '" + d.name + "'", line_no);
        if (!file_names.insert(d.name).second) throw ParseError("file '" + d.name + "' declared twice", line_no);
        if (toks[1] != "-") d.size = parse_num<Bytes>(toks[1], "size", line_no);
        if (d.is_pattern() && d.size) throw ParseError("pattern entries take '-' as size", line_no);
        for (std::size_t i = 2; i < toks.size(); ++i) {
          auto [k, v] = key_value(toks[i], line_no);
          if (k == "placement") {
            try {
              d.policy.placement = Placement::parse(std::string(v));
            } catch (const ConfigError& e) {
              throw ParseError(e.what(), line_no);
            }
          } else if (k == "replication") {
            d.policy.replication_level = parse_num<std::uint32_t>(v, "replication", line_no);
            if (*d.policy.replication_level == 0) throw ParseError("replication must be >= 1", line_no);
          } else if (k == "stripe") {
            d.policy.stripe_width = parse_num<std::uint32_t>(v, "stripe", line_no);
            if (*d.policy.stripe_width == 0) throw ParseError("stripe must be >= 1", line_no);
          } else if (k == "origin") {
            d.origin = parse_num<HostId>(v, "origin host", line_no);
          } else {
            throw ParseError("unknown file key '" + std::string(k) + "'", line_no);
          }
        }
        w.files.push_back(std::move(d));
        break;
      }
      case Section::groups: {
        auto toks = split_ws(line);
        if (toks.size() != 2) throw ParseError("expected '<group> task=<id>' or '<group> host=<id>'", line_no);
        GroupDecl g;
        g.name = std::string(toks[0]);
        g.line = line_no;
        if (!valid_name(g.name)) throw ParseError("bad group name '" + g.name + "'", line_no);
        if (!group_names.insert(g.name).second) throw ParseError("group '" + g.name + "' declared twice", line_no);
        auto [k, v] = key_value(toks[1], line_no);
        if (k == "task") {
          g.task = std::string(v);
        } else if (k == "host") {
          g.host = parse_num<HostId>(v, "host", line_no);
        } else {
          throw ParseError("unknown group key '" + std::string(k) + "'", line_no);
        }
        w.groups.push_back(std::move(g));
        break;
      }
      case Section::tasks: {
        if (line.rfind("task", 0) == 0 && (line.size() == 4 || line[4] == ' ' || line[4] == '\t')) {
          auto toks = split_ws(line);
          if (toks.size() < 2 || toks.size() > 3) throw ParseError("expected 'task <id> [pin=<host>]'", line_no);
          Task t;
          t.id = std::string(toks[1]);
          t.line = line_no;
          if (!valid_name(t.id)) throw ParseError("bad task id '" + t.id + "'", line_no);
          if (!task_ids.insert(t.id).second) throw ParseError("task '" + t.id + "' declared twice", line_no);
          if (toks.size() == 3) {
            auto [k, v] = key_value(toks[2], line_no);
            if (k != "pin") throw ParseError("unknown task key '" + std::string(k) + "'", line_no);
            t.pin = parse_num<HostId>(v, "pin host", line_no);
          }
          w.tasks.push_back(std::move(t));
          current = &w.tasks.back();
          break;
        }
        if (!current) throw ParseError("operation before any 'task' line", line_no);
        auto f = split_csv(line);
        if (f.size() != 6) throw ParseError("expected 't,client,op,file,offset,size'", line_no);
        TraceOp op;
        op.timestamp = parse_num<Duration>(f[0], "timestamp", line_no);
        op.client = parse_num<std::uint32_t>(f[1], "client", line_no);
        auto kind = parse_op_kind(f[2]);
        if (!kind) throw ParseError("unknown operation '" + std::string(f[2]) + "'", line_no);
        op.op = *kind;
        op.file = std::string(f[3]);
        if (!valid_name(op.file) || op.file.find_first_of(" \t*?[") != std::string::npos) {
          throw ParseError("bad file name '" + op.file + "'", line_no);
        }
        op.offset = parse_num<Bytes>(f[4], "offset", line_no);
        op.size = parse_num<Bytes>(f[5], "size", line_no);
        op.line = line_no;
        current->ops.push_back(std::move(op));
        break;
      }
    }
    if (nl == text.size()) break;
  }
  finalize(w);
  return w;
}

namespace {

std::string describe_cycle(const Workload& w, const std::vector<std::vector<std::uint32_t>>& consumers,
                           const std::vector<std::uint32_t>& indegree) {
  // Walk backwards-free: from any task still blocked, follow consumers that
  // are also blocked until a task repeats.
  const auto n = static_cast<std::uint32_t>(w.tasks.size());
  std::uint32_t start = n;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (indegree[i] > 0) {
      start = i;
      break;
    }
  }
  std::vector<int> seen_at(n, -1);
  std::vector<std::uint32_t> path;
  std::uint32_t cur = start;
  while (seen_at[cur] < 0) {
    seen_at[cur] = static_cast<int>(path.size());
    path.push_back(cur);
    std::uint32_t next = n;
    for (auto c : consumers[cur]) {
      if (indegree[c] > 0) {
        next = c;
        break;
      }
    }
    if (next == n) break;
    cur = next;
  }
  std::string out;
  for (std::size_t i = static_cast<std::size_t>(std::max(seen_at[cur], 0)); i < path.size(); ++i) {
    out += w.tasks[path[i]].id + " -> ";
  }
  return out + w.tasks[cur].id;
}

}  // namespace

void finalize(Workload& w) {
  const auto n = static_cast<std::uint32_t>(w.tasks.size());
  TaskGraph g;
  g.inputs.resize(n);
  g.outputs.resize(n);
  g.producers.resize(n);
  g.consumers.resize(n);
  g.stage.assign(n, 0);

  std::set<std::string> group_names;
  for (const auto& gr : w.groups) {
    group_names.insert(gr.name);
    if (gr.task) {
      auto ti = w.task_index(*gr.task);
      if (!ti) throw WorkloadError("group '" + gr.name + "' targets unknown task '" + *gr.task + "'");
      if (!w.tasks[*ti].pin) {
        throw WorkloadError("group '" + gr.name + "' targets task '" + *gr.task + "' which has no pin");
      }
    }
  }
  for (const auto& f : w.files) {
    if (f.policy.placement && f.policy.placement->kind == PlacementKind::co_locate &&
        !group_names.count(f.policy.placement->group)) {
      throw WorkloadError("file '" + f.name + "' references unknown group '" + f.policy.placement->group + "'");
    }
  }

  std::uint64_t next_id = 0;
  for (std::uint32_t ti = 0; ti < n; ++ti) {
    Task& t = w.tasks[ti];
    std::set<std::string> open, closed, in, out;
    Duration prev_ts = 0;
    for (auto& op : t.ops) {
      op.id = next_id++;
      auto where = [&] { return "task '" + t.id + "'" + (op.line ? ", line " + std::to_string(op.line) : "") + ": "; };
      if (op.timestamp < prev_ts) throw WorkloadError(where() + "timestamps must not decrease within a task");
      prev_ts = op.timestamp;
      switch (op.op) {
        case OpKind::open:
          if (open.count(op.file)) throw WorkloadError(where() + "'" + op.file + "' opened twice");
          open.insert(op.file);
          break;
        case OpKind::close:
          if (!open.erase(op.file)) throw WorkloadError(where() + "close of '" + op.file + "' which is not open");
          closed.insert(op.file);
          break;
        case OpKind::read:
          if (!open.count(op.file)) throw WorkloadError(where() + "read of '" + op.file + "' outside open/close");
          in.insert(op.file);
          break;
        case OpKind::write:
          if (!open.count(op.file)) throw WorkloadError(where() + "write of '" + op.file + "' outside open/close");
          if (closed.count(op.file)) throw WorkloadError(where() + "'" + op.file + "' written again after close");
          out.insert(op.file);
          break;
      }
    }
    if (!open.empty()) throw WorkloadError("task '" + t.id + "' leaves '" + *open.begin() + "' open");
    for (const auto& f : in) {
      if (out.count(f)) throw WorkloadError("dependency cycle: " + t.id + " -> " + t.id + " (reads its own output '" + f + "')");
    }
    g.inputs[ti].assign(in.begin(), in.end());
    g.outputs[ti].assign(out.begin(), out.end());
    for (const auto& f : out) {
      auto [it, fresh] = g.producer_of.emplace(f, ti);
      if (!fresh) {
        throw WorkloadError("file '" + f + "' written by both '" + w.tasks[it->second].id + "' and '" + t.id + "'");
      }
    }
  }

  std::set<std::string> preload_set;
  for (std::uint32_t ti = 0; ti < n; ++ti) {
    std::set<std::uint32_t> prods;
    for (const auto& f : g.inputs[ti]) {
      if (auto it = g.producer_of.find(f); it != g.producer_of.end()) {
        prods.insert(it->second);
        continue;
      }
      const FileDecl* d = w.find_decl(f);
      if (!d || !d->size) {
        throw WorkloadError("read-before-write: task '" + w.tasks[ti].id + "' reads '" + f +
                            "' which no task writes and which is not a sized input in [files]");
      }
      preload_set.insert(f);
    }
    g.producers[ti].assign(prods.begin(), prods.end());
    for (auto p : prods) g.consumers[p].push_back(ti);
  }
  for (auto& c : g.consumers) std::sort(c.begin(), c.end());
  for (const auto& f : w.files) {
    if (preload_set.count(f.name)) g.preloaded.push_back(f.name);
  }

  // Kahn, lowest index first, with longest-path levels.
  std::vector<std::uint32_t> indegree(n);
  for (std::uint32_t i = 0; i < n; ++i) indegree[i] = static_cast<std::uint32_t>(g.producers[i].size());
  std::set<std::uint32_t> ready;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    std::uint32_t t = *ready.begin();
    ready.erase(ready.begin());
    g.topo_order.push_back(t);
    for (auto c : g.consumers[t]) {
      g.stage[c] = std::max(g.stage[c], g.stage[t] + 1);
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  if (g.topo_order.size() != n) throw WorkloadError("dependency cycle: " + describe_cycle(w, g.consumers, indegree));
  for (auto s : g.stage) g.n_stages = std::max(g.n_stages, s + 1);
  w.graph = std::move(g);
}

std::string serialize(const Workload& w) {
  std::ostringstream out;
  out << "[files]\n";
  for (const auto& f : w.files) {
    out << f.name << ' ';
    if (f.size) {
      out << *f.size;
    } else {
      out << '-';
    }
    if (f.policy.placement) out << " placement=" << f.policy.placement->to_string();
    if (f.policy.replication_level) out << " replication=" << *f.policy.replication_level;
    if (f.policy.stripe_width) out << " stripe=" << *f.policy.stripe_width;
    if (f.origin) out << " origin=" << *f.origin;
    out << '\n';
  }
  if (!w.groups.empty()) {
    out << "[groups]\n";
    for (const auto& g : w.groups) {
      out << g.name << ' ';
      if (g.task) {
        out << "task=" << *g.task;
      } else {
        out << "host=" << g.host.value_or(0);
      }
      out << '\n';
    }
  }
  out << "[tasks]\n";
  for (const auto& t : w.tasks) {
    out << "task " << t.id;
    if (t.pin) out << " pin=" << *t.pin;
    out << '\n';
    for (const auto& op : t.ops) {
      out << op.timestamp << ',' << op.client << ',' << to_string(op.op) << ',' << op.file << ',' << op.offset << ','
          << op.size << '\n';
    }
  }
  return out.str();
}

bool same_content(const Workload& a, const Workload& b) {
  if (a.files.size() != b.files.size() || a.groups.size() != b.groups.size() || a.tasks.size() != b.tasks.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    const auto &x = a.files[i], &y = b.files[i];
    if (x.name != y.name || x.size != y.size || !(x.policy == y.policy) || x.origin != y.origin) return false;
  }
  for (std::size_t i = 0; i < a.groups.size(); ++i) {
    const auto &x = a.groups[i], &y = b.groups[i];
    if (x.name != y.name || x.task != y.task || x.host != y.host) return false;
  }
  for (std::size_t i = 0; i < a.tasks.size(); ++i) {
    const auto &x = a.tasks[i], &y = b.tasks[i];
    if (x.id != y.id || x.pin != y.pin || x.ops.size() != y.ops.size()) return false;
    for (std::size_t k = 0; k < x.ops.size(); ++k) {
      const auto &p = x.ops[k], &q = y.ops[k];
      if (p.timestamp != q.timestamp || p.client != q.client || p.op != q.op || p.file != q.file ||
          p.offset != q.offset || p.size != q.size) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace wfsim::workload

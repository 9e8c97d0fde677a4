#include "gedf/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string_view>

namespace gedf {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

Tick checked_add(Tick a, Tick b) {
  Tick out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("tick overflow in addition");
  return out;
}

Tick checked_mul(Tick a, Tick b) {
  Tick out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("tick overflow in multiplication");
  return out;
}

std::string validate_task(const TaskParams& p) {
  if (p.wcet < 1) return "WCET must be at least 1";
  if (p.period < 1) return "period must be at least 1";
  if (p.deadline > p.period) return "deadline exceeds period (D > T)";
  if (p.wcet > p.deadline) return "WCET exceeds deadline (C > D)";
  return {};
}

TaskSet::TaskSet(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
  if (tasks_.empty()) throw std::invalid_argument("task set is empty");
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    if (t.id != i + 1) {
      throw std::invalid_argument("task ids must be 1..n in order; position " + std::to_string(i + 1) +
                                  " has id " + std::to_string(t.id));
    }
    if (auto err = validate_task({t.offset, t.wcet, t.deadline, t.period}); !err.empty()) {
      throw std::invalid_argument("task " + std::to_string(t.id) + ": " + err);
    }
  }
}

TaskSet TaskSet::from_params(const std::vector<TaskParams>& params) {
  std::vector<Task> tasks;
  tasks.reserve(params.size());
  for (const auto& p : params) {
    tasks.push_back({static_cast<TaskId>(tasks.size() + 1), p.offset, p.wcet, p.deadline, p.period});
  }
  return TaskSet(std::move(tasks));
}

bool TaskSet::synchronous() const {
  return std::all_of(tasks_.begin(), tasks_.end(),
                     [&](const Task& t) { return t.offset == tasks_.front().offset; });
}

Platform::Platform(std::size_t processors) : m_(processors) {
  if (m_ < 1) throw std::invalid_argument("platform needs at least one processor");
}

Tick hyperperiod(const TaskSet& ts) {
  Tick p = 1;
  for (const Task& t : ts) {
    const Tick g = std::gcd(p, t.period);
    p = checked_mul(p / g, t.period);
  }
  return p;
}

Tick max_offset(const TaskSet& ts) {
  Tick o = 0;
  for (const Task& t : ts) o = std::max(o, t.offset);
  return o;
}

Tick total_wcet(const TaskSet& ts) {
  Tick c = 0;
  for (const Task& t : ts) c = checked_add(c, t.wcet);
  return c;
}

Rational utilization(const TaskSet& ts) {
  Rational u;
  for (const Task& t : ts) {
    u += Rational(static_cast<std::int64_t>(t.wcet), static_cast<std::int64_t>(t.period));
  }
  return u;
}

Job job_release(const Task& task, std::uint64_t j) {
  if (j == 0) throw std::invalid_argument("job index starts at 1");
  const Tick release = checked_add(task.offset, checked_mul(j - 1, task.period));
  return Job{task.id, j, release, checked_add(release, task.deadline), task.wcet};
}

namespace {

std::string_view strip_line(std::string_view line) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
    line.remove_suffix(1);
  }
  return line;
}

// Fields are separated by exactly one space.
std::vector<std::string_view> split_fields(std::string_view line, std::size_t lineno) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(' ', pos);
    const auto field = line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (field.empty()) throw ParseError(lineno, "fields must be separated by single spaces");
    if (field.find('\t') != std::string_view::npos) throw ParseError(lineno, "tab characters are not allowed");
    out.push_back(field);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

Tick parse_number(std::string_view field, std::size_t lineno, const char* what) {
  if (field.empty() || !std::all_of(field.begin(), field.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError(lineno, std::string(what) + " must be a non-negative decimal integer, got '" +
                                 std::string(field) + "'");
  }
  Tick v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(lineno, std::string(what) + " is out of range");
  }
  return v;
}

}  // namespace

System parse_taskset(std::istream& in) {
  std::optional<std::size_t> m;
  std::vector<TaskParams> params;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = strip_line(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line, lineno);
    if (fields[0] == "m") {
      if (m) throw ParseError(lineno, "duplicate 'm' directive");
      if (fields.size() != 2) throw ParseError(lineno, "expected 'm <processors>'");
      const Tick value = parse_number(fields[1], lineno, "processor count");
      if (value < 1) throw ParseError(lineno, "processor count must be at least 1");
      m = static_cast<std::size_t>(value);
    } else if (fields[0] == "task") {
      if (!m) throw ParseError(lineno, "'m' directive must precede the first task");
      if (fields.size() != 5) throw ParseError(lineno, "expected 'task <O> <C> <D> <T>'");
      TaskParams p;
      p.offset = parse_number(fields[1], lineno, "offset");
      p.wcet = parse_number(fields[2], lineno, "WCET");
      p.deadline = parse_number(fields[3], lineno, "deadline");
      p.period = parse_number(fields[4], lineno, "period");
      if (p.period > kMaxPeriod) {
        throw ParseError(lineno, "period exceeds limit of " + std::to_string(kMaxPeriod));
      }
      if (auto err = validate_task(p); !err.empty()) throw ParseError(lineno, err);
      if (params.size() == kMaxTasks) {
        throw ParseError(lineno, "more than " + std::to_string(kMaxTasks) + " tasks");
      }
      params.push_back(p);
    } else {
      throw ParseError(lineno, "unknown directive '" + std::string(fields[0]) + "'");
    }
  }
  if (!m) throw ParseError(0, "missing 'm' directive");
  if (params.empty()) throw ParseError(0, "no tasks");
  return System{TaskSet::from_params(params), Platform(*m)};
}

System parse_taskset_string(const std::string& text) {
  std::istringstream in(text);
  return parse_taskset(in);
}

System load_taskset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_taskset(in);
}

std::string format_taskset(const System& system) {
  std::ostringstream out;
  out << "m " << system.platform.processors() << '\n';
  for (const Task& t : system.tasks) {
    out << "task " << t.offset << ' ' << t.wcet << ' ' << t.deadline << ' ' << t.period << '\n';
  }
  return out.str();
}

}  // namespace gedf

#include "gedf/sim.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <sstream>
#include <tuple>

namespace gedf {

namespace {

std::atomic<std::uint64_t> g_checked_ticks{0};

[[noreturn]] void violation(Tick now, const std::string& what) {
  throw InvariantViolation("t=" + std::to_string(now) + ": " + what);
}

// Priority computed straight from the job fields, independently of
// scheduler::priority_key, so a broken key function cannot hide itself.
std::tuple<std::int64_t, TaskId, Tick> reference_key(const Job& j, Tick now, Policy policy) {
  const auto d = static_cast<std::int64_t>(j.abs_deadline);
  const std::int64_t primary = policy == Policy::edf ? d : d - static_cast<std::int64_t>(now) -
                                                               static_cast<std::int64_t>(j.remaining);
  return {primary, j.task_id, j.release};
}

void check_tick(const SimState& state, std::span<const Job> ready, std::span<const std::size_t> order,
                std::span<const TaskId> row, std::size_t m, Policy policy) {
  const Tick now = state.now;
  if (order.size() != std::min(m, ready.size())) {
    violation(now, "work conservation: " + std::to_string(order.size()) + " of " + std::to_string(m) +
                       " processors busy with " + std::to_string(ready.size()) + " ready jobs");
  }
  std::vector<bool> chosen(ready.size(), false);
  for (std::size_t idx : order) {
    if (idx >= ready.size()) violation(now, "dispatch returned an index outside the ready set");
    if (chosen[idx]) violation(now, "job dispatched on two processors");
    chosen[idx] = true;
  }
  std::vector<TaskId> ids(row.begin(), row.end());
  std::erase(ids, TaskId{0});
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    violation(now, "task executes on more than one processor");
  }
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (reference_key(ready[order[k]], now, policy) < reference_key(ready[order[k - 1]], now, policy)) {
      violation(now, "processors not filled in priority order");
    }
  }
  if (!order.empty()) {
    const auto worst_running = reference_key(ready[order.back()], now, policy);
    for (std::size_t i = 0; i < ready.size(); ++i) {
      if (!chosen[i] && reference_key(ready[i], now, policy) < worst_running) {
        violation(now, "priority dominance: waiting job of task " + std::to_string(ready[i].task_id) +
                           " outranks a running job");
      }
    }
  }
  for (TaskId id : row) {
    if (id != 0 && !state.active.at(id - 1)) violation(now, "trace names a task with no active job");
  }
  g_checked_ticks.fetch_add(1, std::memory_order_relaxed);
}

bool miss_precedes(const DeadlineMiss& a, const DeadlineMiss& b) {
  return std::tie(a.abs_deadline, a.task_id) < std::tie(b.abs_deadline, b.task_id);
}

void open_impl(SimState& state, const TaskSet& ts, const SimOptions& options, std::vector<Job>* released) {
  if (state.instant_open) return;
  if (state.miss) throw std::logic_error("simulation already halted on a deadline miss");
  const Tick t = state.now;
  std::optional<DeadlineMiss> found;
  auto consider = [&](const Job& j) {
    const DeadlineMiss m{j.task_id, j.job_index, j.abs_deadline, j.remaining};
    if (!found || miss_precedes(m, *found)) found = m;
  };

  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (state.next_release[i] != t) continue;
    const Task& task = ts[i];
    if (state.active[i]) {
      // Previous job still pending at the next release.
      consider(*state.active[i]);
    } else {
      Job job = job_release(task, state.next_release_index[i]);
      if (options.execution) {
        const Tick granted = options.execution(task, job.job_index);
        if (granted < 1 || granted > task.wcet) {
          throw std::invalid_argument("execution time for task " + std::to_string(task.id) +
                                      " must lie in [1, C_i]");
        }
        job.remaining = granted;
      }
      state.budget[i] = job.remaining;
      state.executed[i] = 0;
      state.active[i] = job;
      if (released) released->push_back(job);
    }
    ++state.next_release_index[i];
    state.next_release[i] = checked_add(t, task.period);
  }

  for (const auto& job : state.active) {
    if (job && job->abs_deadline <= t) consider(*job);
  }
  state.miss = found;
  state.instant_open = true;
}

void close_impl(SimState& state, const TaskSet& ts, const Platform& platform, const SimOptions& options,
                std::span<TaskId> row, std::vector<Job>* completed) {
  if (!state.instant_open) throw std::logic_error("close_instant called before open_instant");
  if (state.miss) throw std::logic_error("simulation already halted on a deadline miss");
  const std::size_t m = platform.processors();
  if (row.size() != m) throw std::invalid_argument("trace row must have one slot per processor");

  // Scratch buffers are per thread so concurrent runs stay independent.
  thread_local std::vector<Job> ready;
  thread_local std::vector<std::size_t> order;
  thread_local std::vector<PriorityKey> keys;
  ready.clear();
  for (const auto& job : state.active) {
    if (job) ready.push_back(*job);
  }
  if (options.dispatcher) {
    order.clear();
    options.dispatcher(ready, m, state.now, options.policy, order);
  } else {
    dispatch_into(ready, m, state.now, options.policy, order, keys);
  }
  if (order.size() > m) throw InvariantViolation("dispatcher selected more jobs than processors");

  std::fill(row.begin(), row.end(), TaskId{0});
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= ready.size()) throw InvariantViolation("dispatcher index outside the ready set");
    row[k] = ready[order[k]].task_id;
  }

  if (options.check_invariants) {
    check_tick(state, ready, order, row, m, options.policy);
    for (TaskId id : row) {
      if (id != 0) ++state.executed[id - 1];
    }
  }

  for (std::size_t idx : order) {
    const std::size_t task_index = ready[idx].task_id - 1;
    auto& job = state.active[task_index];
    if (!job || job->remaining == 0) throw InvariantViolation("executing a job with no remaining work");
    --job->remaining;
  }
  for (std::size_t idx : order) {
    const std::size_t task_index = ready[idx].task_id - 1;
    auto& job = state.active[task_index];
    if (!job || job->remaining != 0) continue;
    if (options.check_invariants && state.executed[task_index] != state.budget[task_index]) {
      violation(state.now, "execution accounting: task " + std::to_string(job->task_id) + " job " +
                               std::to_string(job->job_index) + " ran " +
                               std::to_string(state.executed[task_index]) + " ticks, owed " +
                               std::to_string(state.budget[task_index]));
    }
    if (completed) completed->push_back(*job);
    job.reset();
  }
  (void)ts;
  ++state.now;
  state.instant_open = false;
}

}  // namespace

bool dominates(const Configuration& a, const Configuration& b) {
  if (a.remaining.size() != b.remaining.size()) return false;
  for (std::size_t i = 0; i < a.remaining.size(); ++i) {
    if (a.remaining[i] < b.remaining[i]) return false;
  }
  return true;
}

std::vector<Tick> executed_amounts(const Configuration& c, const TaskSet& ts) {
  if (c.remaining.size() != ts.size()) throw std::invalid_argument("configuration size does not match task set");
  std::vector<Tick> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[i].wcet - c.remaining[i];
  return out;
}

std::string to_string(const Configuration& c) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < c.remaining.size(); ++i) {
    if (i) out << ',';
    out << c.remaining[i];
  }
  out << ')';
  return out.str();
}

void ScheduleTrace::append(std::span<const TaskId> row) {
  if (row.size() != m_) throw std::invalid_argument("trace row width does not match processor count");
  slots_.insert(slots_.end(), row.begin(), row.end());
}

SimState init_state(const TaskSet& ts) {
  SimState s;
  s.active.resize(ts.size());
  s.next_release_index.assign(ts.size(), 1);
  s.next_release.reserve(ts.size());
  for (const Task& t : ts) s.next_release.push_back(t.offset);
  s.budget.assign(ts.size(), 0);
  s.executed.assign(ts.size(), 0);
  return s;
}

void open_instant(SimState& state, const TaskSet& ts, const SimOptions& options) {
  open_impl(state, ts, options, nullptr);
}

void close_instant(SimState& state, const TaskSet& ts, const Platform& platform, const SimOptions& options,
                   std::span<TaskId> row) {
  close_impl(state, ts, platform, options, row, nullptr);
}

StepResult step(SimState& state, const TaskSet& ts, const Platform& platform, const SimOptions& options) {
  if (state.miss) throw std::logic_error("step on a halted simulation");
  StepResult result;
  open_impl(state, ts, options, &result.released);
  if (state.miss) {
    result.miss = state.miss;
    return result;
  }
  result.slots.resize(platform.processors());
  close_impl(state, ts, platform, options, result.slots, &result.completed);
  return result;
}

Configuration snapshot_configuration(const SimState& state) {
  Configuration c;
  c.remaining.reserve(state.active.size());
  for (const auto& job : state.active) c.remaining.push_back(job ? job->remaining : 0);
  return c;
}

SimResult simulate(const TaskSet& ts, const Platform& platform, Tick horizon, std::span<const Tick> checkpoints,
                   const SimOptions& options) {
  if (horizon < 1) throw std::invalid_argument("simulation horizon must be at least 1");
  std::vector<Tick> wanted(checkpoints.begin(), checkpoints.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  auto next_cp = wanted.begin();

  SimResult result{ScheduleTrace(platform.processors()), std::nullopt, {}, 0};
  SimState state = init_state(ts);
  std::vector<TaskId> row(platform.processors());
  while (true) {
    open_instant(state, ts, options);
    while (next_cp != wanted.end() && *next_cp < state.now) ++next_cp;
    if (next_cp != wanted.end() && *next_cp == state.now) {
      result.configurations.emplace_back(state.now, snapshot_configuration(state));
      ++next_cp;
    }
    if (state.miss || state.now == horizon) break;
    close_instant(state, ts, platform, options, row);
    if (options.record_trace) result.trace.append(row);
  }
  result.miss = state.miss;
  result.stopped_at = state.now;
  return result;
}

std::uint64_t checked_tick_count() { return g_checked_ticks.load(std::memory_order_relaxed); }

void write_trace_csv(std::ostream& out, const ScheduleTrace& trace) {
  out << "t,cpu,task\n";
  for (Tick t = 0; t < trace.ticks(); ++t) {
    for (std::size_t cpu = 0; cpu < trace.processors(); ++cpu) {
      out << t << ',' << cpu + 1 << ',';
      const TaskId id = trace.at(t, cpu);
      if (id == 0) {
        out << '-';
      } else {
        out << id;
      }
      out << '\n';
    }
  }
}

}  // namespace gedf

#pragma once

// Discrete-time global scheduling engine.
//
// Each instant t is processed in two halves:
//   open:  (1) release jobs due at t, (2) detect deadline misses;
//   close: (3) dispatch, (4) execute one tick on [t, t+1), (5) retire finished
//          jobs, then advance to t + 1.
// Configurations are sampled between the two halves.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gedf/model.hpp"
#include "gedf/scheduler.hpp"

namespace gedf {

#ifdef GEDF_CHECKED
inline constexpr bool kCheckedBuild = true;
#else
inline constexpr bool kCheckedBuild = false;
#endif

/// A broken engine or analysis invariant. Never a property of the input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct DeadlineMiss {
  TaskId task_id = 0;
  std::uint64_t job_index = 0;
  Tick abs_deadline = 0;
  Tick remaining_at_deadline = 0;

  friend bool operator==(const DeadlineMiss&, const DeadlineMiss&) = default;
};

/// Remaining execution e_{i,t} of each task's active job (0 if none).
struct Configuration {
  std::vector<Tick> remaining;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Componentwise a >= b.
bool dominates(const Configuration& a, const Configuration& b);

/// Work already executed by each task's current job, C_i - e_{i,t}. Valid
/// for instants t >= O_max, where every task has released at least once and
/// an absent job means the latest one has completed.
std::vector<Tick> executed_amounts(const Configuration& c, const TaskSet& ts);

std::string to_string(const Configuration& c);

/// sigma(t): per tick, m slots holding a task id or 0 for idle.
class ScheduleTrace {
 public:
  explicit ScheduleTrace(std::size_t processors = 1) : m_(processors) {}

  std::size_t processors() const { return m_; }
  Tick ticks() const { return slots_.size() / m_; }
  bool empty() const { return slots_.empty(); }

  /// Slot of processor `cpu` (0-based) at tick t; 0 means idle.
  TaskId at(Tick t, std::size_t cpu) const { return slots_[t * m_ + cpu]; }
  std::span<const TaskId> row(Tick t) const { return {slots_.data() + t * m_, m_}; }

  /// Appends one tick; `row` must hold exactly m entries.
  void append(std::span<const TaskId> row);
  void set(Tick t, std::size_t cpu, TaskId value) { slots_[t * m_ + cpu] = value; }

  friend bool operator==(const ScheduleTrace&, const ScheduleTrace&) = default;

 private:
  std::size_t m_;
  std::vector<TaskId> slots_;
};

/// Ticks of execution granted to a job (1 <= value <= C_i). Used to model
/// jobs finishing before their WCET.
using ExecutionModel = std::function<Tick(const Task& task, std::uint64_t job_index)>;

using Dispatcher =
    std::function<void(std::span<const Job> ready, std::size_t m, Tick now, Policy policy,
                       std::vector<std::size_t>& out)>;

struct SimOptions {
  Policy policy = Policy::edf;
  bool record_trace = true;
  /// Per-tick checking of work conservation, priority dominance, job
  /// non-parallelism and execution accounting. Throws InvariantViolation.
  bool check_invariants = kCheckedBuild;
  ExecutionModel execution;  // empty: every job runs for its full WCET
  Dispatcher dispatcher;     // empty: the scheduler's dispatch
};

struct SimState {
  Tick now = 0;
  std::vector<std::optional<Job>> active;        // indexed by task id - 1
  std::vector<std::uint64_t> next_release_index;  // next j per task
  std::vector<Tick> next_release;                 // O_i + (j - 1) T_i for that j
  std::optional<DeadlineMiss> miss;
  bool instant_open = false;  // releases and deadline checks done for `now`

  // Bookkeeping for the checking layer: units granted and units executed
  // for each task's active job.
  std::vector<Tick> budget;
  std::vector<Tick> executed;
};

SimState init_state(const TaskSet& ts);

/// Phases (1) and (2) at state.now. No-op if already open.
void open_instant(SimState& state, const TaskSet& ts, const SimOptions& options = {});

/// Phases (3)-(5) and advance. `row` receives m slots. Requires an open
/// instant and no recorded miss.
void close_instant(SimState& state, const TaskSet& ts, const Platform& platform,
                   const SimOptions& options, std::span<TaskId> row);

struct StepResult {
  std::vector<TaskId> slots;  // sigma(t) for t = the stepped instant; empty on a miss
  std::vector<Job> released;
  std::vector<Job> completed;  // remaining already 0
  std::optional<DeadlineMiss> miss;
};

/// One full instant: open, and if no miss, close. Throws std::logic_error
/// when called on a state that already holds a miss.
StepResult step(SimState& state, const TaskSet& ts, const Platform& platform,
                const SimOptions& options = {});

/// Comparable across instants only when taken on an open instant, after
/// releases and deadline checks.
Configuration snapshot_configuration(const SimState& state);

struct SimResult {
  ScheduleTrace trace;
  std::optional<DeadlineMiss> miss;
  std::vector<std::pair<Tick, Configuration>> configurations;  // by instant, ascending
  Tick stopped_at = 0;  // instant at which simulation stopped
};

/// Runs instants 0..horizon-1 in full, then opens instant `horizon` so that
/// deadlines falling exactly on it are checked. Stops at the first miss.
/// Configurations are captured at each requested checkpoint <= horizon that
/// is reached.
SimResult simulate(const TaskSet& ts, const Platform& platform, Tick horizon,
                   std::span<const Tick> checkpoints = {}, const SimOptions& options = {});

/// Number of ticks verified by the checking layer in this process.
std::uint64_t checked_tick_count();

/// CSV: header `t,cpu,task`, one row per (tick, processor), processors
/// numbered from 1, `-` for idle.
void write_trace_csv(std::ostream& out, const ScheduleTrace& trace);

}  // namespace gedf

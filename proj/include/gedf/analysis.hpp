#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gedf/model.hpp"
#include "gedf/rational.hpp"
#include "gedf/sim.hpp"

namespace gedf {

/// Configuration sampled at one checkpoint instant O_max + k P.
struct Checkpoint {
  std::uint64_t k = 0;
  Tick instant = 0;
  Configuration config;
};

struct Verdict {
  enum class Outcome { schedulable, unschedulable };

  Outcome outcome = Outcome::unschedulable;

  // Schedulable only. The schedule from steady_start on repeats with period
  // P; [0, feasibility_horizon] is a feasibility interval.
  std::optional<Tick> steady_start;
  std::optional<Tick> feasibility_horizon;
  std::optional<std::uint64_t> checkpoints_used;  // 0 on the synchronous fast path
  bool fast_path = false;

  std::optional<DeadlineMiss> miss;  // unschedulable only

  std::vector<Checkpoint> checkpoints;   // every configuration compared by the loop
  std::optional<ScheduleTrace> trace;    // when requested

  bool schedulable() const { return outcome == Outcome::schedulable; }
};

struct ExactTestOptions {
  bool synchronous_fast_path = true;
  bool record_trace = false;
  bool check_invariants = kCheckedBuild;
  Dispatcher dispatcher;  // empty: the scheduler's dispatch
};

/// Exact global-EDF schedulability test for constrained-deadline periodic
/// tasks. Synchronous systems are decided over one hyperperiod from the
/// common release. Otherwise the schedule is simulated continuously and the
/// configuration compared at O_max + kP for k = 1, 2, ... until two
/// consecutive checkpoints agree or a deadline is missed.
///
/// Outstanding work per task is componentwise non-decreasing from one
/// checkpoint to the next (executed work per current job is non-increasing),
/// so equality is reached within 1 + C_tau checkpoints. Throws
/// InvariantViolation if either property fails.
Verdict exact_test(const TaskSet& ts, const Platform& platform, const ExactTestOptions& options = {});

/// Single-line record:
/// `verdict=... steady_start=... horizon=... checkpoints=... miss_task=... miss_deadline=...`
std::string format_verdict(const Verdict& v);

/// True iff trace row t equals row t + period for every t in [from, from + span).
/// False if the trace is too short.
bool trace_is_periodic(const ScheduleTrace& trace, Tick from, Tick period, Tick span);

/// Re-simulates through steady_start + (1 + extra_periods) P and checks that
/// sigma(t) = sigma(t + P) on [steady_start, steady_start + extra_periods * P).
/// Requires a schedulable verdict.
bool verify_periodicity(const TaskSet& ts, const Platform& platform, const Verdict& verdict,
                        std::uint64_t extra_periods);

/// Simulates with per-job execution times from `actual` up to `horizon` and
/// returns true iff no deadline is missed.
bool predictability_trial(const TaskSet& ts, const Platform& platform, const ExecutionModel& actual, Tick horizon);

/// Deterministic pseudo-random execution times in [1, C_i], keyed by
/// (seed, task, job).
ExecutionModel random_reduction(std::uint64_t seed);

struct GapReport {
  std::optional<Configuration> config_at_omax_p;
  std::optional<Configuration> config_at_omax_2p;
  bool equal_at_2p = false;
  std::optional<Tick> actual_steady_start;
  std::optional<DeadlineMiss> miss;
};

/// Compares the configurations at O_max + P and O_max + 2P, the instants at
/// which the classic uniprocessor-derived interval would declare a steady
/// state, with the steady phase the exact test actually finds.
GapReport leung_gap_check(const TaskSet& ts, const Platform& platform);

struct GeneratorOptions {
  bool synchronous = false;   // all offsets 0
  bool allow_overload = false;  // permit target > m (target <= n still required)
  std::size_t max_attempts = 10'000;
};

/// Random constrained-deadline task set with utilization within 5% of
/// `target`, periods from `period_choices`, offsets uniform in
/// [0, max period choice), deadlines uniform in [C_i, T_i]. Deterministic in
/// `seed`. Throws std::invalid_argument for an infeasible request.
TaskSet generate_taskset(std::size_t n, std::size_t m, const Rational& target,
                         const std::vector<Tick>& period_choices, std::uint64_t seed,
                         const GeneratorOptions& options = {});

struct TiebreakDemo {
  TaskSet short_first;  // {(0,1,10,10), (0,1,10,10), (0,10,10,10)}
  TaskSet long_first;   // same tasks, long task with id 1
  Verdict short_first_verdict;
  Verdict long_first_verdict;
};

/// Shows that the task-id tie-break decides the outcome of an otherwise
/// identical system on m = 2 (and not on m = 3).
TiebreakDemo tiebreak_sensitivity_demo(std::size_t m = 2);

}  // namespace gedf

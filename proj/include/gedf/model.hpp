#pragma once

// Task model: periodic constrained-deadline tasks on m identical processors.
// All times are integer ticks.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gedf/rational.hpp"

namespace gedf {

using Tick = std::uint64_t;
using TaskId = std::uint32_t;  // 1-based; 0 is reserved for "idle" in traces

/// Raised when a derived time quantity does not fit the tick type.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Task-set file error anchored to a 1-based line number (0 = whole file).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TaskParams {
  Tick offset = 0;
  Tick wcet = 1;
  Tick deadline = 1;
  Tick period = 1;

  friend auto operator<=>(const TaskParams&, const TaskParams&) = default;
};

struct Task {
  TaskId id = 0;
  Tick offset = 0;    // first release
  Tick wcet = 0;      // worst-case execution time
  Tick deadline = 0;  // relative, <= period
  Tick period = 0;

  friend bool operator==(const Task&, const Task&) = default;
};

/// One release of a task.
struct Job {
  TaskId task_id = 0;
  std::uint64_t job_index = 0;  // j >= 1
  Tick release = 0;
  Tick abs_deadline = 0;
  Tick remaining = 0;

  friend bool operator==(const Job&, const Job&) = default;
};

/// Checks the per-task invariants: wcet >= 1, period >= 1, wcet <= deadline <= period.
/// Returns an empty string when valid, otherwise a description of the first violation.
std::string validate_task(const TaskParams& p);

/// Ordered, validated, immutable set of tasks with ids 1..n.
class TaskSet {
 public:
  /// Throws std::invalid_argument on an empty set, an invalid task or ids that are not 1..n.
  explicit TaskSet(std::vector<Task> tasks);

  /// Assigns ids 1..n in order.
  static TaskSet from_params(const std::vector<TaskParams>& params);

  const std::vector<Task>& tasks() const { return tasks_; }
  std::size_t size() const { return tasks_.size(); }
  const Task& operator[](std::size_t index) const { return tasks_[index]; }
  const Task& by_id(TaskId id) const { return tasks_.at(id - 1); }

  auto begin() const { return tasks_.begin(); }
  auto end() const { return tasks_.end(); }

  /// True when every task has the same first release instant.
  bool synchronous() const;

  friend bool operator==(const TaskSet&, const TaskSet&) = default;

 private:
  std::vector<Task> tasks_;
};

class Platform {
 public:
  /// Throws std::invalid_argument for m < 1.
  explicit Platform(std::size_t processors);
  std::size_t processors() const { return m_; }

  friend bool operator==(const Platform&, const Platform&) = default;

 private:
  std::size_t m_;
};

/// A task set together with the platform it runs on.
struct System {
  TaskSet tasks;
  Platform platform;

  friend bool operator==(const System&, const System&) = default;
};

/// lcm of all periods. Throws OverflowError if it exceeds 64 bits.
Tick hyperperiod(const TaskSet& ts);
Tick max_offset(const TaskSet& ts);
Tick total_wcet(const TaskSet& ts);

/// Sum of C_i / T_i, exact.
Rational utilization(const TaskSet& ts);

/// The j-th job (j >= 1) of a task with its full WCET outstanding.
/// Throws std::invalid_argument for j == 0 and OverflowError on overflow.
Job job_release(const Task& task, std::uint64_t j);

/// Overflow-checked tick arithmetic.
Tick checked_add(Tick a, Tick b);
Tick checked_mul(Tick a, Tick b);

// Task-set text format:
//   # comment to end of line, blank lines ignored
//   m <processors>          (first directive)
//   task <O> <C> <D> <T>    (one per task, ids assigned in file order)
inline constexpr std::size_t kMaxTasks = 1024;
inline constexpr Tick kMaxPeriod = 1'000'000;

System parse_taskset(std::istream& in);
System parse_taskset_string(const std::string& text);
System load_taskset_file(const std::string& path);

/// Inverse of parse_taskset.
std::string format_taskset(const System& system);

}  // namespace gedf

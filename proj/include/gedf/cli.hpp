#pragma once

// Command-line front end. Exit codes: 0 schedulable / success, 1 deadline
// miss or failed self-check, 2 usage or input error.

#include <iosfwd>
#include <optional>
#include <string>

#include "gedf/rational.hpp"
#include "gedf/scheduler.hpp"
#include "gedf/sim.hpp"

namespace gedf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMiss = 1;
inline constexpr int kExitInput = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run_analyze(const std::string& path, std::ostream& out, std::ostream& err);

struct SimulateArgs {
  std::string path;
  Policy policy = Policy::edf;
  std::optional<Tick> horizon;  // default O_max + 2P
  std::string trace_path;       // empty: CSV to `out`
};
int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct GanttArgs {
  std::string path;
  Policy policy = Policy::edf;
  std::optional<Tick> horizon;  // default O_max + 2P
  std::size_t width = 80;
};
int run_gantt(const GanttArgs& args, std::ostream& out, std::ostream& err);

struct GenerateArgs {
  std::size_t n = 4;
  std::size_t m = 2;
  Rational utilization{3, 2};
  std::string periods = "2,3,4,6,8,12";
  std::uint64_t seed = 0;
  bool synchronous = false;
  std::string output_path;  // empty: `out`
};
int run_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);

/// Built-in regression fixtures: the two-processor system whose steady phase
/// starts late (data/example1.taskset), the O_max + 2P interval check, an
/// overload and the tie-break demo. Prints PASS/FAIL per assertion. A non-empty `dispatcher`
/// replaces the scheduler's dispatch so tests can confirm a broken engine is
/// caught.
int run_examples(std::ostream& out, const Dispatcher& dispatcher = {});

}  // namespace gedf::cli

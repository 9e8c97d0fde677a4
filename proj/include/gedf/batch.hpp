#pragma once

// Many independent exact tests at once. analyze_batch_parallel spreads the
// systems over OpenMP threads; analyze_batch_serial is the reference it must
// agree with element for element.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gedf/analysis.hpp"

namespace gedf {

struct BatchItem {
  std::optional<Verdict> verdict;
  std::string error;  // set when the test threw
};

std::vector<BatchItem> analyze_batch_serial(std::span<const System> systems, const ExactTestOptions& options = {});
std::vector<BatchItem> analyze_batch_parallel(std::span<const System> systems,
                                              const ExactTestOptions& options = {});

/// True for a schedulable asynchronous system whose steady phase starts
/// after O_max + 2P.
bool has_late_steady_phase(const System& system, const Verdict& verdict);

/// Candidate `index` of the late-steady-phase stress family for `seed`:
/// small harmonic-ish periods, two processors, utilization close to 2.
System stress_candidate(std::uint64_t seed, std::uint64_t index);

struct LateSteadyFinding {
  std::uint64_t index = 0;
  System system;
  Verdict verdict;
};

struct StressSearchResult {
  std::vector<LateSteadyFinding> findings;
  std::uint64_t examined = 0;
  std::chrono::milliseconds elapsed{0};
};

/// Walks the stress family in order until `wanted` distinct systems with a
/// late steady phase are found or `budget` runs out. Systems equal up to task
/// order count once; `exclude` lists systems not to report.
StressSearchResult find_late_steady_systems(std::uint64_t seed, std::size_t wanted,
                                            std::chrono::milliseconds budget,
                                            std::span<const System> exclude = {});

/// Task parameters sorted, for comparing systems up to task order.
std::vector<TaskParams> canonical_params(const TaskSet& ts);

}  // namespace gedf

#include "gedf/batch.hpp"

#include <algorithm>
#include <exception>
#include <tuple>

namespace gedf {

namespace {

BatchItem analyze_one(const System& system, const ExactTestOptions& options) {
  BatchItem item;
  try {
    item.verdict = exact_test(system.tasks, system.platform, options);
  } catch (const std::exception& e) {
    item.error = e.what();
  }
  return item;
}

bool params_less(const TaskParams& a, const TaskParams& b) {
  return std::tie(a.offset, a.wcet, a.deadline, a.period) < std::tie(b.offset, b.wcet, b.deadline, b.period);
}

bool params_equal(const std::vector<TaskParams>& a, const std::vector<TaskParams>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const TaskParams& x, const TaskParams& y) {
    return std::tie(x.offset, x.wcet, x.deadline, x.period) == std::tie(y.offset, y.wcet, y.deadline, y.period);
  });
}

}  // namespace

std::vector<BatchItem> analyze_batch_serial(std::span<const System> systems, const ExactTestOptions& options) {
  std::vector<BatchItem> out;
  out.reserve(systems.size());
  for (const System& s : systems) out.push_back(analyze_one(s, options));
  return out;
}

std::vector<BatchItem> analyze_batch_parallel(std::span<const System> systems, const ExactTestOptions& options) {
  std::vector<BatchItem> out(systems.size());
  const auto count = static_cast<std::int64_t>(systems.size());
  // Run lengths vary by orders of magnitude between systems.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = analyze_one(systems[static_cast<std::size_t>(i)], options);
  }
  return out;
}

bool has_late_steady_phase(const System& system, const Verdict& verdict) {
  if (!verdict.schedulable() || system.tasks.synchronous()) return false;
  const Tick bound = max_offset(system.tasks) + 2 * hyperperiod(system.tasks);
  return *verdict.steady_start > bound;
}

System stress_candidate(std::uint64_t seed, std::uint64_t index) {
  static const std::vector<Tick> periods{2, 3, 4, 6, 8, 12};
  constexpr std::size_t m = 2;
  std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + index;
  const std::size_t n = 3 + static_cast<std::size_t>(s % 3);                  // 3..5 tasks
  const Rational target(170 + static_cast<std::int64_t>((s / 3) % 27), 100);  // 1.70..1.96
  GeneratorOptions options;
  options.max_attempts = 100'000;
  return System{generate_taskset(n, m, target, periods, s, options), Platform(m)};
}

std::vector<TaskParams> canonical_params(const TaskSet& ts) {
  std::vector<TaskParams> out;
  for (const Task& t : ts) out.push_back({t.offset, t.wcet, t.deadline, t.period});
  std::sort(out.begin(), out.end(), params_less);
  return out;
}

StressSearchResult find_late_steady_systems(std::uint64_t seed, std::size_t wanted,
                                            std::chrono::milliseconds budget, std::span<const System> exclude) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  constexpr std::size_t kChunk = 64;

  std::vector<std::vector<TaskParams>> seen;
  for (const System& s : exclude) seen.push_back(canonical_params(s.tasks));
  auto seen_before = [&](const std::vector<TaskParams>& c) {
    return std::any_of(seen.begin(), seen.end(), [&](const auto& x) { return params_equal(x, c); });
  };

  StressSearchResult result;
  std::uint64_t next_index = 0;
  while (result.findings.size() < wanted && Clock::now() - start < budget) {
    std::vector<System> chunk;
    chunk.reserve(kChunk);
    for (std::size_t i = 0; i < kChunk; ++i) chunk.push_back(stress_candidate(seed, next_index + i));
    const auto verdicts = analyze_batch_parallel(chunk);
    for (std::size_t i = 0; i < chunk.size() && result.findings.size() < wanted; ++i) {
      const auto& item = verdicts[i];
      if (!item.error.empty()) {
        throw InvariantViolation("stress candidate " + std::to_string(next_index + i) + ": " + item.error);
      }
      if (!item.verdict || !has_late_steady_phase(chunk[i], *item.verdict)) continue;
      auto canon = canonical_params(chunk[i].tasks);
      if (seen_before(canon)) continue;
      seen.push_back(std::move(canon));
      result.findings.push_back({next_index + i, chunk[i], *item.verdict});
    }
    next_index += kChunk;
    result.examined = next_index;
  }
  result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  return result;
}

}  // namespace gedf

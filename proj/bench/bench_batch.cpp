// Serial vs OpenMP batch of exact tests on generated asynchronous systems.

#include <chrono>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "gedf/batch.hpp"

using namespace gedf;

namespace {

double seconds_of(const auto& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch exact-test benchmark"};
  std::size_t count = 2000;
  int repeats = 3;
  std::uint64_t seed = 1;
  app.add_option("--count", count, "Systems per batch");
  app.add_option("--repeats", repeats, "Timed repetitions (best is reported)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Stress-family seed");
  CLI11_PARSE(app, argc, argv);

  std::vector<System> systems;
  systems.reserve(count);
  for (std::size_t i = 0; i < count; ++i) systems.push_back(stress_candidate(seed, i));

  std::vector<BatchItem> serial, parallel;
  double best_serial = 1e300, best_parallel = 1e300;
  for (int r = 0; r < repeats; ++r) {
    best_serial = std::min(best_serial, seconds_of([&] { serial = analyze_batch_serial(systems); }));
    best_parallel = std::min(best_parallel, seconds_of([&] { parallel = analyze_batch_parallel(systems); }));
  }

  std::size_t schedulable = 0, mismatches = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const bool same = serial[i].error == parallel[i].error &&
                      serial[i].verdict.has_value() == parallel[i].verdict.has_value() &&
                      (!serial[i].verdict || format_verdict(*serial[i].verdict) == format_verdict(*parallel[i].verdict));
    if (!same) ++mismatches;
    if (serial[i].verdict && serial[i].verdict->schedulable()) ++schedulable;
  }

  std::cout << std::fixed << std::setprecision(4) << "systems=" << count << " schedulable=" << schedulable
            << " threads=" << omp_get_max_threads() << '\n'
            << "serial   " << best_serial << " s\n"
            << "parallel " << best_parallel << " s\n"
            << "speedup  " << std::setprecision(2) << best_serial / best_parallel << "x\n"
            << "mismatches " << mismatches << '\n';
  return mismatches == 0 ? 0 : 1;
}

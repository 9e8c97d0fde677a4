#include <doctest.h>

#include <algorithm>
#include <random>

#include "gedf/analysis.hpp"
#include "oracle.hpp"

using namespace gedf;

namespace {

TaskSet example1() { return TaskSet::from_params({{0, 2, 3, 3}, {4, 3, 4, 4}, {1, 3, 6, 6}}); }

std::vector<oracle::TaskSpec> specs_of(const TaskSet& ts) {
  std::vector<oracle::TaskSpec> out;
  for (const Task& t : ts) out.push_back({t.offset, t.wcet, t.deadline, t.period});
  return out;
}

const std::vector<Tick> kPeriods{2, 3, 4, 5, 6, 8, 10, 12};

// Executed work must not grow between checkpoints; loop stays under 1 + C_tau.
void check_checkpoint_trail(const TaskSet& ts, const Verdict& v) {
  for (std::size_t k = 1; k < v.checkpoints.size(); ++k) {
    const auto before = executed_amounts(v.checkpoints[k - 1].config, ts);
    const auto after = executed_amounts(v.checkpoints[k].config, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(before[i] >= after[i]);
  }
  if (v.checkpoints_used) CHECK(*v.checkpoints_used <= 1 + total_wcet(ts));
}

}  // namespace

TEST_CASE("exact test on the two-processor counterexample") {
  const TaskSet ts = example1();
  const Verdict v = exact_test(ts, Platform(2));
  REQUIRE(v.schedulable());
  CHECK(v.steady_start == Tick{28});
  CHECK(v.feasibility_horizon == Tick{40});
  CHECK(v.checkpoints_used == std::uint64_t{3});
  CHECK_FALSE(v.fast_path);
  REQUIRE(v.checkpoints.size() == 3);
  CHECK(v.checkpoints[0].instant == 16);
  CHECK(v.checkpoints[0].config == Configuration{{1, 3, 1}});
  CHECK(v.checkpoints[1].config == Configuration{{1, 3, 2}});
  CHECK(v.checkpoints[2].config == Configuration{{1, 3, 2}});
  CHECK(format_verdict(v) ==
        "verdict=schedulable steady_start=28 horizon=40 checkpoints=3 miss_task=- miss_deadline=-");
  check_checkpoint_trail(ts, v);
}

TEST_CASE("exact test detects the overload") {
  const TaskSet ts = TaskSet::from_params({{0, 3, 3, 3}, {0, 3, 3, 3}, {0, 3, 3, 3}});
  for (bool fast : {true, false}) {
    ExactTestOptions o;
    o.synchronous_fast_path = fast;
    const Verdict v = exact_test(ts, Platform(2), o);
    CHECK_FALSE(v.schedulable());
    REQUIRE(v.miss);
    CHECK(v.miss->abs_deadline == 3);
    CHECK(format_verdict(v) ==
          "verdict=unschedulable steady_start=- horizon=- checkpoints=- miss_task=3 miss_deadline=3");
  }
}

TEST_CASE("synchronous fast path") {
  const TaskSet ts = TaskSet::from_params({{0, 1, 2, 2}, {0, 1, 2, 2}});
  const Verdict v = exact_test(ts, Platform(2));
  REQUIRE(v.schedulable());
  CHECK(v.fast_path);
  CHECK(v.steady_start == Tick{0});
  CHECK(v.feasibility_horizon == Tick{2});
  CHECK(v.checkpoints_used == std::uint64_t{0});

  // Common offset other than zero.
  const TaskSet shifted = TaskSet::from_params({{5, 1, 2, 2}, {5, 2, 3, 4}});
  const Verdict w = exact_test(shifted, Platform(1));
  REQUIRE(w.schedulable());
  CHECK(w.steady_start == Tick{5});
  CHECK(w.feasibility_horizon == Tick{9});
}

TEST_CASE("fast path and checkpoint loop agree on synchronous systems") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t m = 2 + seed % 2;
    GeneratorOptions g;
    g.synchronous = true;
    g.allow_overload = true;
    const TaskSet ts = generate_taskset(m + 2, m, Rational(static_cast<std::int64_t>(m) * (50 + seed % 60), 100),
                                        kPeriods, seed, g);
    ExactTestOptions fast;
    fast.record_trace = true;
    ExactTestOptions loop = fast;
    loop.synchronous_fast_path = false;
    const Verdict a = exact_test(ts, Platform(m), fast);
    const Verdict b = exact_test(ts, Platform(m), loop);
    CHECK(a.schedulable() == b.schedulable());
    CHECK(a.miss == b.miss);
    if (a.schedulable()) {
      const Tick period = hyperperiod(ts);
      CHECK(*b.steady_start == *a.steady_start + period);
      CHECK(b.checkpoints_used == std::uint64_t{2});
      for (Tick t = 0; t < period; ++t) {
        CHECK(std::ranges::equal(a.trace->row(t), b.trace->row(t)));
        CHECK(std::ranges::equal(b.trace->row(t), b.trace->row(t + period)));
      }
    }
  }
}

TEST_CASE("exact verdicts agree with the brute-force oracle") {
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const std::size_t m = 1 + seed % 3;
    const TaskSet ts = generate_taskset(m + 1 + seed % 3, m, Rational(static_cast<std::int64_t>(m) * (55 + seed % 45), 100),
                                        kPeriods, seed);
    const Verdict v = exact_test(ts, Platform(m));
    check_checkpoint_trail(ts, v);
    const Tick period = hyperperiod(ts);
    if (v.schedulable()) {
      const Tick s = *v.steady_start;
      const auto ref = oracle::simulate(specs_of(ts), m, s + 2 * period, {s, s + period, s + 2 * period});
      CHECK_FALSE(ref.miss);
      CHECK(ref.outstanding.at(s) == ref.outstanding.at(s + period));
      CHECK(ref.outstanding.at(s + period) == ref.outstanding.at(s + 2 * period));
    } else {
      REQUIRE(v.miss);
      const auto ref = oracle::simulate(specs_of(ts), m, v.miss->abs_deadline);
      REQUIRE(ref.miss);
      CHECK(ref.miss->deadline == v.miss->abs_deadline);
      CHECK(ref.miss->task == v.miss->task_id);
    }
  }
}

TEST_CASE("schedulable verdicts repeat with period P from the steady start") {
  const TaskSet ts = example1();
  const Verdict v = exact_test(ts, Platform(2));
  CHECK(verify_periodicity(ts, Platform(2), v, 2));

  const TaskSet sync = TaskSet::from_params({{0, 1, 3, 3}, {0, 2, 4, 4}, {0, 3, 6, 6}});
  const Verdict w = exact_test(sync, Platform(2));
  REQUIRE(w.schedulable());
  CHECK(verify_periodicity(sync, Platform(2), w, 1));

  ExactTestOptions o;
  o.record_trace = true;
  o.synchronous_fast_path = false;
  const Verdict u = exact_test(sync, Platform(2), o);
  ScheduleTrace tampered = *u.trace;
  const Tick period = hyperperiod(sync);
  CHECK(trace_is_periodic(tampered, 0, period, period));
  tampered.set(period + 1, 1, tampered.at(period + 1, 1) == 0 ? 1 : 0);
  CHECK_FALSE(trace_is_periodic(tampered, 0, period, period));
  CHECK_FALSE(trace_is_periodic(tampered, 0, period, 10 * period));  // too short

  CHECK_THROWS_AS(verify_periodicity(ts, Platform(1), exact_test(ts, Platform(1)), 1), std::invalid_argument);
}

TEST_CASE("shorter jobs never cause a miss in a schedulable system") {
  const TaskSet ts = example1();
  const Platform p(2);
  const Verdict v = exact_test(ts, p);
  const Tick horizon = *v.feasibility_horizon + hyperperiod(ts);
  CHECK(predictability_trial(ts, p, [](const Task& t, std::uint64_t) { return t.wcet; }, horizon));
  CHECK(predictability_trial(ts, p, [](const Task& t, std::uint64_t) { return t.id == 2 ? Tick{2} : t.wcet; },
                             horizon));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(predictability_trial(ts, p, random_reduction(seed), horizon));
  }
}

TEST_CASE("random reductions stay within [1, C_i] and are reproducible") {
  const Task t{1, 0, 5, 9, 9};
  const auto a = random_reduction(4);
  const auto b = random_reduction(4);
  bool saw_short = false;
  for (std::uint64_t j = 1; j < 200; ++j) {
    const Tick x = a(t, j);
    CHECK(x >= 1);
    CHECK(x <= 5);
    CHECK(x == b(t, j));
    saw_short |= x < 5;
  }
  CHECK(saw_short);
}

TEST_CASE("O_max + 2P gap report") {
  const GapReport r = leung_gap_check(example1(), Platform(2));
  CHECK_FALSE(r.equal_at_2p);
  CHECK(r.config_at_omax_p == Configuration{{1, 3, 1}});
  CHECK(r.config_at_omax_2p == Configuration{{1, 3, 2}});
  CHECK(r.actual_steady_start == Tick{28});
  CHECK_FALSE(r.miss);

  const GapReport s = leung_gap_check(TaskSet::from_params({{0, 1, 3, 3}, {0, 2, 4, 4}}), Platform(2));
  CHECK(s.equal_at_2p);
  CHECK(s.actual_steady_start == Tick{0});

  const GapReport u = leung_gap_check(TaskSet::from_params({{0, 3, 3, 3}, {0, 3, 3, 3}, {0, 3, 3, 3}}), Platform(2));
  REQUIRE(u.miss);
  CHECK(u.miss->abs_deadline == 3);
  CHECK_FALSE(u.actual_steady_start);
}

TEST_CASE("generator") {
  SUBCASE("deterministic in the seed") {
    CHECK(generate_taskset(5, 2, Rational(3, 2), kPeriods, 42) == generate_taskset(5, 2, Rational(3, 2), kPeriods, 42));
  }
  SUBCASE("single task forced to C/T = 2/4") {
    const TaskSet ts = generate_taskset(1, 1, Rational(1, 2), {4}, 0);
    CHECK(ts[0].wcet == 2);
    CHECK(ts[0].period == 4);
  }
  SUBCASE("utilization within 5% and task invariants") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const TaskSet ts = generate_taskset(8, 2, Rational(3, 2), kPeriods, seed);
      const Rational u = utilization(ts);
      CHECK(u >= Rational(1425, 1000));
      CHECK(u <= Rational(1575, 1000));
      for (const Task& t : ts) {
        CHECK(t.offset < 12);
        CHECK(t.wcet <= t.deadline);
        CHECK(t.deadline <= t.period);
        CHECK(std::find(kPeriods.begin(), kPeriods.end(), t.period) != kPeriods.end());
      }
    }
  }
  SUBCASE("synchronous option") {
    GeneratorOptions g;
    g.synchronous = true;
    CHECK(generate_taskset(4, 2, Rational(1), kPeriods, 1, g).synchronous());
  }
  SUBCASE("infeasible requests") {
    CHECK_THROWS_AS(generate_taskset(4, 2, Rational(5, 2), kPeriods, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_taskset(2, 4, Rational(3), kPeriods, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_taskset(0, 1, Rational(1, 2), kPeriods, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_taskset(2, 1, Rational(0), kPeriods, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_taskset(2, 1, Rational(1, 2), {}, 0), std::invalid_argument);
    GeneratorOptions g;
    g.allow_overload = true;
    CHECK(utilization(generate_taskset(4, 2, Rational(11, 5), kPeriods, 0, g)) > Rational(2));
  }
}

TEST_CASE("tie-break sensitivity") {
  const TiebreakDemo two = tiebreak_sensitivity_demo(2);
  CHECK_FALSE(two.short_first_verdict.schedulable());
  REQUIRE(two.short_first_verdict.miss);
  CHECK(two.short_first_verdict.miss->task_id == 3);
  CHECK(two.short_first_verdict.miss->abs_deadline == 10);
  CHECK(two.long_first_verdict.schedulable());
  CHECK(two.long_first.by_id(1).wcet == 10);

  const TiebreakDemo three = tiebreak_sensitivity_demo(3);
  CHECK(three.short_first_verdict.schedulable());
  CHECK(three.long_first_verdict.schedulable());
}

TEST_CASE("checkpoint trail is monotone and bounded on random asynchronous systems") {
  std::size_t schedulable = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const std::size_t m = 2 + seed % 3;
    const TaskSet ts =
        generate_taskset(m + 1 + seed % 4, m, Rational(static_cast<std::int64_t>(m) * (60 + seed % 39), 100), kPeriods, seed);
    const Verdict v = exact_test(ts, Platform(m));
    check_checkpoint_trail(ts, v);
    if (v.schedulable()) {
      ++schedulable;
      CHECK(*v.steady_start >= max_offset(ts) + hyperperiod(ts));
      CHECK((*v.steady_start - max_offset(ts)) % hyperperiod(ts) == 0);
      CHECK_FALSE(simulate(ts, Platform(m), *v.feasibility_horizon).miss);
      CHECK(verify_periodicity(ts, Platform(m), v, 2));
    }
  }
  CHECK(schedulable > 50);
}

TEST_CASE("exact test refuses to run with a broken engine") {
  ExactTestOptions o;
  o.check_invariants = true;
  o.dispatcher = [](std::span<const Job> ready, std::size_t m, Tick now, Policy policy, std::vector<std::size_t>& out) {
    out = dispatch(ready, m, now, policy);
    if (!out.empty() && now % 7 == 3) out.pop_back();
  };
  CHECK_THROWS_AS(exact_test(example1(), Platform(2), o), InvariantViolation);
}

#include "gedf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace gedf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Drives the engine instant by instant, optionally recording the trace.
class Runner {
 public:
  Runner(const TaskSet& ts, const Platform& platform, const SimOptions& options)
      : ts_(ts), platform_(platform), options_(options), state_(init_state(ts)),
        trace_(platform.processors()), row_(platform.processors()) {}

  /// Advances until instant `target` is open. Returns false on a miss.
  bool run_until(Tick target) {
    while (true) {
      open_instant(state_, ts_, options_);
      if (state_.miss) return false;
      if (state_.now == target) return true;
      close_instant(state_, ts_, platform_, options_, row_);
      if (options_.record_trace) trace_.append(row_);
    }
  }

  const SimState& state() const { return state_; }
  ScheduleTrace take_trace() { return std::move(trace_); }

 private:
  const TaskSet& ts_;
  const Platform& platform_;
  SimOptions options_;
  SimState state_;
  ScheduleTrace trace_;
  std::vector<TaskId> row_;
};

}  // namespace

Verdict exact_test(const TaskSet& ts, const Platform& platform, const ExactTestOptions& options) {
  const Tick period = hyperperiod(ts);
  const Tick omax = max_offset(ts);
  const Tick ctau = total_wcet(ts);

  SimOptions sim;
  sim.policy = Policy::edf;
  sim.record_trace = options.record_trace;
  sim.check_invariants = options.check_invariants;
  sim.dispatcher = options.dispatcher;
  Runner runner(ts, platform, sim);

  Verdict v;
  auto unschedulable = [&] {
    v.outcome = Verdict::Outcome::unschedulable;
    v.miss = runner.state().miss;
  };

  if (options.synchronous_fast_path && ts.synchronous()) {
    const Tick end = checked_add(omax, period);
    if (!runner.run_until(end)) {
      unschedulable();
    } else {
      // Every job released before `end` has its deadline at or before `end`,
      // so only the jobs released at `end` itself may be pending.
      for (const auto& job : runner.state().active) {
        if (job && job->release != end) {
          throw InvariantViolation("synchronous fast path: job of task " + std::to_string(job->task_id) +
                                   " still pending at the end of the hyperperiod");
        }
      }
      v.outcome = Verdict::Outcome::schedulable;
      v.steady_start = omax;
      v.feasibility_horizon = end;
      v.checkpoints_used = 0;
      v.fast_path = true;
    }
  } else {
    for (std::uint64_t k = 1;; ++k) {
      if (k > 1 + ctau) {
        throw InvariantViolation("no steady phase within 1 + C_tau = " + std::to_string(1 + ctau) +
                                 " checkpoints");
      }
      const Tick instant = checked_add(omax, checked_mul(k, period));
      if (!runner.run_until(instant)) {
        unschedulable();
        break;
      }
      v.checkpoints.push_back({k, instant, snapshot_configuration(runner.state())});
      if (k == 1) continue;
      const Checkpoint& prev = v.checkpoints[v.checkpoints.size() - 2];
      const Checkpoint& cur = v.checkpoints.back();
      // Executed work of each current job never grows from one checkpoint to
      // the next; equivalently the outstanding work never shrinks.
      if (!dominates(cur.config, prev.config)) {
        throw InvariantViolation("outstanding work shrank between t=" + std::to_string(prev.instant) + " " +
                                 to_string(prev.config) + " and t=" + std::to_string(cur.instant) + " " +
                                 to_string(cur.config));
      }
      if (prev.config == cur.config) {
        v.outcome = Verdict::Outcome::schedulable;
        v.steady_start = prev.instant;
        v.feasibility_horizon = cur.instant;
        v.checkpoints_used = k;
        break;
      }
    }
  }
  if (options.record_trace) v.trace = runner.take_trace();
  return v;
}

std::string format_verdict(const Verdict& v) {
  auto field = [](const auto& opt) { return opt ? std::to_string(*opt) : std::string("-"); };
  std::ostringstream out;
  out << "verdict=" << (v.schedulable() ? "schedulable" : "unschedulable")
      << " steady_start=" << field(v.steady_start) << " horizon=" << field(v.feasibility_horizon)
      << " checkpoints=" << field(v.checkpoints_used)
      << " miss_task=" << (v.miss ? std::to_string(v.miss->task_id) : "-")
      << " miss_deadline=" << (v.miss ? std::to_string(v.miss->abs_deadline) : "-");
  return out.str();
}

bool trace_is_periodic(const ScheduleTrace& trace, Tick from, Tick period, Tick span) {
  if (from + span + period > trace.ticks()) return false;
  for (Tick t = from; t < from + span; ++t) {
    const auto a = trace.row(t);
    const auto b = trace.row(t + period);
    if (!std::equal(a.begin(), a.end(), b.begin())) return false;
  }
  return true;
}

bool verify_periodicity(const TaskSet& ts, const Platform& platform, const Verdict& verdict,
                        std::uint64_t extra_periods) {
  if (!verdict.schedulable()) throw std::invalid_argument("periodicity check needs a schedulable verdict");
  const Tick period = hyperperiod(ts);
  const Tick start = *verdict.steady_start;
  const Tick span = checked_mul(extra_periods, period);
  const Tick horizon = checked_add(start, checked_add(span, period));
  const SimResult run = simulate(ts, platform, horizon);
  if (run.miss) return false;
  return trace_is_periodic(run.trace, start, period, span);
}

bool predictability_trial(const TaskSet& ts, const Platform& platform, const ExecutionModel& actual, Tick horizon) {
  SimOptions options;
  options.record_trace = false;
  options.execution = actual;
  return !simulate(ts, platform, horizon, {}, options).miss;
}

ExecutionModel random_reduction(std::uint64_t seed) {
  return [seed](const Task& task, std::uint64_t job_index) -> Tick {
    const std::uint64_t h = splitmix64(splitmix64(seed ^ (std::uint64_t{task.id} << 40)) ^ job_index);
    return 1 + h % task.wcet;
  };
}

GapReport leung_gap_check(const TaskSet& ts, const Platform& platform) {
  ExactTestOptions loop_only;
  loop_only.synchronous_fast_path = false;
  const Verdict loop = exact_test(ts, platform, loop_only);

  GapReport report;
  report.miss = loop.miss;
  for (const Checkpoint& cp : loop.checkpoints) {
    if (cp.k == 1) report.config_at_omax_p = cp.config;
    if (cp.k == 2) report.config_at_omax_2p = cp.config;
  }
  report.equal_at_2p = report.config_at_omax_p && report.config_at_omax_2p &&
                       *report.config_at_omax_p == *report.config_at_omax_2p;
  if (loop.schedulable()) {
    report.actual_steady_start = ts.synchronous() ? exact_test(ts, platform).steady_start : loop.steady_start;
  }
  return report;
}

TaskSet generate_taskset(std::size_t n, std::size_t m, const Rational& target,
                         const std::vector<Tick>& period_choices, std::uint64_t seed,
                         const GeneratorOptions& options) {
  if (n < 1) throw std::invalid_argument("generator needs n >= 1");
  if (m < 1) throw std::invalid_argument("generator needs m >= 1");
  if (target <= Rational(0)) throw std::invalid_argument("target utilization must be positive");
  if (!options.allow_overload && target > Rational(static_cast<std::int64_t>(m))) {
    throw std::invalid_argument("target utilization " + target.str() + " exceeds processor count " +
                                std::to_string(m));
  }
  if (target > Rational(static_cast<std::int64_t>(n))) {
    throw std::invalid_argument("target utilization " + target.str() + " exceeds task count");
  }
  if (period_choices.empty()) throw std::invalid_argument("no period choices");
  for (Tick p : period_choices) {
    if (p < 1 || p > kMaxPeriod) throw std::invalid_argument("period choice out of range");
  }
  const Tick max_choice = *std::max_element(period_choices.begin(), period_choices.end());
  const Rational tolerance = target / Rational(20);

  std::mt19937_64 rng(seed);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
  boost::random::uniform_int_distribution<std::size_t> pick(0, period_choices.size() - 1);
  const double total = target.to_double();

  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    // UUniFast with discard of any share above 1.
    std::vector<double> shares(n);
    double remaining = total;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double next = remaining * std::pow(unit(rng), 1.0 / static_cast<double>(n - i - 1));
      shares[i] = remaining - next;
      remaining = next;
    }
    shares[n - 1] = remaining;
    if (std::any_of(shares.begin(), shares.end(), [](double u) { return u > 1.0; })) continue;

    std::vector<TaskParams> params(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& p = params[i];
      p.period = period_choices[pick(rng)];
      const auto wcet = static_cast<Tick>(std::llround(shares[i] * static_cast<double>(p.period)));
      p.wcet = std::clamp<Tick>(wcet, 1, p.period);
      p.deadline = boost::random::uniform_int_distribution<Tick>(p.wcet, p.period)(rng);
      p.offset = options.synchronous ? 0 : boost::random::uniform_int_distribution<Tick>(0, max_choice - 1)(rng);
    }
    TaskSet ts = TaskSet::from_params(params);
    const Rational u = utilization(ts);
    const Rational gap = u > target ? u - target : target - u;
    if (gap <= tolerance) return ts;
  }
  throw std::invalid_argument("could not reach utilization " + target.str() + " within " +
                              std::to_string(options.max_attempts) + " attempts");
}

TiebreakDemo tiebreak_sensitivity_demo(std::size_t m) {
  const TaskParams unit{0, 1, 10, 10};
  const TaskParams longest{0, 10, 10, 10};
  const Platform platform(m);
  TaskSet short_first = TaskSet::from_params({unit, unit, longest});
  TaskSet long_first = TaskSet::from_params({longest, unit, unit});
  Verdict a = exact_test(short_first, platform);
  Verdict b = exact_test(long_first, platform);
  return {std::move(short_first), std::move(long_first), std::move(a), std::move(b)};
}

}  // namespace gedf

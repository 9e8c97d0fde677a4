#include "gedf/cli.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gedf/analysis.hpp"
#include "gedf/model.hpp"
#include "gedf/report.hpp"

namespace gedf::cli {

namespace {

System example1() {
  return System{TaskSet::from_params({{0, 2, 3, 3}, {4, 3, 4, 4}, {1, 3, 6, 6}}), Platform(2)};
}

Tick default_horizon(const TaskSet& ts) {
  return checked_add(max_offset(ts), checked_mul(2, hyperperiod(ts)));
}

void describe_miss(std::ostream& out, const DeadlineMiss& miss) {
  out << "# miss: task " << miss.task_id << " job " << miss.job_index << " deadline " << miss.abs_deadline
      << " remaining " << miss.remaining_at_deadline << '\n';
}

std::vector<Tick> parse_periods(const std::string& text) {
  std::vector<Tick> out;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(field, &used);
    if (used != field.size()) throw std::invalid_argument("bad period '" + field + "'");
    out.push_back(v);
  }
  return out;
}

SimResult run_policy(const System& system, Policy policy, std::optional<Tick> horizon) {
  SimOptions options;
  options.policy = policy;
  const Tick h = horizon ? *horizon : default_horizon(system.tasks);
  if (h < 1) throw std::invalid_argument("horizon must be at least 1");
  return simulate(system.tasks, system.platform, h, {}, options);
}

}  // namespace

int run_analyze(const std::string& path, std::ostream& out, std::ostream& err) {
  const System system = load_taskset_file(path);
  const TaskSet& ts = system.tasks;
  const Verdict v = exact_test(ts, system.platform);
  out << format_verdict(v) << '\n';
  out << "# tasks=" << ts.size() << " m=" << system.platform.processors() << " P=" << hyperperiod(ts)
      << " O_max=" << max_offset(ts) << " C_tau=" << total_wcet(ts) << " U=" << utilization(ts) << '\n';
  if (v.fast_path) out << "# synchronous: decided over [" << *v.steady_start << ", " << *v.feasibility_horizon << "]\n";
  for (const Checkpoint& cp : v.checkpoints) {
    out << "# checkpoint k=" << cp.k << " t=" << cp.instant << " config=" << to_string(cp.config) << '\n';
  }
  if (v.miss) describe_miss(out, *v.miss);
  (void)err;
  return v.schedulable() ? kExitOk : kExitMiss;
}

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  const System system = load_taskset_file(args.path);
  const SimResult result = run_policy(system, args.policy, args.horizon);
  if (args.trace_path.empty()) {
    write_trace_csv(out, result.trace);
  } else {
    std::ofstream file(args.trace_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << args.trace_path << "'\n";
      return kExitInput;
    }
    write_trace_csv(file, result.trace);
    if (!file.flush()) {
      err << "error: failed writing '" << args.trace_path << "'\n";
      return kExitInput;
    }
    out << "# policy=" << to_string(args.policy) << " ticks=" << result.trace.ticks() << '\n';
  }
  if (result.miss) {
    describe_miss(args.trace_path.empty() ? err : out, *result.miss);
    return kExitMiss;
  }
  return kExitOk;
}

int run_gantt(const GanttArgs& args, std::ostream& out, std::ostream& err) {
  const System system = load_taskset_file(args.path);
  const SimResult result = run_policy(system, args.policy, args.horizon);
  if (result.trace.empty()) {
    err << "error: nothing to chart (miss at t=0)\n";
  } else {
    out << render_gantt(result.trace, args.width);
  }
  if (result.miss) {
    describe_miss(out, *result.miss);
    return kExitMiss;
  }
  return kExitOk;
}

int run_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  GeneratorOptions options;
  options.synchronous = args.synchronous;
  const TaskSet ts = generate_taskset(args.n, args.m, args.utilization, parse_periods(args.periods), args.seed, options);
  std::ostringstream text;
  text << "# generated n=" << args.n << " target=" << args.utilization << " seed=" << args.seed
       << " U=" << utilization(ts) << '\n';
  text << format_taskset(System{ts, Platform(args.m)});
  if (args.output_path.empty()) {
    out << text.str();
    return kExitOk;
  }
  std::ofstream file(args.output_path, std::ios::binary);
  if (!(file << text.str()) || !file.flush()) {
    err << "error: cannot write '" << args.output_path << "'\n";
    return kExitInput;
  }
  return kExitOk;
}

int run_examples(std::ostream& out, const Dispatcher& dispatcher) {
  int failures = 0;
  auto check = [&](const std::string& name, const std::function<bool()>& body) {
    bool ok = false;
    std::string detail;
    try {
      ok = body();
    } catch (const std::exception& e) {
      detail = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "PASS " : "FAIL ") << name << detail << '\n';
    if (!ok) ++failures;
  };

  const System ex1 = example1();
  SimOptions sim;
  sim.dispatcher = dispatcher;
  ExactTestOptions exact;
  exact.dispatcher = dispatcher;

  const std::vector<Tick> instants{16, 28, 40};
  std::optional<SimResult> run;
  auto config_at = [&](Tick t) -> const Configuration& {
    for (const auto& [instant, config] : run->configurations) {
      if (instant == t) return config;
    }
    throw std::runtime_error("no configuration at t=" + std::to_string(t));
  };

  check("example1: P = 12 and O_max = 4",
        [&] { return hyperperiod(ex1.tasks) == 12 && max_offset(ex1.tasks) == 4; });
  check("example1: no deadline miss through t = 40", [&] {
    run = simulate(ex1.tasks, ex1.platform, 40, instants, sim);
    return !run->miss && run->stopped_at == 40;
  });
  check("example1: config(16) != config(28)", [&] { return run && config_at(16) != config_at(28); });
  check("example1: config(28) == config(40)", [&] { return run && config_at(28) == config_at(40); });
  check("example1: exact test schedulable, steady_start = 28, 3 checkpoints", [&] {
    const Verdict v = exact_test(ex1.tasks, ex1.platform, exact);
    return v.schedulable() && v.steady_start == Tick{28} && v.checkpoints_used == std::uint64_t{3};
  });
  check("example1: [0, O_max + 2P] is not a feasibility interval", [&] {
    const Verdict v = exact_test(ex1.tasks, ex1.platform, exact);
    return v.checkpoints.size() >= 2 && v.checkpoints[0].config != v.checkpoints[1].config &&
           !leung_gap_check(ex1.tasks, ex1.platform).equal_at_2p;
  });
  check("overload (0,3,3,3)x3 on m = 2: miss at deadline 3", [&] {
    const TaskSet ts = TaskSet::from_params({{0, 3, 3, 3}, {0, 3, 3, 3}, {0, 3, 3, 3}});
    const Verdict v = exact_test(ts, Platform(2), exact);
    return !v.schedulable() && v.miss && v.miss->abs_deadline == 3;
  });
  check("tie-break demo m = 2: short tasks first misses, long task first meets all deadlines", [&] {
    const TiebreakDemo demo = tiebreak_sensitivity_demo(2);
    return !demo.short_first_verdict.schedulable() && demo.long_first_verdict.schedulable();
  });
  check("tie-break demo m = 3: schedulable under either order", [&] {
    const TiebreakDemo demo = tiebreak_sensitivity_demo(3);
    return demo.short_first_verdict.schedulable() && demo.long_first_verdict.schedulable();
  });

  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << '\n';
  return failures == 0 ? kExitOk : kExitMiss;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global EDF simulator and exact schedulability test for periodic task systems"};
  app.require_subcommand(1);

  std::string analyze_path;
  auto* analyze = app.add_subcommand("analyze", "Exact global-EDF schedulability test");
  analyze->add_option("file", analyze_path, "Task-set file")->required();

  SimulateArgs sim_args;
  std::string sim_policy = "edf";
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate and export the schedule as CSV");
  simulate_cmd->add_option("file", sim_args.path, "Task-set file")->required();
  simulate_cmd->add_option("--policy", sim_policy, "edf or llf")->check(CLI::IsMember({"edf", "llf"}));
  simulate_cmd->add_option("--horizon", sim_args.horizon, "Ticks to simulate (default O_max + 2P)");
  simulate_cmd->add_option("--trace,-o", sim_args.trace_path, "CSV output path (default stdout)");

  GanttArgs gantt_args;
  std::string gantt_policy = "edf";
  auto* gantt = app.add_subcommand("gantt", "Print an ASCII Gantt chart of the schedule");
  gantt->add_option("file", gantt_args.path, "Task-set file")->required();
  gantt->add_option("--policy", gantt_policy, "edf or llf")->check(CLI::IsMember({"edf", "llf"}));
  gantt->add_option("--horizon", gantt_args.horizon, "Ticks to simulate (default O_max + 2P)");
  gantt->add_option("--width", gantt_args.width, "Wrap width in characters")->check(CLI::Range(20, 100000));

  auto* examples = app.add_subcommand("examples", "Run the built-in regression fixtures");

  GenerateArgs gen_args;
  std::string utilization_text = "3/2";
  auto* generate = app.add_subcommand("generate", "Generate a random task-set file");
  generate->add_option("--n", gen_args.n, "Number of tasks")->check(CLI::Range(1, 1024));
  generate->add_option("--m", gen_args.m, "Number of processors")->check(CLI::Range(1, 1024));
  generate->add_option("--utilization,-u", utilization_text, "Target utilization, e.g. 3/2 or 1.5");
  generate->add_option("--periods", gen_args.periods, "Comma-separated period choices");
  generate->add_option("--seed", gen_args.seed, "Random seed");
  generate->add_flag("--synchronous", gen_args.synchronous, "All offsets zero");
  generate->add_option("--output,-o", gen_args.output_path, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*analyze) return run_analyze(analyze_path, out, err);
    if (*simulate_cmd) {
      sim_args.policy = parse_policy(sim_policy);
      return run_simulate(sim_args, out, err);
    }
    if (*gantt) {
      gantt_args.policy = parse_policy(gantt_policy);
      return run_gantt(gantt_args, out, err);
    }
    if (*examples) return run_examples(out);
    if (*generate) {
      gen_args.utilization = Rational::parse(utilization_text);
      return run_generate(gen_args, out, err);
    }
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace gedf::cli

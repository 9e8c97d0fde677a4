#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gedf/cli.hpp"
#include "gedf/model.hpp"

using namespace gedf;
namespace fs = std::filesystem;

namespace {

const std::string kData = GEDF_DATA_DIR;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gedf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gedf_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("analyze") {
  const Outcome ok = run_cli({"analyze", kData + "/example1.taskset"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.rfind("verdict=schedulable steady_start=28 horizon=40 checkpoints=3 miss_task=- miss_deadline=-\n", 0) ==
        0);
  CHECK(ok.out.find("# tasks=3 m=2 P=12 O_max=4 C_tau=8 U=23/12") != std::string::npos);
  CHECK(ok.out.find("# checkpoint k=2 t=28 config=(1,3,2)") != std::string::npos);

  const Outcome miss = run_cli({"analyze", kData + "/overload.taskset"});
  CHECK(miss.code == cli::kExitMiss);
  CHECK(miss.out.find("miss_task=3 miss_deadline=3") != std::string::npos);

  const Outcome tie = run_cli({"analyze", kData + "/tiebreak.taskset"});
  CHECK(tie.code == cli::kExitMiss);
  CHECK(tie.out.find("miss_deadline=10") != std::string::npos);
}

TEST_CASE("input errors exit with 2") {
  const fs::path bad = scratch("bad.taskset");
  std::ofstream(bad) << "m 2\ntask 0 4 3 3\n";
  const Outcome parse = run_cli({"analyze", bad.string()});
  CHECK(parse.code == cli::kExitInput);
  CHECK(parse.err.find("line 2") != std::string::npos);

  CHECK(run_cli({"analyze", (fs::path(kData) / "missing.taskset").string()}).code == cli::kExitInput);
  CHECK(run_cli({}).code == cli::kExitInput);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitInput);
  CHECK(run_cli({"simulate", kData + "/example1.taskset", "--horizon", "0"}).code == cli::kExitInput);
  CHECK(run_cli({"simulate", kData + "/example1.taskset", "--policy", "rm"}).code == cli::kExitInput);
  CHECK(run_cli({"generate", "--n", "2", "--m", "1", "-u", "3"}).code == cli::kExitInput);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("simulate writes CSV") {
  const Outcome r = run_cli({"simulate", kData + "/example1.taskset", "--horizon", "12"});
  CHECK(r.code == cli::kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,cpu,task");
  std::size_t rows = 0;
  std::string first;
  while (std::getline(lines, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  CHECK(rows == 24);
  CHECK(first == "0,1,1");

  const fs::path csv = scratch("ex1.csv");
  const Outcome to_file = run_cli({"simulate", kData + "/example1.taskset", "-o", csv.string()});
  CHECK(to_file.code == cli::kExitOk);
  CHECK(to_file.out == "# policy=edf ticks=28\n");
  CHECK(slurp(csv).size() > 0);

  const Outcome overload = run_cli({"simulate", kData + "/overload.taskset"});
  CHECK(overload.code == cli::kExitMiss);
  CHECK(overload.err.find("deadline 3") != std::string::npos);

  CHECK(run_cli({"simulate", kData + "/example1.taskset", "--policy", "llf", "--horizon", "24"}).code != cli::kExitInput);
}

TEST_CASE("gantt subcommand") {
  const Outcome r = run_cli({"gantt", kData + "/example1.taskset", "--horizon", "12"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("P1 | 113112212113") != std::string::npos);
  const Outcome miss = run_cli({"gantt", kData + "/overload.taskset"});
  CHECK(miss.code == cli::kExitMiss);
}

TEST_CASE("generate round-trips through the parser") {
  const fs::path out = scratch("gen.taskset");
  const Outcome r = run_cli({"generate", "--n", "5", "--m", "2", "-u", "1.5", "--seed", "9", "-o", out.string()});
  REQUIRE(r.code == cli::kExitOk);
  const System sys = load_taskset_file(out.string());
  CHECK(sys.tasks.size() == 5);
  CHECK(sys.platform.processors() == 2);
  CHECK(run_cli({"generate", "--n", "5", "--m", "2", "-u", "1.5", "--seed", "9"}).out == slurp(out));
  CHECK(run_cli({"analyze", out.string()}).code != cli::kExitInput);

  const Outcome sync = run_cli({"generate", "--n", "3", "--m", "2", "-u", "1", "--synchronous", "--periods", "4,8"});
  CHECK(parse_taskset_string(sync.out).tasks.synchronous());
}

TEST_CASE("examples self-check") {
  const Outcome a = run_cli({"examples"});
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out.find("FAIL") == std::string::npos);
  CHECK(a.out.find("all checks passed") != std::string::npos);
  CHECK(run_cli({"examples"}).out == a.out);

  // Lowest priority first: must be caught.
  std::ostringstream broken;
  const int code = cli::run_examples(broken, [](std::span<const Job> ready, std::size_t m, Tick, Policy,
                                                std::vector<std::size_t>& out) {
    out.clear();
    for (std::size_t i = ready.size(); i-- > 0 && out.size() < m;) out.push_back(i);
  });
  CHECK(code == cli::kExitMiss);
  CHECK(broken.str().find("FAIL") != std::string::npos);

  // Leaves one processor idle whenever it could be busy.
  std::ostringstream lazy;
  CHECK(cli::run_examples(lazy, [](std::span<const Job> ready, std::size_t m, Tick now, Policy policy,
                                   std::vector<std::size_t>& out) {
          out = dispatch(ready, m, now, policy);
          if (out.size() > 1) out.pop_back();
        }) == cli::kExitMiss);
  CHECK(lazy.str().find("FAIL") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
  CHECK(run_cli({"analyze", kData + "/example1.taskset"}).out == run_cli({"analyze", kData + "/example1.taskset"}).out);
  const fs::path a = scratch("a.csv"), b = scratch("b.csv");
  run_cli({"simulate", kData + "/example1.taskset", "-o", a.string()});
  run_cli({"simulate", kData + "/example1.taskset", "-o", b.string()});
  CHECK(slurp(a) == slurp(b));
}

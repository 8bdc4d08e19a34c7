#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "teleop/report.hpp"
#include "teleop/scenario.hpp"

namespace fs = std::filesystem;
using namespace teleop;

namespace {

constexpr int kOk = 0;
constexpr int kVerdictFail = 1;
constexpr int kUsage = 2;

constexpr const char* kSynopsis =
    "usage:\n"
    "  teleop analyze    --config F [--grid N]\n"
    "  teleop simulate   --config F --out DIR [--seed S]\n"
    "  teleop sweep      --config F --periods LIST --out DIR\n"
    "  teleop max-period --config F --criterion {small_gain|eq21} --range LO:HI\n";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

int cmd_analyze(const std::string& config, std::optional<std::size_t> grid) {
  SimScenario sc = load_scenario(config);
  if (grid) {
    sc.analysis.grid_points = *grid;
    sc.validate();
  }
  const auto rep = make_report(sc, analyze(analysis_system(sc), sc.channel, sc.analysis));
  std::cout << to_json(rep) << '\n';
  return rep.stability.small_gain_pass ? kOk : kVerdictFail;
}

int cmd_simulate(const std::string& config, const fs::path& dir,
                 std::optional<std::uint64_t> seed) {
  SimScenario sc = load_scenario(config);
  if (seed) sc.seed = *seed;
  fs::create_directories(dir);

  const SimTrace trace = run_scenario(sc);
  {
    auto out = open_out(dir / "trace.csv");
    write_trace_csv(out, trace);
  }
  {
    auto out = open_out(dir / "events.csv");
    write_events_csv(out, trace);
  }
  auto rep = make_report(sc, analyze(analysis_system(sc), sc.channel, sc.analysis));
  rep.simulation = verdict(trace, sc.verdict);
  write_file(dir / "report.json", to_json(rep) + "\n");

  std::cout << "rows " << trace.size() << ", bounded " << (rep.simulation->bounded ? "yes" : "no")
            << ", max |x| " << rep.simulation->max_abs_position << " rad, settled "
            << (rep.simulation->settling_ok ? "yes" : "no") << '\n';
  return rep.simulation->bounded ? kOk : kVerdictFail;
}

int cmd_sweep(const std::string& config, const std::string& periods, const fs::path& dir) {
  const SimScenario sc = load_scenario(config);
  const auto T = parse_list(periods, ',');
  if (T.empty()) throw UsageError("--periods needs at least one value");
  fs::create_directories(dir);
  const auto rows = sweep_period(sc, T);
  write_file(dir / "sweep.csv", sweep_table_csv(rows));

  bool all_bounded = true;
  for (const auto& r : rows) {
    if (!r.error.empty()) std::cerr << "T = " << r.T << ": " << r.error << '\n';
    all_bounded = all_bounded && r.error.empty() && r.verdict && r.verdict->bounded;
  }
  std::cout << rows.size() << " rows written to " << (dir / "sweep.csv").string() << '\n';
  return all_bounded ? kOk : kVerdictFail;
}

int cmd_max_period(const std::string& config, const std::string& criterion_name,
                   const std::string& range) {
  const SimScenario sc = load_scenario(config);
  Criterion criterion;
  if (criterion_name == "small_gain") {
    criterion = Criterion::SmallGain;
  } else if (criterion_name == "eq21") {
    criterion = Criterion::DampingBound;
  } else {
    throw UsageError("--criterion must be small_gain or eq21");
  }
  const auto bounds = parse_list(range, ':');
  if (bounds.size() != 2) throw UsageError("--range must be LO:HI");

  const auto sys = analysis_system(sc);
  const auto search =
      max_stable_period(sys, sc.channel, criterion, bounds[0], bounds[1], sc.analysis);
  auto rep = make_report(sc, analyze(sys, sc.channel, sc.analysis));
  rep.period_search = search;
  rep.period_criterion = criterion;
  std::cout << to_json(rep) << '\n';
  return search.status == BracketStatus::AlwaysFail ? kVerdictFail : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled-data teleoperation: stability analysis and simulation", "teleop"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  std::string config, out_dir, periods, criterion, range;
  std::optional<std::size_t> grid;
  std::optional<std::uint64_t> seed;

  auto* analyze_cmd = app.add_subcommand("analyze", "frequency-domain test and damping bound");
  analyze_cmd->add_option("--config", config, "scenario file")->required();
  analyze_cmd->add_option("--grid", grid, "frequency grid points")->check(CLI::Range(2, 1 << 24));

  auto* sim_cmd = app.add_subcommand("simulate", "time-domain run, writes CSV traces and report");
  sim_cmd->add_option("--config", config, "scenario file")->required();
  sim_cmd->add_option("--out", out_dir, "output directory")->required();
  sim_cmd->add_option("--seed", seed, "overrides the scenario seed");

  auto* sweep_cmd = app.add_subcommand("sweep", "simulation and analysis over sampling periods");
  sweep_cmd->add_option("--config", config, "scenario file")->required();
  sweep_cmd->add_option("--periods", periods, "comma-separated periods in seconds")->required();
  sweep_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* maxp_cmd = app.add_subcommand("max-period", "largest period passing a criterion");
  maxp_cmd->add_option("--config", config, "scenario file")->required();
  maxp_cmd->add_option("--criterion", criterion, "small_gain or eq21")
      ->required()
      ->check(CLI::IsMember({"small_gain", "eq21"}));
  maxp_cmd->add_option("--range", range, "LO:HI in seconds")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "teleop: " << e.what() << '\n' << kSynopsis;
    return kUsage;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(config, grid);
    if (*sim_cmd) return cmd_simulate(config, out_dir, seed);
    if (*sweep_cmd) return cmd_sweep(config, periods, out_dir);
    if (*maxp_cmd) return cmd_max_period(config, criterion, range);
  } catch (const UsageError& e) {
    std::cerr << "teleop: " << e.what() << '\n' << kSynopsis;
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "teleop: " << e.what() << '\n';
    return kUsage;
  }
  std::cerr << kSynopsis;
  return kUsage;
}

// eyemate-sim: run scenarios, summarize distance error, check traces.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "eyemate/harness.hpp"

using namespace eyemate;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

TraceLog read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return TraceLog::from_jsonl(in);
}

SimConfig config_or_default(const std::string& path) { return path.empty() ? SimConfig{} : load_config(path); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EyeMate end-to-end simulator"};
  app.require_subcommand(1);

  std::string scenario_path, config_path, trace_path;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario and write its trace (JSON lines)");
  run->add_option("-s,--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("-c,--config", config_path, "Config file (defaults built in)")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Seed (overrides the scenario's)");
  run->add_option("-o,--trace", trace_path, "Trace output path (stdout if omitted)");

  std::vector<std::string> trace_inputs;
  std::string report_json;
  auto* report = app.add_subcommand("report", "Distance error table from traces");
  report->add_option("traces", trace_inputs, "Trace files")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", report_json, "Machine-readable report (JSON)");

  std::string assert_trace, expect_path;
  auto* check = app.add_subcommand("assert", "Match a trace against an expectation file");
  check->add_option("trace", assert_trace, "Trace file")->required()->check(CLI::ExistingFile);
  check->add_option("-e,--expect", expect_path, "Expectation file")->required()->check(CLI::ExistingFile);

  std::string bench_dir;
  std::uint64_t bench_seed = 42;
  auto* bench = app.add_subcommand("bench", "Grid distance experiment, one trace per surface/weather bucket");
  bench->add_option("-c,--config", config_path, "Config file")->check(CLI::ExistingFile);
  bench->add_option("--seed", bench_seed, "Seed")->capture_default_str();
  bench->add_option("-o,--out-dir", bench_dir, "Directory for bench_<surface>_<weather>.jsonl")->required();
  bench->add_option("--report", report_json, "Also write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto script = load_scenario(scenario_path);
      const auto trace = run_scenario(script, config_or_default(config_path), seed.value_or(script.seed));
      if (trace_path.empty())
        std::cout << trace.to_jsonl();
      else
        write_file(trace_path, trace.to_jsonl());
      return 0;
    }
    if (*report) {
      std::vector<TraceLog> traces;
      for (const auto& p : trace_inputs) traces.push_back(read_trace(p));
      const auto r = error_report(traces);
      std::cout << r.to_table();
      if (!report_json.empty()) write_file(report_json, r.to_json().dump(2) + "\n");
      return 0;
    }
    if (*check) {
      const auto expected = expectations_from_json(read_json_file(expect_path));
      const auto result = assert_expectations(read_trace(assert_trace), expected);
      std::cout << (result.pass ? "PASS: " : "FAIL: ") << result.message << "\n";
      return result.pass ? 0 : 1;
    }
    if (*bench) {
      std::filesystem::create_directories(bench_dir);
      const auto traces = run_grid_experiment(config_or_default(config_path), bench_seed);
      for (const auto& t : traces) {
        const auto& first = t.events.front().data;
        write_file(bench_dir + "/bench_" + first["surface"].get<std::string>() + "_" +
                       first["weather"].get<std::string>() + ".jsonl",
                   t.to_jsonl());
      }
      const auto r = error_report(traces);
      std::cout << r.to_table();
      if (!report_json.empty()) write_file(report_json, r.to_json().dump(2) + "\n");
      return 0;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "invalid scenario:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

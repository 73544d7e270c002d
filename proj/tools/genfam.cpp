// genfam: solve, classify and verify sets generated by families of
// functions over trivial fibrations.
//
//   genfam run <problem-file> [--seed N] [--samples PATH] [--report PATH]
//
// Exit codes: 0 success with all verifications passing, 1 input/config
// error, 2 verification failure (the report is still written).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "genfam/problem.hpp"

namespace {

int run_command(const std::string& problem_path,
                std::optional<std::uint64_t> seed,
                const std::string& samples_override,
                const std::string& report_override) {
  genfam::ProblemFile problem;
  try {
    problem = genfam::load_problem(problem_path);
  } catch (const genfam::problem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!report_override.empty()) problem.report_path = report_override;
  if (!samples_override.empty()) problem.samples_path = samples_override;

  genfam::RunReport report;
  try {
    report = genfam::run_problem(problem, seed);
  } catch (const genfam::problem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::size_t total_points = 0;
  for (const auto& b : report.base) total_points += b.points.size();
  std::cout << report.label << ": " << report.base.size() << " base points, "
            << total_points << " critical points, classification "
            << genfam::to_string(report.classification.family_class);
  if (report.classification.rank_constant)
    std::cout << " (rank " << report.classification.rank << ")";
  std::cout << "\n";
  for (const auto& note : report.notes) std::cout << "note: " << note << "\n";
  const auto& v = report.verdicts;
  std::cout << "verdicts: identities=" << (v.identities ? "ok" : "FAIL")
            << " lagrangian_graph=" << (v.lagrangian_graph ? "ok" : "FAIL")
            << " equivalences=" << (v.equivalences ? "ok" : "FAIL")
            << " immersion=" << (v.immersion ? "ok" : "FAIL")
            << " oracle=" << (v.oracle ? "ok" : "FAIL") << "\n";

  if (!problem.report_path.empty()) {
    std::ofstream out(problem.report_path);
    if (!out) {
      std::cerr << "error: cannot write report to '" << problem.report_path
                << "'\n";
      return 1;
    }
    out << report.to_json().dump(2) << "\n";
  }
  if (!problem.samples_path.empty()) {
    std::ofstream out(problem.samples_path);
    if (!out) {
      std::cerr << "error: cannot write samples to '" << problem.samples_path
                << "'\n";
      return 1;
    }
    genfam::write_samples(report, out);
  }
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generating-family solver and verifier"};
  app.require_subcommand(1);

  std::string problem_path, samples_path, report_path;
  std::uint64_t seed = 0;
  bool seed_given = false;

  CLI::App* run = app.add_subcommand("run", "solve a problem file");
  run->add_option("problem", problem_path, "problem file (JSON)")
      ->required();
  run->add_option("--seed", seed, "override the RNG seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--samples", samples_path, "write the sample table here");
  run->add_option("--report", report_path, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  return run_command(problem_path,
                     seed_given ? std::optional<std::uint64_t>(seed)
                                : std::nullopt,
                     samples_path, report_path);
}

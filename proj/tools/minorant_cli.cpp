#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "minorant/error.hpp"
#include "minorant/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Batch runner for minorant problems"};
  std::string command;
  std::string input;
  std::string out_dir = ".";
  std::string format = "json";
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool quiet = false;

  app.add_option("command", command, "Expected command of the problem file")
      ->check(CLI::IsMember({"envelope", "projlattice", "supremal", "dual", "balayage", "pipeline", "criterion",
                             "transform"}));
  app.add_option("--input", input, "Problem JSON")->required();
  app.add_option("--out-dir", out_dir, "Directory for report.json and field files");
  auto* tol_opt = app.add_option("--tol", tol, "Solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Field output")->check(CLI::IsMember({"json", "csv", "pgm", "all"}));
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random field expressions");
  app.add_flag("--quiet", quiet, "Suppress the summary line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: PARSE_ERROR: " << e.what() << "\n";
    return 1;
  }

  minorant::io::RunOptions opt;
  opt.out_dir = out_dir;
  opt.format = minorant::io::parse_format(format);
  opt.expect_command = command;
  if (*tol_opt) opt.tol = tol;
  if (*seed_opt) opt.seed = seed;
  return minorant::io::run(input, opt, quiet);
}

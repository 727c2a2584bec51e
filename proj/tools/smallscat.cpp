// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: one subcommand per scenario mode plus `compare`.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smallscat/smallscat.h"

namespace
{

int report_failure(ssc_status status)
{
  std::fprintf(stderr, "error: code=%s message=%s\n", ssc_last_error_code(),
               ssc_last_error_message());
  return static_cast<int>(status);
}

struct RunArgs
{
  std::string scenario;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Scattering by many small bodies: asymptotic and reference solvers"};
  app.set_version_flag("--version", std::string(ssc_version()));
  app.require_subcommand(1);

  static const char *const modes[][2] = {
      {"shape", "capacitance and polarizability of a body"},
      {"one-body", "asymptotic scattering amplitude of one small body"},
      {"oracle", "full boundary-element reference solve"},
      {"many-body", "effective field of a particle cloud"},
      {"effective", "continuum limit equation on a box"},
      {"design", "particle density and impedance for a target refraction coefficient"},
      {"background-green", "Green's function of an inhomogeneous background"}};

  RunArgs run;
  std::string mode;
  for (const auto &m : modes)
  {
    CLI::App *sub = app.add_subcommand(m[0], m[1]);
    sub->add_option("--scenario", run.scenario, "scenario JSON file")->required();
    sub->add_option("--out", run.out, "output directory")->required();
    sub->add_option("--threads", run.threads, "worker threads (0: runtime default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", run.seed, "overrides the scenario seed");
    sub->callback([&mode, name = std::string(m[0])] { mode = name; });
  }

  std::string dir_a, dir_b;
  double tolerance = 1e-9;
  CLI::App *cmp = app.add_subcommand("compare", "relative difference of two runs' CSV outputs");
  cmp->add_option("dirA", dir_a, "first run")->required();
  cmp->add_option("dirB", dir_b, "reference run")->required();
  cmp->add_option("--tolerance", tolerance, "largest accepted relative error")
      ->check(CLI::NonNegativeNumber);
  cmp->callback([&mode] { mode = "compare"; });

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::Success &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    std::fprintf(stderr, "error: code=usage message=%s\n", e.what());
    return SSC_ERR_VALIDATION;
  }

  if (mode == "compare")
  {
    char *report = nullptr;
    const ssc_status st = ssc_compare(dir_a.c_str(), dir_b.c_str(), tolerance, &report);
    if (report)
    {
      std::cout << report << "\n";
      ssc_free_string(report);
    }
    return st == SSC_OK ? 0 : report_failure(st);
  }

  bool seeded = false;
  for (const auto *sub : app.get_subcommands())
    seeded = seeded || sub->count("--seed") > 0;
  char *summary = nullptr;
  const ssc_status st = ssc_run(mode.c_str(), run.scenario.c_str(), run.out.c_str(),
                                seeded ? &run.seed : nullptr, run.threads, &summary);
  if (st != SSC_OK)
    return report_failure(st);
  if (summary && *summary)
    std::cout << summary << "\n";
  ssc_free_string(summary);
  return 0;
}

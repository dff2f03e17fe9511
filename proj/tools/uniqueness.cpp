// Copyright 2026 The Uniqueness Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"

#include "uniqueness/cli.hpp"

namespace {

using uniqueness::cli::Format;
using uniqueness::cli::RunConfig;

void add_common(CLI::App& sub, RunConfig& cfg, std::string& format,
                double& tol) {
  sub.add_option("--dim", cfg.dim, "local Hilbert space dimension (>= 2)");
  sub.add_option("--samples", cfg.samples, "Monte Carlo samples or trials");
  sub.add_option("--seed", cfg.seed, "master seed (0 .. 2^64-1)");
  sub.add_option("--tol", tol, "tolerance for the pass/fail check");
  sub.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--out", cfg.out, "write the report here instead of stdout");
  sub.add_option("--shards", cfg.shards, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence operator and quantum uniqueness toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(uniqueness::cli::kVersion));

  RunConfig cfg;
  std::string format = "json";
  double tol = std::numeric_limits<double>::quiet_NaN();
  std::string state, spec, remap;

  const std::string descriptions[] = {
      "compare the closed-form and Monte Carlo isotropic divergence",
      "mean divergence of a joint state against the closed form",
      "singlet pair on identical +-45 degree beamsplitters",
      "random bits from measuring a pure qubit state",
      "prediction game: guess A's outcome from B",
      "Haar sampler moments and volume normalization",
      "remapped divergence with a correlation map"};
  std::size_t i = 0;
  for (const auto& name : uniqueness::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, descriptions[i++]);
    add_common(*sub, cfg, format, tol);
    if (name == "mean-divergence" || name == "qrng")
      sub->add_option("--state", state, "state name");
    if (name == "predict" || name == "remapped") {
      sub->add_option("--spec", spec, "joint state name");
      sub->add_option("--remap", remap,
                      "none|identity|conjugate|inversion|matched");
    }
    if (name == "verify-decomposition" || name == "sample" || name == "remapped")
      sub->add_option("--sampler", cfg.sampler, "angles|gaussian");
    if (name == "qrng" || name == "predict")
      sub->add_option("--povm", cfg.povm, "hv|diagonal");
    sub->callback([&cfg, name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return uniqueness::cli::kUsage;
  }

  cfg.format = format == "csv" ? Format::csv : Format::json;
  if (!std::isnan(tol)) cfg.tolerance = tol;
  if (!state.empty()) cfg.state = state;
  if (!spec.empty()) cfg.spec = spec;
  if (!remap.empty()) cfg.remap = remap;

  const auto report = uniqueness::cli::run(cfg);
  if (report.exit_code == uniqueness::cli::kUsage) {
    std::cerr << "error: " << report.doc.value("error", std::string("usage"))
              << "\n";
    return report.exit_code;
  }
  const std::string text = uniqueness::cli::render(report, cfg.format);
  if (cfg.out) {
    std::ofstream os(*cfg.out, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot open " << *cfg.out << " for writing\n";
      return uniqueness::cli::kUsage;
    }
    os << text;
  } else {
    std::cout << text;
  }
  if (report.doc.contains("error"))
    std::cerr << "error: " << report.doc["error"].get<std::string>() << "\n";
  return report.exit_code;
}

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "avgslope/commands.hpp"

namespace {

using namespace avgslope;
using cli::RunConfig;

void add_common(CLI::App* app, RunConfig& c, std::string& metric, std::string& format) {
  app->add_option("--metric", metric, "euclidean | l1 | linf | matrix")
      ->check(CLI::IsMember({"euclidean", "l1", "linf", "matrix"}));
  app->add_option("--budget-L", c.budget_L, "slope budget L");
  app->add_option("--epsilon", c.epsilon, "extension radius / removed mass");
  app->add_option("--approx-c", c.approx_c, "approximation slack c of the smoothing solver");
  app->add_option("--delta", c.delta, "confidence parameter");
  app->add_option("--c-delta", c.c_delta, "constant C_delta of the generalization bounds");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--out", c.out, "output path (default stdout)");
  app->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_file(c.out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average-smoothness learning on finite metric spaces"};
  app.require_subcommand(1);
  RunConfig c;
  std::string metric = "euclidean", format = "json";

  auto* stats = app.add_subcommand("stats", "slope profile of a labeled CSV");
  auto* smooth = app.add_subcommand("smooth", "regression smoothing or classification relabeling");
  auto* extend = app.add_subcommand("extend", "fit on --input, predict --test");
  auto* bounds = app.add_subcommand("bounds", "bound table over a parameter grid");
  auto* demo = app.add_subcommand("demo-step", "PMSE vs linear interpolation on a step");
  auto* gen = app.add_subcommand("generate", "write a built-in dataset as CSV");
  for (auto* sub : {stats, smooth, extend, bounds, demo, gen}) add_common(sub, c, metric, format);
  for (auto* sub : {stats, smooth, extend}) sub->add_option("--input", c.input, "labeled CSV")->required();

  smooth->add_option("--mode", c.mode, "reg-dense | reg-hier | class");
  for (auto* sub : {smooth, extend}) sub->add_option("--backend", c.backend, "auto | exact | approximate");
  extend->add_option("--test", c.test, "test CSV (coordinates)")->required();
  extend->add_option("--task", c.task, "regression | classification");
  bounds->add_option("--t", c.t_values, "scales t (repeatable)");
  bounds->add_option("--d", c.dim, "doubling dimension");
  bounds->add_option("--diam", c.diam, "diameter");
  bounds->add_option("--n", c.sample_size, "sample size");
  bounds->add_option("--m", c.tv_m, "support size for the total-variation bound");
  gen->add_option("--dataset", c.dataset, "gapped-step | margin-loss | power | noisy-step | two-clusters")
      ->required();
  gen->add_option("--n", c.size, "point count");
  gen->add_option("--gamma", c.gamma, "gap / margin width");
  gen->add_option("--p", c.power, "exponent of x^p");
  gen->add_option("--noise", c.noise, "noise amplitude");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    c.metric = io::parse_metric(metric);
    c.format = format == "csv" ? cli::Format::csv : cli::Format::json;
    c.validate();
    cli::Output out;
    if (stats->parsed()) {
      out = cli::cmd_stats(io::read_csv(c.input), c);
    } else if (smooth->parsed()) {
      out = cli::cmd_smooth(io::read_csv(c.input), c);
    } else if (extend->parsed()) {
      const Dataset train = io::read_csv(c.input), test = io::read_csv(c.test);
      out = cli::cmd_extend(train, test, c);
    } else if (bounds->parsed()) {
      out = cli::cmd_bounds(c);
    } else if (demo->parsed()) {
      out = cli::cmd_demo_step(c);
    } else {
      out = cli::cmd_generate(c);
    }
    emit(c, out.text);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

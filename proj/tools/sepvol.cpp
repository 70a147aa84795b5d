#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sepvol/sepvol.hpp"

using namespace sepvol;

namespace {

struct Options {
  std::uint64_t samples = 4'000'000;
  std::uint64_t seed = 20080101;
  int shards = 8;
  std::string format = "json";
  std::string out;
  std::string scenario;
  std::string suite;
  std::string grid = "0.2:5:9";
  int axis = 1;
};

void add_run_options(CLI::App* app, Options& o) {
  app->add_option("--samples", o.samples, "Monte Carlo draws per estimate (>= 1000)")->check(CLI::Range(1000ull, 1ull << 40));
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--shards", o.shards, "work shards; results do not depend on it")->check(CLI::Range(1, 4096));
  app->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", o.out, "output file (default stdout)");
}

McConfig config(const Options& o) {
  McConfig c;
  c.samples = o.samples;
  c.seed = o.seed;
  c.shards = o.shards;
  return c;
}

void emit(const std::string& text, const Options& o) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(Errc::ParseError, "cannot write " + o.out);
  f << text;
}

void emit(const Report& rep, const Options& o) {
  emit(o.format == "csv" ? report_to_csv(rep) : report_to_json(rep).dump(2) + "\n", o);
}

int list_command(const Options& o) {
  std::string text;
  if (o.format == "csv") text = "alias,suite,status,P\n";
  Json arr = Json::array();
  for (const auto& e : catalog().entries()) {
    if (!o.suite.empty() && e.suite != o.suite) continue;
    if (o.format == "csv") {
      text += e.alias + "," + e.suite + "," + status_name(e.status) + "," + (e.P ? e.P->text : "") + "\n";
    } else {
      Json j;
      j["alias"] = e.alias;
      j["suite"] = e.suite;
      j["status"] = status_name(e.status);
      if (e.P) j["P"] = e.P->text;
      arr.push_back(std::move(j));
    }
  }
  emit(o.format == "csv" ? text : arr.dump(2) + "\n", o);
  return 0;
}

int show_command(const Options& o) {
  const ScenarioSpec spec = resolve_scenario(o.scenario);
  Json j;
  j["scenario"] = scenario_to_json(spec);
  j["alias"] = make_alias(spec);
  j["dimension"] = spec.dimension;
  if (const auto e = catalog_lookup(spec)) j["catalog"] = entry_to_json(*e);
  emit(j.dump(2) + "\n", o);
  return 0;
}

int bounds_command(const Options& o) {
  Report rep{"bounds", "qq-real-full", config(o), {}};
  auto row = [&](const char* name, double v) {
    ReportRow r;
    r.scenario = rep.target;
    r.quantity = name;
    r.value = v;
    r.seed = o.seed;
    r.shards = o.shards;
    rep.rows.push_back(r);
  };
  row("P:upper-single-minor", bound_probability(BoundKind::UpperSingleMinor));
  row("P:lower-pieced", bound_probability(BoundKind::LowerPieced));
  row("V_sep:upper-with-3x3", bound_numerator_3x3());
  row("P:upper-with-3x3", bound_probability(BoundKind::UpperWith3x3));
  row("quasi_s(1)", quasi_s(1.0));
  emit(rep, o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separability volumes of Bloore-parameterized density matrices"};
  app.require_subcommand(1);
  Options o;

  auto* list = app.add_subcommand("list", "list cataloged scenarios");
  list->add_option("--suite", o.suite, "restrict to one suite");
  list->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  list->add_option("--out", o.out, "output file");

  auto* show = app.add_subcommand("show", "scenario details and catalog entry");
  show->add_option("--scenario", o.scenario, "JSON object or alias")->required();
  show->add_option("--out", o.out, "output file");

  auto* est = app.add_subcommand("estimate", "c, V_tot, V_sep and P of one scenario");
  est->add_option("--scenario", o.scenario, "JSON object or alias")->required();
  add_run_options(est, o);

  auto* sweep = app.add_subcommand("sweep", "S along one ratio axis, others at 1");
  sweep->add_option("--scenario", o.scenario, "JSON object or alias")->required();
  sweep->add_option("--grid", o.grid, "a:b:steps or a:b:steps,log");
  sweep->add_option("--axis", o.axis, "ratio variable to vary, from 1")->check(CLI::Range(1, 4));
  add_run_options(sweep, o);

  auto* verify = app.add_subcommand("verify", "compare sampling against a catalog suite");
  verify->add_option("--suite", o.suite, "suite name")->required();
  add_run_options(verify, o);

  auto* bounds = app.add_subcommand("bounds", "relaxed-constraint bounds by quadrature");
  add_run_options(bounds, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (list->parsed()) {
      if (!o.suite.empty() && !is_suite(o.suite)) throw Error(Errc::UnknownSuite, o.suite);
      return list_command(o);
    }
    if (show->parsed()) return show_command(o);
    if (bounds->parsed()) return bounds_command(o);
    if (est->parsed()) {
      const Report rep = run_estimate(resolve_scenario(o.scenario), config(o));
      emit(rep, o);
      return rep.passed() ? 0 : 1;
    }
    if (sweep->parsed()) {
      const Report rep = render_sweep(resolve_scenario(o.scenario), parse_grid(o.grid), config(o), o.axis - 1);
      emit(rep, o);
      return 0;
    }
    const Report rep = run_verify_suite(o.suite, config(o));
    emit(rep, o);
    return rep.passed() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

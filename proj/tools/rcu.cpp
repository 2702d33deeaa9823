#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcu/decomposition.hpp"
#include "rcu/experiments.hpp"
#include "rcu/ustat.hpp"

using nlohmann::json;
using namespace rcu;

namespace {

struct ModelFlags {
  std::string name = "gaussian_iid";
  double lambda = 1.0;
  std::string f = "const", g = "const";
  double dispersion = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--model", name, "gaussian_iid | poisson_bedd | overdispersed_poisson_bedd")->capture_default_str();
    app->add_option("--lambda", lambda, "BEDD scale")->capture_default_str();
    app->add_option("--f", f, "row degree function: const or power:<a>")->capture_default_str();
    app->add_option("--g", g, "column degree function: const or power:<a>")->capture_default_str();
    app->add_option("--dispersion", dispersion, "overdispersion alpha")->capture_default_str();
  }

  ModelSpec build() const {
    ModelSpec m;
    m.variant = parse_variant(name);
    m.lambda = lambda;
    m.f = DegreeFunction::parse(f);
    m.g = DegreeFunction::parse(g);
    m.alpha = dispersion;
    m.validate();
    return m;
  }
};

struct ExperimentFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::string out_dir, run_name;

  void attach(CLI::App* app, bool need_config) {
    auto* c = app->add_option("--config", config, "JSON experiment config (schema 1)");
    if (need_config) c->required();
    app->add_option("--seed", seed, "override the base seed");
    app->add_option("--replicates", replicates, "override K");
    app->add_option("--out-dir", out_dir, "override the output directory");
    app->add_option("--run-name", run_name, "override the run name");
  }

  ExperimentConfig build(ExperimentKind kind) const {
    ExperimentConfig c;
    c.experiment = kind;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw std::runtime_error("cannot open config '" + config + "'");
      c = config_from_json(json::parse(in));
      if (c.experiment != kind)
        throw std::invalid_argument("config is for '" + std::string(experiment_name(c.experiment)) + "', not '" +
                                    std::string(experiment_name(kind)) + "'");
    }
    if (seed) c.seed = *seed;
    if (replicates) c.replicates = *replicates;
    if (!out_dir.empty()) c.output_dir = out_dir;
    if (!run_name.empty()) c.run_name = run_name;
    c.validate();
    return c;
  }
};

Eigen::MatrixXd load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_matrix_csv(in);
}

json estimate_json(const MomentEstimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"samples", e.samples}};
}

json support_json(const SupportReport& r) {
  json j;
  j["found"] = r.found;
  j["message"] = r.message;
  if (r.found) {
    j["principal_degree"] = r.principal_degree;
    j["degeneracy_order"] = r.degeneracy_order;
    j["all_connected"] = r.all_connected;
  }
  auto entry = [](const SupportEntry& e) {
    const auto& g = e.graph_class.representative;
    return json{{"rows", g.rows()},       {"cols", g.cols()},           {"edges", g.edges_hex()},
                {"aut", e.graph_class.aut_count}, {"connected", e.graph_class.connected},
                {"estimate", estimate_json(e.estimate)}, {"z", e.z}, {"escalated", e.escalated},
                {"nonzero", e.nonzero}};
  };
  j["support"] = json::array();
  for (const auto& e : r.support) j["support"].push_back(entry(e));
  j["levels"] = json::array();
  for (const auto& l : r.levels) {
    json lj{{"level", l.level}, {"threshold", l.threshold}, {"entries", json::array()}};
    for (const auto& e : l.entries) lj["entries"].push_back(entry(e));
    j["levels"].push_back(lj);
  }
  return j;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Row-column exchangeable U-statistics: catalog, simulation, decomposition and tests"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // catalog
  auto* cat = app.add_subcommand("catalog", "list isomorphism classes of bipartite graphs");
  int max_rows = 2, max_cols = 2;
  std::string format = "json";
  cat->add_option("--max-rows", max_rows)->capture_default_str()->check(CLI::Range(0, kMaxRows));
  cat->add_option("--max-cols", max_cols)->capture_default_str()->check(CLI::Range(0, kMaxCols));
  cat->add_option("--format", format)->capture_default_str()->check(CLI::IsMember({"json", "csv"}));

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw one network and write its matrix as CSV");
  ModelFlags sim_model;
  sim_model.attach(sim);
  int sim_m = 0, sim_n = 0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  sim->add_option("-m,--rows", sim_m, "row count")->required()->check(CLI::PositiveNumber);
  sim->add_option("-n,--cols", sim_n, "column count")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--out", sim_out, "CSV path; a JSON sidecar is written next to it")->required();

  // ustat
  auto* us = app.add_subcommand("ustat", "evaluate a U-statistic on a matrix");
  std::string us_kernel = "h1", us_in, us_path = "fast";
  us->add_option("--kernel", us_kernel, "h1..h6")->capture_default_str();
  us->add_option("--in", us_in, "matrix CSV")->required();
  us->add_option("--path", us_path, "fast | exact | ordered")->capture_default_str();

  // support
  auto* sup = app.add_subcommand("support", "detect the principal support of a kernel under a model");
  ModelFlags sup_model;
  sup_model.attach(sup);
  std::string sup_kernel = "h1", sup_out;
  SupportPolicy policy;
  sup->add_option("--kernel", sup_kernel, "h1..h6")->capture_default_str();
  sup->add_option("--alpha", policy.alpha, "family-wise level")->capture_default_str();
  sup->add_option("--pilot", policy.pilot_samples, "pilot Monte Carlo pairs per class")->capture_default_str();
  sup->add_option("--inner", policy.inner_completions, "completions averaged per conditional expectation")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sup->add_option("--max-level", policy.max_level, "highest level to scan, 0 for p+q")->capture_default_str();
  sup->add_option("--seed", policy.seed)->capture_default_str();
  sup->add_option("--out", sup_out, "also write the report here");

  // test
  auto* tst = app.add_subcommand("test", "compute a normalized test statistic on a matrix");
  std::string stat = "ZA", tst_in, tst_f = "power:1", tst_g = "power:1";
  double tst_lambda = 1.0;
  tst->add_option("--stat", stat, "ZA | ZB | ZBprime | ZC")->capture_default_str();
  tst->add_option("--in", tst_in, "matrix CSV")->required();
  tst->add_option("--lambda", tst_lambda, "null lambda (ZB, ZC)")->capture_default_str();
  tst->add_option("--f", tst_f, "null f (ZC)")->capture_default_str();
  tst->add_option("--g", tst_g, "null g (ZC)")->capture_default_str();

  ExperimentFlags qq_flags, power_flags, rate_flags, verify_flags;
  auto* qq = app.add_subcommand("qq", "Q-Q experiment with order-statistic envelopes");
  qq_flags.attach(qq, true);
  auto* pw = app.add_subcommand("power", "rejection rates over a deviation grid");
  power_flags.attach(pw, true);
  auto* rt = app.add_subcommand("rate", "log-log regression of SD(U_N) on N");
  rate_flags.attach(rt, true);
  auto* vf = app.add_subcommand("verify", "run the invariant suite");
  verify_flags.attach(vf, false);
  bool tamper = false;
  vf->add_flag("--tamper-aut", tamper, "feed |Aut|+1 to the pair-coincidence check (negative control)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cat->parsed()) {
      const Catalog catalog(max_rows, max_cols);
      if (format == "csv") {
        std::cout << "class_id,rows,cols,edges,edge_count,aut,connected\n";
        for (const auto& c : catalog.all()) {
          const auto& g = c.representative;
          std::cout << c.class_id << "," << g.rows() << "," << g.cols() << "," << g.edges_hex() << ","
                    << g.edge_count() << "," << c.aut_count << "," << (c.connected ? 1 : 0) << "\n";
        }
      } else {
        json j = json::array();
        for (const auto& c : catalog.all()) {
          const auto& g = c.representative;
          j.push_back({{"class_id", c.class_id},
                       {"rows", g.rows()},
                       {"cols", g.cols()},
                       {"edges", g.edges_hex()},
                       {"edge_count", g.edge_count()},
                       {"aut", c.aut_count},
                       {"connected", c.connected}});
        }
        print(j);
      }
    } else if (sim->parsed()) {
      const ModelSpec model = sim_model.build();
      const Eigen::MatrixXd y = sample_matrix(model, sim_m, sim_n, sim_seed);
      {
        std::ofstream out(sim_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + sim_out + "'");
        write_matrix_csv(out, y);
      }
      const auto side = std::filesystem::path(sim_out).replace_extension(".json");
      json j{{"model", model_to_json(model)}, {"m", sim_m}, {"n", sim_n}, {"seed", sim_seed},
             {"version", std::string(kVersion)}, {"matrix", std::filesystem::path(sim_out).filename().string()}};
      std::ofstream(side, std::ios::binary) << j.dump(2) << "\n";
    } else if (us->parsed()) {
      const Eigen::MatrixXd y = load_matrix(us_in);
      const UStatPath path = parse_path(us_path);
      UStatResult r;
      if (path == UStatPath::fast)
        r = u_fast(us_kernel, y);
      else if (path == UStatPath::exact)
        r = u_exact(builtin(us_kernel), y);
      else
        r = u_ordered(builtin(us_kernel), y);
      print({{"kernel", r.kernel}, {"path", std::string(path_name(r.path))}, {"m", r.m}, {"n", r.n}, {"value", r.value}});
    } else if (sup->parsed()) {
      const SupportReport r = detect_principal_support(sup_model.build(), builtin(sup_kernel), policy);
      const json j = support_json(r);
      if (!sup_out.empty()) std::ofstream(sup_out, std::ios::binary) << j.dump(2) << "\n";
      print(j);
    } else if (tst->parsed()) {
      const Eigen::MatrixXd y = load_matrix(tst_in);
      StatisticParams params;
      params.lambda = tst_lambda;
      params.f = DegreeFunction::parse(tst_f);
      params.g = DegreeFunction::parse(tst_g);
      const TestStatistic t = test_statistic(parse_statistic(stat), y, params);
      print({{"statistic", std::string(statistic_name(t.name))},
             {"value", t.value},
             {"variance", t.variance_used},
             {"p_value", t.two_sided_p}});
    } else if (qq->parsed()) {
      const auto r = run_qq(qq_flags.build(ExperimentKind::qq));
      print({{"rows", r.rows.size()}, {"outputs", r.outputs}});
    } else if (pw->parsed()) {
      const auto r = run_power(power_flags.build(ExperimentKind::power));
      json rows = json::array();
      for (const auto& row : r.rows)
        rows.push_back({{"N", row.n_total}, {"deviation", row.deviation}, {"reject_rate", row.reject_rate},
                        {"ci_lo", row.ci_lo}, {"ci_hi", row.ci_hi}});
      print({{"rows", rows}, {"outputs", r.outputs}});
    } else if (rt->parsed()) {
      const auto r = run_rate(rate_flags.build(ExperimentKind::rate));
      json j = to_json(r);
      j["outputs"] = r.outputs;
      print(j);
    } else if (vf->parsed()) {
      auto vc = verify_flags.build(ExperimentKind::verify);
      vc.tamper_aut = vc.tamper_aut || tamper;
      const auto r = run_verify(vc);
      for (const auto& c : r.checks)
        std::printf("%s %-28s measured=%-12.6g tol=%-8.3g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                    c.tolerance, c.detail.c_str());
      return r.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include "rcu/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "rcu/accumulate.hpp"
#include "rcu/distributions.hpp"
#include "rcu/kernels.hpp"
#include "rcu/ustat.hpp"

namespace rcu {

using nlohmann::json;

ExperimentKind parse_experiment(std::string_view s) {
  if (s == "qq") return ExperimentKind::qq;
  if (s == "power") return ExperimentKind::power;
  if (s == "rate") return ExperimentKind::rate;
  if (s == "verify") return ExperimentKind::verify;
  throw std::invalid_argument("experiment must be qq, power, rate or verify");
}

std::string_view experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::qq: return "qq";
    case ExperimentKind::power: return "power";
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::verify: return "verify";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (schema != 1) throw std::invalid_argument("config schema must be 1");
  model.validate();
  if (experiment == ExperimentKind::verify) return;
  if (replicates < 2) throw std::invalid_argument("replicates K must be >= 2");
  if (sizes.empty()) throw std::invalid_argument("size list is empty");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  int p = 2, q = 2;
  if (experiment == ExperimentKind::rate) {
    const KernelSpec k = builtin(statistic);
    p = k.p();
    q = k.q();
    if (sizes.size() < 3) throw std::invalid_argument("rate experiment needs at least 3 sizes");
  } else {
    const StatisticName s = parse_statistic(statistic);
    if (s == StatisticName::ZA) p = 1;
    if ((s == StatisticName::ZB || s == StatisticName::ZBprime || s == StatisticName::ZC) &&
        model.variant == ModelVariant::gaussian_iid)
      throw std::invalid_argument("statistic " + statistic + " needs a Poisson-BEDD model");
  }
  for (int n_total : sizes) {
    const int m = static_cast<int>(std::lround(rho * n_total));
    if (m < p || n_total - m < q)
      throw std::invalid_argument("size N=" + std::to_string(n_total) + " too small for the kernel arity");
  }
  if (experiment == ExperimentKind::power) {
    if (deviations.empty()) throw std::invalid_argument("power experiment needs a deviation grid");
    if (deviation_kind != "f2" && deviation_kind != "alpha" && deviation_kind != "none")
      throw std::invalid_argument("deviation_kind must be f2, alpha or none");
    if (deviation_kind != "none" && model.variant == ModelVariant::gaussian_iid)
      throw std::invalid_argument("f2 and alpha deviations need a Poisson-BEDD model; use deviation_kind none");
    for (double d : deviations) {
      if (deviation_kind == "f2" && !(d >= 1.0)) throw std::invalid_argument("F2 deviations must be >= 1");
      if (deviation_kind == "alpha" && !(d >= 0.0)) throw std::invalid_argument("alpha deviations must be >= 0");
    }
    if (!(nominal_level > 0.0 && nominal_level < 1.0)) throw std::invalid_argument("nominal level must be in (0,1)");
  }
  if (experiment == ExperimentKind::qq && !(envelope_level > 0.0 && envelope_level < 1.0))
    throw std::invalid_argument("envelope level must be in (0,1)");
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["name"] = std::string(variant_name(m.variant));
  if (m.variant != ModelVariant::gaussian_iid) {
    j["lambda"] = m.lambda;
    j["f"] = m.f.to_string();
    j["g"] = m.g.to_string();
  }
  if (m.variant == ModelVariant::overdispersed_poisson_bedd) {
    j["alpha"] = m.alpha;
    j["mixing"] = m.mixing.name;
  }
  return j;
}

ModelSpec model_from_json(const json& j) {
  static const std::set<std::string> known = {"name", "lambda", "f", "g", "alpha", "mixing"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw std::invalid_argument("unknown model field '" + it.key() + "'");
  ModelSpec m;
  m.variant = parse_variant(j.at("name").get<std::string>());
  m.lambda = j.value("lambda", 1.0);
  m.f = DegreeFunction::parse(j.value("f", std::string("const")));
  m.g = DegreeFunction::parse(j.value("g", std::string("const")));
  m.alpha = j.value("alpha", 0.0);
  if (j.value("mixing", std::string("gamma")) != "gamma") throw std::invalid_argument("only the gamma mixing law is built in");
  m.validate();
  return m;
}

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "schema",        "experiment", "model",          "statistic",    "sizes",          "replicates",
      "seed",          "output_dir", "run_name",       "nominal_level", "envelope_level", "rho",
      "deviation_kind", "deviations", "verify_samples", "tamper_aut"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw std::invalid_argument("unknown config field '" + it.key() + "'");
  if (!j.contains("schema")) throw std::invalid_argument("config lacks the schema field");
  ExperimentConfig c;
  c.schema = j.at("schema").get<int>();
  if (c.schema != 1) throw std::invalid_argument("unsupported config schema " + std::to_string(c.schema));
  c.experiment = parse_experiment(j.at("experiment").get<std::string>());
  if (j.contains("model")) c.model = model_from_json(j.at("model"));
  c.statistic = j.value("statistic", c.statistic);
  if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<int>>();
  c.replicates = j.value("replicates", c.replicates);
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.run_name = j.value("run_name", c.run_name);
  c.nominal_level = j.value("nominal_level", c.nominal_level);
  c.envelope_level = j.value("envelope_level", c.envelope_level);
  c.rho = j.value("rho", c.rho);
  c.deviation_kind = j.value("deviation_kind", c.deviation_kind);
  if (j.contains("deviations")) c.deviations = j.at("deviations").get<std::vector<double>>();
  c.verify_samples = j.value("verify_samples", c.verify_samples);
  c.tamper_aut = j.value("tamper_aut", c.tamper_aut);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["experiment"] = std::string(experiment_name(c.experiment));
  j["model"] = model_to_json(c.model);
  j["statistic"] = c.statistic;
  j["sizes"] = c.sizes;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["run_name"] = c.run_name;
  j["nominal_level"] = c.nominal_level;
  j["envelope_level"] = c.envelope_level;
  j["rho"] = c.rho;
  j["deviation_kind"] = c.deviation_kind;
  j["deviations"] = c.deviations;
  j["verify_samples"] = c.verify_samples;
  j["tamper_aut"] = c.tamper_aut;
  return j;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::string_view tag, int n_total, int replicate) {
  return derive(base_seed, {tag_hash(tag), std::uint64_t(n_total), std::uint64_t(replicate)});
}

StatisticParams null_params(const ModelSpec& model) {
  StatisticParams p;
  p.lambda = model.lambda;
  p.f = model.f;
  p.g = model.g;
  return p;
}

ModelSpec model_at_deviation(const ExperimentConfig& c, double d) {
  ModelSpec m = c.model;
  if (c.deviation_kind == "none") return m;
  if (m.variant == ModelVariant::gaussian_iid) throw std::invalid_argument("deviations need a BEDD model");
  if (c.deviation_kind == "f2") {
    m.f = d == 1.0 ? DegreeFunction::constant() : DegreeFunction::power(power_exponent_for_f2(d));
  } else {
    m.variant = ModelVariant::overdispersed_poisson_bedd;
    m.alpha = d;
  }
  m.validate();
  return m;
}

double simulate_statistic(const ModelSpec& model, StatisticName stat, const StatisticParams& params, int m, int n,
                          std::uint64_t seed) {
  const Eigen::MatrixXd y = sample_matrix(model, m, n, seed);
  return test_statistic(stat, y, params).value;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string tag_of(const ExperimentConfig& c, std::string_view extra = {}) {
  std::string t = std::string(experiment_name(c.experiment)) + ":" + c.statistic;
  if (!extra.empty()) t += ":" + std::string(extra);
  return t;
}

// Values of one statistic over K replicates, in replicate order.
template <typename One>
std::vector<double> replicate_values(int replicates, One&& one) {
  std::vector<double> out(replicates);
#pragma omp parallel for schedule(dynamic, 4)
  for (int r = 0; r < replicates; ++r) out[r] = one(r);
  return out;
}

struct Outputs {
  std::filesystem::path dir;
  std::string run;
  std::vector<std::string> files;

  bool enabled() const { return !dir.empty(); }
  std::filesystem::path path(const std::string& suffix) const { return dir / (run + suffix); }

  void write(const std::string& suffix, const std::string& content) {
    std::filesystem::create_directories(dir);
    const auto p = path(suffix);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    files.push_back(p.filename().string());
  }
};

void write_manifest(Outputs& o, const ExperimentConfig& c, double seconds) {
  json m;
  m["config"] = config_to_json(c);
  m["seed"] = c.seed;
  m["replicate_seed_rule"] =
      "seed(N, k) = derive(derive(derive(base_seed, fnv1a_mix(tag)), N), k), tag = '<experiment>:<statistic>[:<deviation>]'";
  m["version"] = std::string(kVersion);
  m["wall_clock_seconds"] = seconds;
  m["outputs"] = o.files;
  std::filesystem::create_directories(o.dir);
  std::ofstream out(o.path(".manifest.json"), std::ios::binary);
  out << m.dump(2) << "\n";
}

std::string plot_script(const std::string& csv, ExperimentKind kind) {
  std::string s = "# Plot template; edit freely.\nimport pandas as pd\nimport matplotlib.pyplot as plt\n\n";
  s += "df = pd.read_csv(\"" + csv + "\")\n";
  if (kind == ExperimentKind::qq) {
    s +=
        "for N, g in df.groupby(\"N\"):\n"
        "    fig, ax = plt.subplots(figsize=(4, 4))\n"
        "    ax.plot(g.theoretical_q, g.sample_q, \".\", ms=3)\n"
        "    ax.plot(g.theoretical_q, g.env_lo, \"r-\", lw=0.8)\n"
        "    ax.plot(g.theoretical_q, g.env_hi, \"r-\", lw=0.8)\n"
        "    ax.plot(g.theoretical_q, g.theoretical_q, \"k--\", lw=0.6)\n"
        "    ax.set_title(f\"N = {N}\")\n"
        "    ax.set_xlabel(\"theoretical quantile\")\n"
        "    ax.set_ylabel(\"sample quantile\")\n"
        "    fig.tight_layout()\n"
        "    fig.savefig(f\"qq_N{N}.png\", dpi=150)\n";
  } else {
    s +=
        "fig, ax = plt.subplots(figsize=(5, 4))\n"
        "for N, g in df.groupby(\"N\"):\n"
        "    ax.errorbar(g.deviation, g.reject_rate, yerr=[g.reject_rate - g.ci_lo, g.ci_hi - g.reject_rate],\n"
        "                marker=\"o\", capsize=2, label=f\"N = {N}\")\n"
        "ax.axhline(0.05, color=\"grey\", ls=\":\")\n"
        "ax.set_xlabel(\"deviation\")\n"
        "ax.set_ylabel(\"rejection rate\")\n"
        "ax.legend()\n"
        "fig.tight_layout()\n"
        "fig.savefig(\"power.png\", dpi=150)\n";
  }
  return s;
}

}  // namespace

std::vector<QQRow> qq_rows(int n_total, std::vector<double> sample, double level) {
  std::sort(sample.begin(), sample.end());
  const int K = static_cast<int>(sample.size());
  std::vector<QQRow> rows;
  for (int k = 1; k <= K; ++k) {
    QQRow r;
    r.n_total = n_total;
    r.k = k;
    r.theoretical_q = normal_quantile((k - 0.375) / (K + 0.25));
    r.sample_q = sample[k - 1];
    r.env_lo = normal_quantile(beta_quantile(k, K + 1 - k, (1.0 - level) / 2));
    r.env_hi = normal_quantile(beta_quantile(k, K + 1 - k, (1.0 + level) / 2));
    rows.push_back(r);
  }
  return rows;
}

QQResult run_qq(const ExperimentConfig& c) {
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const StatisticName stat = parse_statistic(c.statistic);
  const StatisticParams params = null_params(c.model);
  const SizeRegime regime = SizeRegime::balanced(c.rho);
  QQResult res;
  for (int n_total : c.sizes) {
    const auto [m, n] = regime.sizes(n_total);
    const std::string tag = tag_of(c);
    auto values = replicate_values(c.replicates, [&](int r) {
      return simulate_statistic(c.model, stat, params, m, n, replicate_seed(c.seed, tag, n_total, r));
    });
    auto rows = qq_rows(n_total, std::move(values), c.envelope_level);
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  }
  if (!c.output_dir.empty()) {
    Outputs o{c.output_dir, c.run_name, {}};
    std::string csv = "N,k,theoretical_q,sample_q,env_lo,env_hi\n";
    for (const auto& r : res.rows)
      csv += std::to_string(r.n_total) + "," + std::to_string(r.k) + "," + fmt(r.theoretical_q) + "," +
             fmt(r.sample_q) + "," + fmt(r.env_lo) + "," + fmt(r.env_hi) + "\n";
    o.write(".csv", csv);
    o.write(".plot.py", plot_script(c.run_name + ".csv", ExperimentKind::qq));
    write_manifest(o, c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    res.outputs = o.files;
  }
  return res;
}

PowerResult run_power(const ExperimentConfig& c) {
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const StatisticName stat = parse_statistic(c.statistic);
  const StatisticParams params = null_params(c.model);
  const SizeRegime regime = SizeRegime::balanced(c.rho);
  const double crit = normal_quantile(1.0 - c.nominal_level / 2);
  PowerResult res;
  for (int n_total : c.sizes) {
    const auto [m, n] = regime.sizes(n_total);
    for (double dev : c.deviations) {
      const ModelSpec model = model_at_deviation(c, dev);
      const std::string tag = tag_of(c, c.deviation_kind + "=" + fmt(dev));
      auto rejected = replicate_values(c.replicates, [&](int r) {
        double z = simulate_statistic(model, stat, params, m, n, replicate_seed(c.seed, tag, n_total, r));
        return std::fabs(z) > crit ? 1.0 : 0.0;
      });
      double hits = 0;
      for (double x : rejected) hits += x;
      PowerRow row;
      row.n_total = n_total;
      row.deviation = dev;
      row.reject_rate = hits / c.replicates;
      const double half = 1.959963984540054 * std::sqrt(row.reject_rate * (1 - row.reject_rate) / c.replicates);
      row.ci_lo = std::max(0.0, row.reject_rate - half);
      row.ci_hi = std::min(1.0, row.reject_rate + half);
      res.rows.push_back(row);
    }
  }
  if (!c.output_dir.empty()) {
    Outputs o{c.output_dir, c.run_name, {}};
    std::string csv = "N,deviation,reject_rate,ci_lo,ci_hi\n";
    for (const auto& r : res.rows)
      csv += std::to_string(r.n_total) + "," + fmt(r.deviation) + "," + fmt(r.reject_rate) + "," + fmt(r.ci_lo) +
             "," + fmt(r.ci_hi) + "\n";
    o.write(".csv", csv);
    o.write(".plot.py", plot_script(c.run_name + ".csv", ExperimentKind::power));
    write_manifest(o, c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    res.outputs = o.files;
  }
  return res;
}

RateResult fit_rate(const std::vector<int>& sizes, const std::vector<double>& sds) {
  if (sizes.size() < 3 || sizes.size() != sds.size()) throw std::invalid_argument("rate fit needs >= 3 sizes");
  const double k = static_cast<double>(sizes.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sds[i] > 0.0)) throw std::invalid_argument("rate fit: non-positive standard deviation");
    mx += std::log(double(sizes[i]));
    my += std::log(sds[i]);
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double dx = std::log(double(sizes[i])) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(sds[i]) - my);
  }
  RateResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double e = std::log(sds[i]) - r.intercept - r.slope * std::log(double(sizes[i]));
    sse += e * e;
  }
  r.std_error = std::sqrt(sse / (k - 2) / sxx);
  r.sizes = sizes;
  r.sds = sds;
  return r;
}

json to_json(const RateResult& r) {
  json j;
  j["slope"] = r.slope;
  j["stderr"] = r.std_error;
  j["intercept"] = r.intercept;
  json per = json::array();
  for (std::size_t i = 0; i < r.sizes.size(); ++i) per.push_back({{"N", r.sizes[i]}, {"sd", r.sds[i]}});
  j["per_n"] = per;
  return j;
}

RateResult run_rate(const ExperimentConfig& c) {
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Builtin kernel = parse_builtin(c.statistic);
  const SizeRegime regime = SizeRegime::balanced(c.rho);
  std::vector<double> sds;
  for (int n_total : c.sizes) {
    const auto [m, n] = regime.sizes(n_total);
    const std::string tag = tag_of(c);
    auto values = replicate_values(c.replicates, [&](int r) {
      return u_builtin(kernel, sample_matrix(c.model, m, n, replicate_seed(c.seed, tag, n_total, r)));
    });
    RunningMoments acc;
    for (double v : values) acc.add(v);
    sds.push_back(std::sqrt(acc.variance()));
  }
  RateResult res = fit_rate(c.sizes, sds);
  if (!c.output_dir.empty()) {
    Outputs o{c.output_dir, c.run_name, {}};
    o.write(".json", to_json(res).dump(2) + "\n");
    write_manifest(o, c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    res.outputs = o.files;
  }
  return res;
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

json to_json(const VerifyReport& r) {
  json j;
  j["all_pass"] = r.all_pass();
  json arr = json::array();
  for (const auto& c : r.checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}, {"tolerance", c.tolerance},
                   {"detail", c.detail}});
  j["checks"] = arr;
  return j;
}

}  // namespace rcu

namespace rcu {

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& y) {
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", y(i, j));  // round-trips
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos)
        throw std::invalid_argument("matrix CSV: bad cell '" + cell + "' on line " + std::to_string(rows.size() + 1));
      row.push_back(v);
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("matrix CSV: ragged row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("matrix CSV: no data");
  Eigen::MatrixXd y(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) y(i, j) = rows[i][j];
  return y;
}

}  // namespace rcu

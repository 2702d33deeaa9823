#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcu/asymptotics.hpp"
#include "rcu/models.hpp"

namespace rcu {

inline constexpr std::string_view kVersion = "rcu 0.1.0";

enum class ExperimentKind { qq, power, rate, verify };

struct ExperimentConfig {
  int schema = 1;
  ExperimentKind experiment = ExperimentKind::qq;
  ModelSpec model = ModelSpec::gaussian_iid();
  std::string statistic = "ZA";  // qq/power: ZA, ZB, ZBprime, ZC; rate: h1..h6
  std::vector<int> sizes = {8, 16, 32, 64, 128, 256};
  int replicates = 500;
  std::uint64_t seed = 1;
  std::string output_dir;  // empty: nothing written
  std::string run_name = "run";
  double nominal_level = 0.05;
  double envelope_level = 0.99;
  double rho = 0.5;
  std::string deviation_kind = "f2";  // power: "f2" (power-family f), "alpha", or "none" (model as given)
  std::vector<double> deviations;
  std::uint64_t verify_samples = 40000;
  bool tamper_aut = false;  // verify negative control

  void validate() const;
};

ExperimentKind parse_experiment(std::string_view s);
std::string_view experiment_name(ExperimentKind k);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
nlohmann::json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const nlohmann::json& j);

std::uint64_t replicate_seed(std::uint64_t base_seed, std::string_view tag, int n_total, int replicate);

// Model used at a given deviation of a power experiment.
ModelSpec model_at_deviation(const ExperimentConfig& c, double deviation);
// Statistic value for one replicate network.
double simulate_statistic(const ModelSpec& model, StatisticName stat, const StatisticParams& params, int m, int n,
                          std::uint64_t seed);
StatisticParams null_params(const ModelSpec& model);

struct QQRow {
  int n_total = 0, k = 0;
  double theoretical_q = 0, sample_q = 0, env_lo = 0, env_hi = 0;
};

struct QQResult {
  std::vector<QQRow> rows;
  std::vector<std::string> outputs;
};

// Blom positions and a pointwise Beta order-statistic envelope.
std::vector<QQRow> qq_rows(int n_total, std::vector<double> sample, double envelope_level);
QQResult run_qq(const ExperimentConfig& c);

struct PowerRow {
  int n_total = 0;
  double deviation = 0, reject_rate = 0, ci_lo = 0, ci_hi = 0;
};

struct PowerResult {
  std::vector<PowerRow> rows;
  std::vector<std::string> outputs;
};

PowerResult run_power(const ExperimentConfig& c);

struct RateResult {
  double slope = 0, std_error = 0, intercept = 0;
  std::vector<int> sizes;
  std::vector<double> sds;
  std::vector<std::string> outputs;
};

RateResult run_rate(const ExperimentConfig& c);
// OLS of log sd on log N
RateResult fit_rate(const std::vector<int>& sizes, const std::vector<double>& sds);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double measured = 0;
  double tolerance = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
  std::vector<std::string> outputs;
};

VerifyReport run_verify(const ExperimentConfig& c);

nlohmann::json to_json(const VerifyReport& r);

// Plain numeric CSV, no header, one matrix row per line.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& y);
Eigen::MatrixXd read_matrix_csv(std::istream& is);
nlohmann::json to_json(const RateResult& r);

}  // namespace rcu

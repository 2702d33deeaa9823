#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "rcu/graph_catalog.hpp"
#include "rcu/rng.hpp"

namespace rcu {

struct DegreeFunction {
  enum class Family { constant, power };
  Family family = Family::constant;
  double exponent = 0.0;

  static DegreeFunction constant() { return {}; }
  static DegreeFunction power(double a);
  // "const", "constant" or "power:<a>"
  static DegreeFunction parse(std::string_view text);
  std::string to_string() const;

  double operator()(double u) const {
    return family == Family::constant ? 1.0 : (exponent + 1.0) * std::pow(u, exponent);
  }
};

// Integral of f^k over [0,1].
double moment(const DegreeFunction& f, int k);

// Power exponent a with (a+1)^2/(2a+1) = F2, F2 >= 1.
double power_exponent_for_f2(double f2);

// Mean-one mixing law with variance alpha, sampled from a stream keyed by the edge noise.
struct MixingLaw {
  std::string name = "gamma";
  std::function<double(double alpha, KeyedStream& rng)> draw;
  static MixingLaw gamma();
};

enum class ModelVariant { gaussian_iid, poisson_bedd, overdispersed_poisson_bedd };

ModelVariant parse_variant(std::string_view name);
std::string_view variant_name(ModelVariant v);

struct ModelSpec {
  ModelVariant variant = ModelVariant::gaussian_iid;
  double lambda = 1.0;
  DegreeFunction f, g;
  double alpha = 0.0;
  MixingLaw mixing = MixingLaw::gamma();

  static ModelSpec gaussian_iid();
  static ModelSpec poisson_bedd(double lambda, DegreeFunction f, DegreeFunction g);
  static ModelSpec overdispersed(double lambda, DegreeFunction f, DegreeFunction g, double alpha);

  void validate() const;
  // phi(xi, eta, zeta)
  double realize(double xi, double eta, double zeta) const;
  // Mixing weight W carried by the edge noise (1 outside the overdispersed variant).
  double mixing_weight(double zeta) const;
  std::string describe() const;
};

struct AhkSample {
  int m = 0, n = 0;
  Eigen::VectorXd xi, eta;
  Eigen::MatrixXd zeta;
  Eigen::MatrixXd y;
};

AhkSample sample(const ModelSpec& model, int m, int n, std::uint64_t seed);
// Same Y as sample(model, m, n, seed).y without storing latents.
Eigen::MatrixXd sample_matrix(const ModelSpec& model, int m, int n, std::uint64_t seed);
Eigen::MatrixXd realize_all(const ModelSpec& model, const Eigen::VectorXd& xi, const Eigen::VectorXd& eta,
                            const Eigen::MatrixXd& zeta);
// Keeps the latents of G (labels index rows/cols of base) and redraws the rest.
AhkSample resample_given(const ModelSpec& model, const AhkSample& base, const BipartiteGraph& g, std::uint64_t seed);

double analytic_mean(const ModelSpec& model);
double analytic_variance(const ModelSpec& model);

}  // namespace rcu

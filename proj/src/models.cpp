#include "rcu/models.hpp"

#include <bit>
#include <cstdio>
#include <stdexcept>

#include "rcu/distributions.hpp"

namespace rcu {

DegreeFunction DegreeFunction::power(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("power degree function needs a >= 0");
  return {Family::power, a};
}

DegreeFunction DegreeFunction::parse(std::string_view text) {
  if (text == "const" || text == "constant" || text == "1") return constant();
  if (text.rfind("power:", 0) == 0) {
    std::string rest(text.substr(6));
    std::size_t used = 0;
    double a = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("bad exponent in '" + std::string(text) + "'");
    return power(a);
  }
  throw std::invalid_argument("degree function must be 'const' or 'power:<a>', got '" + std::string(text) + "'");
}

std::string DegreeFunction::to_string() const {
  if (family == Family::constant) return "const";
  char buf[64];
  std::snprintf(buf, sizeof buf, "power:%.17g", exponent);
  return buf;
}

double moment(const DegreeFunction& f, int k) {
  if (k < 1) throw std::invalid_argument("moment order must be >= 1");
  if (f.family == DegreeFunction::Family::constant) return 1.0;
  const double a = f.exponent;
  return std::pow(a + 1.0, k) / (a * k + 1.0);
}

double power_exponent_for_f2(double f2) {
  if (!(f2 >= 1.0)) throw std::invalid_argument("F2 must be at least 1");
  // a^2 + 2(1-F2) a + (1-F2) = 0, positive root
  return (f2 - 1.0) + std::sqrt(f2 * (f2 - 1.0));
}

namespace {

// Marsaglia-Tsang; shape < 1 handled by the usual U^(1/k) boost.
double gamma_unit_scale(double shape, KeyedStream& rng) {
  if (shape < 1.0) {
    double g = gamma_unit_scale(shape + 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

}  // namespace

MixingLaw MixingLaw::gamma() {
  MixingLaw law;
  law.name = "gamma";
  law.draw = [](double alpha, KeyedStream& rng) { return alpha * gamma_unit_scale(1.0 / alpha, rng); };
  return law;
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "gaussian_iid" || name == "gaussian") return ModelVariant::gaussian_iid;
  if (name == "poisson_bedd" || name == "poisson") return ModelVariant::poisson_bedd;
  if (name == "overdispersed_poisson_bedd" || name == "overdispersed") return ModelVariant::overdispersed_poisson_bedd;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::string_view variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::gaussian_iid: return "gaussian_iid";
    case ModelVariant::poisson_bedd: return "poisson_bedd";
    case ModelVariant::overdispersed_poisson_bedd: return "overdispersed_poisson_bedd";
  }
  return "?";
}

ModelSpec ModelSpec::gaussian_iid() { return ModelSpec{}; }

ModelSpec ModelSpec::poisson_bedd(double lambda, DegreeFunction f, DegreeFunction g) {
  ModelSpec m;
  m.variant = ModelVariant::poisson_bedd;
  m.lambda = lambda;
  m.f = f;
  m.g = g;
  m.validate();
  return m;
}

ModelSpec ModelSpec::overdispersed(double lambda, DegreeFunction f, DegreeFunction g, double alpha) {
  ModelSpec m = poisson_bedd(lambda, f, g);
  m.variant = ModelVariant::overdispersed_poisson_bedd;
  m.alpha = alpha;
  m.validate();
  return m;
}

void ModelSpec::validate() const {
  if (variant == ModelVariant::gaussian_iid) return;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("dispersion alpha must be >= 0");
  if (variant == ModelVariant::overdispersed_poisson_bedd && alpha > 0.0 && !mixing.draw)
    throw std::invalid_argument("overdispersed model without a mixing law");
}

double ModelSpec::mixing_weight(double zeta) const {
  if (variant != ModelVariant::overdispersed_poisson_bedd || alpha == 0.0) return 1.0;
  KeyedStream rng(derive(std::bit_cast<std::uint64_t>(zeta), std::uint64_t(2)));
  return mixing.draw(alpha, rng);
}

double ModelSpec::realize(double xi, double eta, double zeta) const {
  switch (variant) {
    case ModelVariant::gaussian_iid:
      return normal_quantile(zeta);
    case ModelVariant::poisson_bedd:
      return static_cast<double>(poisson_quantile(lambda * f(xi) * g(eta), zeta));
    case ModelVariant::overdispersed_poisson_bedd: {
      // both uniforms are functions of zeta's bits
      const double u = to_unit(derive(std::bit_cast<std::uint64_t>(zeta), std::uint64_t(1)));
      return static_cast<double>(poisson_quantile(lambda * f(xi) * g(eta) * mixing_weight(zeta), u));
    }
  }
  return 0.0;
}

std::string ModelSpec::describe() const {
  std::string s(variant_name(variant));
  if (variant == ModelVariant::gaussian_iid) return s;
  char buf[64];
  std::snprintf(buf, sizeof buf, "(lambda=%g", lambda);
  s += buf;
  s += ", f=" + f.to_string() + ", g=" + g.to_string();
  if (variant == ModelVariant::overdispersed_poisson_bedd) {
    std::snprintf(buf, sizeof buf, ", alpha=%g", alpha);
    s += buf;
  }
  return s + ")";
}

Eigen::MatrixXd realize_all(const ModelSpec& model, const Eigen::VectorXd& xi, const Eigen::VectorXd& eta,
                            const Eigen::MatrixXd& zeta) {
  Eigen::MatrixXd y(xi.size(), eta.size());
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) = model.realize(xi(i), eta(j), zeta(i, j));
  return y;
}

AhkSample sample(const ModelSpec& model, int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("sample: m and n must be >= 1");
  model.validate();
  AhkSample s;
  s.m = m;
  s.n = n;
  s.xi.resize(m);
  s.eta.resize(n);
  s.zeta.resize(m, n);
  for (int i = 0; i < m; ++i) s.xi(i) = row_latent(seed, i);
  for (int j = 0; j < n; ++j) s.eta(j) = col_latent(seed, j);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) s.zeta(i, j) = edge_latent(seed, i, j);
  s.y = realize_all(model, s.xi, s.eta, s.zeta);
  return s;
}

Eigen::MatrixXd sample_matrix(const ModelSpec& model, int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("sample: m and n must be >= 1");
  model.validate();
  Eigen::VectorXd xi(m), eta(n);
  for (int i = 0; i < m; ++i) xi(i) = row_latent(seed, i);
  for (int j = 0; j < n; ++j) eta(j) = col_latent(seed, j);
  Eigen::MatrixXd y(m, n);
  if (model.variant == ModelVariant::poisson_bedd) {
    // cache f(xi), g(eta)
    Eigen::VectorXd fx(m), gy(n);
    for (int i = 0; i < m; ++i) fx(i) = model.f(xi(i));
    for (int j = 0; j < n; ++j) gy(j) = model.g(eta(j));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i)
        y(i, j) = static_cast<double>(poisson_quantile(model.lambda * fx(i) * gy(j), edge_latent(seed, i, j)));
    return y;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) y(i, j) = model.realize(xi(i), eta(j), edge_latent(seed, i, j));
  return y;
}

AhkSample resample_given(const ModelSpec& model, const AhkSample& base, const BipartiteGraph& g, std::uint64_t seed) {
  for (int a = 0; a < g.rows(); ++a)
    if (g.row_label(a) >= base.m) throw std::out_of_range("resample_given: row label out of range");
  for (int b = 0; b < g.cols(); ++b)
    if (g.col_label(b) >= base.n) throw std::out_of_range("resample_given: column label out of range");
  AhkSample fresh = sample(model, base.m, base.n, seed);
  for (int a = 0; a < g.rows(); ++a) fresh.xi(g.row_label(a)) = base.xi(g.row_label(a));
  for (int b = 0; b < g.cols(); ++b) fresh.eta(g.col_label(b)) = base.eta(g.col_label(b));
  for (int a = 0; a < g.rows(); ++a)
    for (int b = 0; b < g.cols(); ++b)
      if (g.has_edge(a, b)) fresh.zeta(g.row_label(a), g.col_label(b)) = base.zeta(g.row_label(a), g.col_label(b));
  fresh.y = realize_all(model, fresh.xi, fresh.eta, fresh.zeta);
  return fresh;
}

double analytic_mean(const ModelSpec& model) {
  return model.variant == ModelVariant::gaussian_iid ? 0.0 : model.lambda;
}

double analytic_variance(const ModelSpec& model) {
  if (model.variant == ModelVariant::gaussian_iid) return 1.0;
  const double l = model.lambda, f2 = moment(model.f, 2), g2 = moment(model.g, 2);
  const double a = model.variant == ModelVariant::overdispersed_poisson_bedd ? model.alpha : 0.0;
  return l * l * (f2 * g2 * (a + 1.0) - 1.0) + l;
}

}  // namespace rcu

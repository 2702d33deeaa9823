// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "rcu/accumulate.hpp"
#include "rcu/asymptotics.hpp"
#include "rcu/decomposition.hpp"
#include "rcu/distributions.hpp"
#include "rcu/experiments.hpp"
#include "rcu/ustat.hpp"

using namespace rcu;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  if (!out.pass) ++failures;
  std::printf("%s %2d %s:%s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, title.c_str(), out.detail.str().c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

GraphClass k12_class() {
  for (const auto& g : enumerate_gamma(1, 2))
    if (g.representative == BipartiteGraph::complete(1, 2)) return g;
  throw std::logic_error("K12 missing from catalog");
}

const DegreeFunction p1 = DegreeFunction::power(1.0);
const DegreeFunction p_sqrt2 = DegreeFunction::power(1.0 + std::sqrt(2.0));

ModelSpec zb_model() { return ModelSpec::poisson_bedd(1.0, DegreeFunction::constant(), p_sqrt2); }
ModelSpec zc_model() { return ModelSpec::overdispersed(1.0, p1, p1, 0.0); }

}  // namespace

int main() {
  criterion(1, "catalog counts", [](Outcome& o) {
    const auto t0 = Clock::now();
    const auto l2 = enumerate_gamma(2, 0).size() + enumerate_gamma(0, 2).size() + enumerate_gamma(1, 1).size();
    const auto l3 = enumerate_gamma(2, 1).size() + enumerate_gamma(1, 2).size();
    const double t = seconds_since(t0);
    o.detail << " level 2: " << l2 << ", level 3: " << l3 << ", " << t << " s";
    o.require(l2 == 4, "level 2 count");
    o.require(l3 == 6, "level 3 count");
    o.require(t < 1.0, "runtime");
  });

  criterion(2, "automorphisms and orbit identity", [](Outcome& o) {
    const auto a12 = automorphism_count(BipartiteGraph::complete(1, 2));
    const auto a11 = automorphism_count(BipartiteGraph::complete(1, 1));
    long bad = 0;
    for (int r = 0; r <= 3; ++r)
      for (int c = 0; c <= 3; ++c) {
        std::uint64_t total = 0;
        for (const auto& g : enumerate_gamma(r, c)) total += factorial(r) * factorial(c) / g.aut_count;
        if (total != (std::uint64_t{1} << (r * c))) ++bad;
      }
    o.detail << " |Aut K12| = " << a12 << ", |Aut K11| = " << a11 << ", orbit mismatches " << bad;
    o.require(a12 == 2 && a11 == 1, "Aut values");
    o.require(bad == 0, "orbit identity");
  });

  criterion(3, "pair coincidence brute force", [](Outcome& o) {
    const auto t0 = Clock::now();
    long cases = 0, bad = 0;
    for (int m = 1; m <= 5; ++m)
      for (int n = 1; n <= 5; ++n)
        for (int p = 0; p <= std::min(2, m); ++p)
          for (int q = 0; q <= std::min(2, n); ++q)
            for (int r = 0; r <= p; ++r)
              for (int c = 0; c <= q; ++c)
                for (const auto& g : enumerate_gamma(r, c)) {
                  const auto x = pair_coincidence_count(m, n, p, q, g);
                  ++cases;
                  bad += x.brute_force != x.closed_form;
                }
    const double t = seconds_since(t0);
    o.detail << " " << cases << " cases, " << bad << " mismatches, " << t << " s";
    o.require(bad == 0, "identity");
    o.require(t < 30.0, "runtime");
  });

  criterion(4, "degree function moments", [](Outcome& o) {
    const double e1 = std::fabs(moment(p_sqrt2, 2) - 2.0);
    const double e2 = std::fabs(moment(p1, 2) - 4.0 / 3.0);
    const double e3 = std::fabs(moment(p1, 3) - 2.0);
    const double worst = std::max({e1, e2, e3});
    o.detail << " max error " << worst;
    o.require(worst <= 1e-12, "tolerance 1e-12");
  });

  criterion(5, "projection second moment oracles", [](Outcome& o) {
    const GraphClass k12 = k12_class();
    struct Case {
      const char* name;
      ModelSpec model;
      Builtin kernel;
      double target;
    };
    const Case cases[] = {
        {"h1", ModelSpec::gaussian_iid(), Builtin::h1, 1.0},
        {"h3", ModelSpec::poisson_bedd(1.0, DegreeFunction::constant(), p1), Builtin::h3, 0.25},
    };
    for (const auto& c : cases) {
      const auto t0 = Clock::now();
      const auto est = projection_second_moment(c.model, builtin(c.kernel), k12, 100000, 1, 4);
      const double t = seconds_since(t0);
      const double z = (est.value - c.target) / est.std_error;
      o.detail << " " << c.name << ": " << est.value << " +- " << est.std_error << " vs " << c.target << " (z " << z
               << ", " << t << " s);";
      o.require(std::fabs(z) <= 3.0, std::string(c.name) + " within 3 SE");
      o.require(t < 60.0, std::string(c.name) + " runtime");
    }
  });

  criterion(6, "asymptotic variances", [](Outcome& o) {
    const double s1 = sigma1_squared(0.5), s3 = sigma3_squared(1.0, 0.5), s6 = sigma6_squared(1.0, p1, p1, 0.5);
    o.detail << " sigma1^2 " << s1 << ", sigma3^2 " << s3 << ", sigma6^2 " << s6 << ";";
    o.require(s1 == 16.0, "sigma1^2 = 16");
    o.require(s3 == 16.0, "sigma3^2 = 16");
    o.require(std::fabs(s6 - 1168.0 / 81.0) <= 1e-12, "sigma6^2 = 1168/81");

    // N^d Var[U_N] at N = 256, K = 500
    struct Case {
      const char* name;
      ModelSpec model;
      Builtin kernel;
      int d;
      double sigma2;
    };
    const Case cases[] = {
        {"h1", ModelSpec::gaussian_iid(), Builtin::h1, 3, s1},
        {"h3", ModelSpec::poisson_bedd(1.0, DegreeFunction::constant(), p1), Builtin::h3, 3, s3},
        {"h6", zc_model(), Builtin::h6, 2, s6},
    };
    const int n_total = 256, reps = 500;
    for (const auto& c : cases) {
      RunningMoments acc;
      const std::string tag = std::string("acceptance:") + c.name;
      for (int r = 0; r < reps; ++r)
        acc.add(u_builtin(c.kernel, sample_matrix(c.model, n_total / 2, n_total / 2, replicate_seed(1, tag, n_total, r))));
      const double scaled = std::pow(double(n_total), c.d) * acc.variance();
      const double rel = scaled / c.sigma2 - 1.0;
      o.detail << " " << c.name << " N^" << c.d << " Var = " << scaled << " (" << 100 * rel << "%);";
      o.require(std::fabs(rel) <= 0.15, std::string(c.name) + " empirical variance within 15%");
    }
  });

  criterion(7, "principal support detection", [](Outcome& o) {
    struct Case {
      const char* name;
      ModelSpec model;
      Builtin kernel;
      int d;
      BipartiteGraph graph;
    };
    const Case cases[] = {
        {"h1", ModelSpec::gaussian_iid(), Builtin::h1, 3, BipartiteGraph::complete(1, 2)},
        {"h3", ModelSpec::poisson_bedd(1.0, DegreeFunction::constant(), p1), Builtin::h3, 3,
         BipartiteGraph::complete(1, 2)},
        {"h6", zc_model(), Builtin::h6, 2, BipartiteGraph::complete(1, 1)},
    };
    const auto t0 = Clock::now();
    for (const auto& c : cases) {
      const auto rep = detect_principal_support(c.model, builtin(c.kernel), SupportPolicy{});
      o.detail << " " << c.name << ": d = " << rep.principal_degree << " {";
      for (std::size_t i = 0; i < rep.support.size(); ++i)
        o.detail << (i ? ", " : "") << rep.support[i].graph_class.representative.describe() << " z "
                 << rep.support[i].z;
      o.detail << "};";
      const bool ok = rep.found && rep.principal_degree == c.d && rep.support.size() == 1 &&
                      rep.support[0].graph_class.representative == c.graph && rep.all_connected;
      o.require(ok, std::string(c.name) + " verdict");
    }
    const double t = seconds_since(t0);
    o.require(t < 600.0, "runtime");
  });

  criterion(8, "rate slopes", [](Outcome& o) {
    struct Case {
      const char* name;
      ModelSpec model;
      const char* kernel;
      double slope;
    };
    const Case cases[] = {
        {"h1/gaussian", ModelSpec::gaussian_iid(), "h1", -1.5},
        {"h6/overdispersed", zc_model(), "h6", -1.0},
        {"h1/poisson", ModelSpec::poisson_bedd(1.0, p1, p1), "h1", -0.5},
    };
    const auto t0 = Clock::now();
    for (const auto& c : cases) {
      ExperimentConfig cfg;
      cfg.experiment = ExperimentKind::rate;
      cfg.model = c.model;
      cfg.statistic = c.kernel;
      cfg.sizes = {64, 128, 256, 512};
      cfg.replicates = 500;
      const auto r = run_rate(cfg);
      o.detail << " " << c.name << ": " << r.slope << " +- " << r.std_error << " (target " << c.slope << ");";
      o.require(std::fabs(r.slope - c.slope) <= 0.15, std::string(c.name) + " slope");
    }
    o.require(seconds_since(t0) < 1200.0, "runtime");
  });

  criterion(9, "normality of ZA, ZB, ZC at N = 256", [](Outcome& o) {
    struct Case {
      const char* name;
      ModelSpec model;
    };
    const Case cases[] = {{"ZA", ModelSpec::gaussian_iid()}, {"ZB", zb_model()}, {"ZC", zc_model()}};
    for (const auto& c : cases) {
      int passed = 0;
      double min_p = 1.0;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ExperimentConfig cfg;
        cfg.experiment = ExperimentKind::qq;
        cfg.model = c.model;
        cfg.statistic = c.name;
        cfg.sizes = {256};
        cfg.replicates = 500;
        cfg.seed = seed;
        const auto r = run_qq(cfg);
        std::vector<double> z;
        for (const auto& row : r.rows) z.push_back(row.sample_q);
        const auto ks = ks_test_normal(z);
        min_p = std::min(min_p, ks.p_value);
        passed += ks.p_value >= 0.01;
      }
      o.detail << " " << c.name << ": " << passed << "/10 (min p " << min_p << ");";
      o.require(passed >= 9, std::string(c.name) + " KS");
    }
  });

  criterion(10, "exact identities", [](Outcome& o) {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::verify;
    const auto rep = run_verify(cfg);
    for (const auto& ch : rep.checks) {
      if (ch.name != "telescoping" && ch.name != "ordered_unordered_identity" && ch.name != "u_fast_vs_exact" &&
          ch.name != "permutation_invariance")
        continue;
      o.detail << " " << ch.name << " " << ch.measured << ";";
      o.require(ch.pass, ch.name);
    }
    // every shape up to 4x4, integer entries so sums are exact
    KeyedStream rng(derive(5, 10));
    long diffs = 0;
    for (int b = 0; b < 6; ++b) {
      const KernelSpec k = builtin(static_cast<Builtin>(b));
      for (int m = k.p(); m <= 4; ++m)
        for (int n = k.q(); n <= 4; ++n) {
          Eigen::MatrixXd y(m, n);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) y(i, j) = double(rng.bits() % 7);
          const double base = u_exact(k, y).value;
          for (const auto& rp : permutations(m))
            for (const auto& cp : permutations(n)) {
              Eigen::MatrixXd z(m, n);
              for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) z(rp[i], cp[j]) = y(i, j);
              diffs += u_exact(k, z).value != base;
            }
        }
    }
    o.detail << " permutation differences over all shapes <= 4x4: " << diffs;
    o.require(diffs == 0, "permutation invariance for all shapes");
  });

  criterion(11, "unbalanced regimes", [](Outcome& o) {
    using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
    const auto regime = SizeRegime::power(1.0, 0.5);
    Mask a = Mask::Constant(2, 4, false);
    a(1, 0) = a(0, 2) = true;
    Mask b = Mask::Constant(2, 4, false);
    b(1, 1) = b(0, 3) = true;
    const auto ga = unbalanced_principal(a, Eigen::ArrayXXd::Ones(2, 4), regime).gamma_exponent;
    const auto gb = unbalanced_principal(b, Eigen::ArrayXXd::Ones(2, 4), regime).gamma_exponent;
    o.detail << " gamma exponents " << ga << " and " << gb;
    o.require(ga == 1.0, "first example");
    o.require(gb == 1.5, "second example");
  });

  criterion(12, "power behavior", [](Outcome& o) {
    auto power = [](const ModelSpec& model, const char* stat, const char* kind, std::vector<double> devs,
                    std::vector<int> sizes) {
      ExperimentConfig cfg;
      cfg.experiment = ExperimentKind::power;
      cfg.model = model;
      cfg.statistic = stat;
      cfg.deviation_kind = kind;
      cfg.deviations = std::move(devs);
      cfg.sizes = std::move(sizes);
      cfg.replicates = 500;
      return run_power(cfg).rows;
    };
    auto null_ok = [&](const char* name, const PowerRow& r) {
      o.detail << " " << name << " null at N=" << r.n_total << ": " << r.reject_rate << ";";
      o.require(r.reject_rate >= 0.03 && r.reject_rate <= 0.08, std::string(name) + " null rate");
    };
    auto monotone = [&](const char* name, const std::vector<PowerRow>& rows, double dev) {
      std::vector<PowerRow> alt;
      for (const auto& r : rows)
        if (r.deviation == dev) alt.push_back(r);
      o.detail << " " << name << " alternative:";
      for (const auto& r : alt) o.detail << " " << r.reject_rate;
      o.detail << ";";
      for (std::size_t i = 1; i < alt.size(); ++i)
        o.require(alt[i].reject_rate >= alt[i - 1].reject_rate || alt[i].ci_hi >= alt[i - 1].ci_lo,
                  std::string(name) + " nondecreasing in N");
    };
    const std::vector<int> sizes = {64, 256, 512};

    null_ok("ZA", power(ModelSpec::gaussian_iid(), "ZA", "none", {0.0}, {256})[0]);
    const auto zb = power(zb_model(), "ZB", "f2", {1.0, 1.2}, sizes);
    for (const auto& r : zb)
      if (r.deviation == 1.0 && r.n_total == 256) null_ok("ZB", r);
    monotone("ZB F2=1.2", zb, 1.2);
    const auto zc = power(zc_model(), "ZC", "alpha", {0.0, 0.1}, sizes);
    for (const auto& r : zc)
      if (r.deviation == 0.0 && r.n_total == 256) null_ok("ZC", r);
    monotone("ZC alpha=0.1", zc, 0.1);
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

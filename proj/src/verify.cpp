#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rcu/analytic.hpp"
#include "rcu/decomposition.hpp"
#include "rcu/experiments.hpp"
#include "rcu/ustat.hpp"

namespace rcu {

namespace {

struct Collector {
  std::vector<VerifyCheck> checks;
  void add(std::string name, bool pass, double measured, double tol, std::string detail = {}) {
    checks.push_back({std::move(name), pass, measured, tol, std::move(detail)});
  }
};

int popcount(unsigned x) { return std::popcount(x); }

// Mobius function of the subgraph lattice, from the structure of the interval:
// (-1)^{|G \ F|} when the removed nodes and edges form an antichain, else 0.
long mobius_oracle(const LatentSet& f, const LatentSet& g, int frame_cols) {
  const unsigned dr = g.rows & ~f.rows, dc = g.cols & ~f.cols;
  const unsigned de = g.edges & ~f.edges;
  for (int i = 0; i < kMaxRows; ++i)
    for (int j = 0; j < frame_cols; ++j)
      if ((de >> (i * frame_cols + j)) & 1u)
        if (((dr >> i) & 1u) || ((dc >> j) & 1u)) return 0;  // removed edge above a removed node
  const int size = popcount(dr) + popcount(dc) + popcount(de);
  return size % 2 ? -1 : 1;
}

Eigen::MatrixXd random_matrix(KeyedStream& rng, int m, int n, bool integer) {
  Eigen::MatrixXd y(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) y(i, j) = integer ? std::floor(5.0 * rng.uniform()) : rng.normal();
  return y;
}

}  // namespace

VerifyReport run_verify(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Collector out;
  const std::uint64_t seed = cfg.seed;
  const std::uint64_t mc = std::max<std::uint64_t>(cfg.verify_samples, 1000);

  // --- catalog
  {
    std::size_t l2 = enumerate_gamma(2, 0).size() + enumerate_gamma(0, 2).size() + enumerate_gamma(1, 1).size();
    out.add("catalog_count_level2", l2 == 4, double(l2), 0, "|G20|+|G02|+|G11|, expected 4");
    std::size_t l3 = enumerate_gamma(2, 1).size() + enumerate_gamma(1, 2).size();
    out.add("catalog_count_level3", l3 == 6, double(l3), 0, "|G21|+|G12|, expected 6");
    const auto a12 = automorphism_count(BipartiteGraph::complete(1, 2));
    const auto a11 = automorphism_count(BipartiteGraph::complete(1, 1));
    const auto a22 = automorphism_count(BipartiteGraph::complete(2, 2));
    out.add("aut_K12", a12 == 2, double(a12), 0);
    out.add("aut_K11", a11 == 1, double(a11), 0);
    out.add("aut_K22", a22 == 4, double(a22), 0);

    double worst = 0;
    for (int r = 0; r <= 3; ++r)
      for (int c = 0; c <= 3; ++c) {
        double s = 0;
        for (const auto& gc : enumerate_gamma(r, c)) s += double(factorial(r) * factorial(c)) / double(gc.aut_count);
        worst = std::max(worst, std::fabs(s - std::ldexp(1.0, r * c)));
      }
    out.add("orbit_identity_r_c_le_3", worst == 0.0, worst, 0, "max |sum r!c!/|Aut| - 2^{rc}|");

    long bad = 0;
    for (int r = 0; r <= 3; ++r)
      for (int c = 0; c <= 3; ++c) {
        auto rps = permutations(r), cps = permutations(c);
        for (unsigned m = 0; m < (1u << (r * c)); ++m) {
          const BipartiteGraph g(r, c, static_cast<EdgeMask>(m));
          const auto canon = canonical_form(g);
          for (const auto& rp : rps)
            for (const auto& cp : cps)
              if (!(canonical_form(g.permuted(rp, cp)) == canon)) ++bad;
        }
      }
    out.add("canonical_form_invariance", bad == 0, double(bad), 0, "violations over all graphs and permutations, r,c <= 3");

    long mismatch = 0;
    for (int p = 0; p <= 2; ++p)
      for (int q = 0; q <= 2; ++q) {
        const auto subs = labeled_subgraphs(BipartiteGraph::complete(p, q));
        for (int r = 0; r <= p; ++r)
          for (int c = 0; c <= q; ++c)
            for (const auto& gc : enumerate_gamma(r, c)) {
              std::uint64_t count = 0;
              for (const auto& s : subs)
                if (s.rows() == r && s.cols() == c && canonical_form(s.unlabeled()) == gc.representative) ++count;
              const std::uint64_t expect =
                  factorial(r) * binomial(p, r) * factorial(c) * binomial(q, c) / gc.aut_count;
              if (count != expect) ++mismatch;
            }
      }
    out.add("subgraph_count_identity", mismatch == 0, double(mismatch), 0, "p,q <= 2");

    const auto n47 = labeled_subgraphs(BipartiteGraph::complete(2, 2)).size();
    out.add("labeled_subgraphs_K22", n47 == 47, double(n47), 0);

    long failures = 0, cases = 0;
    for (int m = 1; m <= 5; ++m)
      for (int n = 1; n <= 5; ++n)
        for (int p = 0; p <= std::min(2, m); ++p)
          for (int q = 0; q <= std::min(2, n); ++q) {
            if (p == 0 && q == 0) continue;
            for (int r = 0; r <= p; ++r)
              for (int c = 0; c <= q; ++c)
                for (const auto& gc : enumerate_gamma(r, c)) {
                  const auto res = pair_coincidence_count(m, n, p, q, gc, cfg.tamper_aut ? gc.aut_count + 1 : 0);
                  ++cases;
                  if (res.brute_force != res.closed_form) ++failures;
                }
          }
    out.add("pair_coincidence", failures == 0, double(failures), 0,
            std::to_string(cases) + " cases, m,n <= 5, p,q <= 2" + (cfg.tamper_aut ? " (tampered Aut)" : ""));
  }

  // --- projection plans
  {
    long bad = 0;
    const LatentSet k22{3, 3, 0xf};
    for (const auto& g : latent_subsets(k22, 2, 2)) {
      const auto plan = projection_plan(g, 2, 2);
      std::set<std::tuple<int, int, int>> seen;
      for (const auto& t : plan.terms) {
        seen.insert({t.subgraph.rows, t.subgraph.cols, t.subgraph.edges});
        if (t.coefficient != mobius_oracle(t.subgraph, g, 2)) ++bad;
      }
      for (const auto& f : latent_subsets(g, 2, 2))
        if (!seen.count({f.rows, f.cols, f.edges}) && mobius_oracle(f, g, 2) != 0) ++bad;
    }
    out.add("plan_coefficients_mobius", bad == 0, double(bad), 0, "all targets G in K22");

    double worst = 0;
    const ModelSpec models[] = {
        ModelSpec::gaussian_iid(),
        ModelSpec::poisson_bedd(1.0, DegreeFunction::power(1.0), DegreeFunction::power(1.0 + std::sqrt(2.0))),
        ModelSpec::overdispersed(1.0, DegreeFunction::power(1.0), DegreeFunction::power(1.0), 0.5)};
    for (const auto& model : models)
      for (int b = 0; b < 6; ++b)
        worst = std::max(worst, telescoping_check(builtin(static_cast<Builtin>(b)), model, seed + b));
    out.add("telescoping", worst <= 1e-10, worst, 1e-10, "max residual, h1..h6 x 3 models");

    // orthogonality and annihilation, h1 under a non-degenerate Poisson model
    const KernelSpec h1 = builtin(Builtin::h1);
    const ModelSpec pm = ModelSpec::poisson_bedd(1.0, DegreeFunction::power(1.0), DegreeFunction::power(1.0));
    const LatentSet empty{0, 0, 0}, row{1, 0, 0}, col1{0, 1, 0}, rc1{1, 1, 0}, k11{1, 1, 1}, k12{1, 3, 3},
        k12a{1, 3, 1};
    const std::pair<LatentSet, LatentSet> pairs[] = {{row, rc1}, {k11, k12}, {k12a, k12}, {row, col1}, {empty, row}};
    double worst_z = 0;
    for (std::size_t i = 0; i < std::size(pairs); ++i) {
      const auto est = projection_cross_moment(pm, h1, pairs[i].first, pairs[i].second, mc, derive(seed, 100 + i));
      worst_z = std::max(worst_z, est.std_error > 0 ? std::fabs(est.value) / est.std_error : 0.0);
    }
    out.add("orthogonality", worst_z <= 3.0, worst_z, 3.0, "max |z| of E[p^F1 p^F2], F1 != F2");

    const std::pair<LatentSet, LatentSet> probes[] = {{k11, rc1}, {k12, k11}, {rc1, row}, {k12a, rc1}};
    worst_z = 0;
    for (std::size_t i = 0; i < std::size(probes); ++i) {
      const auto est = projection_probe_moment(pm, h1, probes[i].first, probes[i].second, mc, derive(seed, 200 + i));
      worst_z = std::max(worst_z, est.std_error > 0 ? std::fabs(est.value) / est.std_error : 0.0);
    }
    out.add("projection_annihilation", worst_z <= 3.0, worst_z, 3.0, "max |z| of E[p^F g(H(F'))], F' < F");
  }

  // --- U-statistics
  {
    KeyedStream rng(derive(seed, tag_hash("verify:ustat")));
    double worst = 0;
    for (int b = 0; b < 6; ++b) {
      const KernelSpec k = builtin(static_cast<Builtin>(b));
      for (int t = 0; t < 50; ++t) {
        const int m = k.p() + static_cast<int>(rng.uniform() * (13 - k.p()));
        const int n = k.q() + static_cast<int>(rng.uniform() * (13 - k.q()));
        const Eigen::MatrixXd y = random_matrix(rng, m, n, t % 2 == 0);
        const double exact = u_exact(k, y).value, fast = u_fast(static_cast<Builtin>(b), y).value;
        worst = std::max(worst, std::fabs(fast - exact) / std::max(1.0, std::fabs(exact)));
      }
    }
    out.add("u_fast_vs_exact", worst <= 1e-10, worst, 1e-10, "max |fast-exact|/max(1,|exact|), 300 matrices");

    const KernelSpec corner = make_kernel("y11", 2, 2, [](const SubMatrix& y) { return y(0, 0); });
    const KernelSpec lopsided =
        make_kernel("lopsided", 2, 2, [](const SubMatrix& y) { return y(0, 0) * y(0, 0) * y(1, 1) - 2.0 * y(0, 1); });
    double ou = 0;
    for (int t = 0; t < 10; ++t) {
      const Eigen::MatrixXd y = random_matrix(rng, 4 + t % 2, 5, false);
      for (const auto* k : {&corner, &lopsided})
        ou = std::max(ou, std::fabs(u_ordered(*k, y).value - u_exact(symmetrize(*k), y).value));
    }
    out.add("ordered_unordered_identity", ou <= 1e-12 && !corner.symmetric(), ou, 1e-12);

    long diffs = 0;
    for (int b = 0; b < 6; ++b) {
      const KernelSpec k = builtin(static_cast<Builtin>(b));
      const Eigen::MatrixXd y = random_matrix(rng, 4, 4, true);
      const double base = u_exact(k, y).value;
      for (const auto& rp : permutations(4))
        for (const auto& cp : permutations(4)) {
          Eigen::MatrixXd z(4, 4);
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) z(rp[i], cp[j]) = y(i, j);
          if (u_exact(k, z).value != base) ++diffs;
        }
    }
    out.add("permutation_invariance", diffs == 0, double(diffs), 0, "exact equality, 4x4, all 576 permutation pairs");
  }

  // --- moments and closed forms
  {
    const double s2 = 1.0 + std::sqrt(2.0);
    double err = std::fabs(moment(DegreeFunction::power(s2), 2) - 2.0);
    err = std::max(err, std::fabs(moment(DegreeFunction::power(1.0), 2) - 4.0 / 3.0));
    err = std::max(err, std::fabs(moment(DegreeFunction::power(1.0), 3) - 2.0));
    out.add("degree_moments_closed_form", err <= 1e-12, err, 1e-12);

    boost::math::quadrature::tanh_sinh<double> integrator;
    double qerr = 0;
    for (double a : {0.0, 0.5, 1.0, s2, 3.0})
      for (int k = 1; k <= 4; ++k) {
        const DegreeFunction f = DegreeFunction::power(a);
        const double num = integrator.integrate([&](double u) { return std::pow(f(u), k); }, 0.0, 1.0);
        qerr = std::max(qerr, std::fabs(num - moment(f, k)) / moment(f, k));
      }
    out.add("degree_moments_quadrature", qerr <= 1e-10, qerr, 1e-10, "relative, tanh-sinh");

    const double s1 = sigma1_squared(0.5), s3 = sigma3_squared(1.0, 0.5);
    const double s6 = sigma6_squared(1.0, DegreeFunction::power(1.0), DegreeFunction::power(1.0), 0.5);
    double e = std::max({std::fabs(s1 - 16.0), std::fabs(s3 - 16.0), std::fabs(s6 - 1168.0 / 81.0)});
    // same quantities assembled from the V table entries
    const VTableBudget closed{1000, seed, true};
    const VTable va = v_table(ModelSpec::gaussian_iid(), builtin(Builtin::h1), closed);
    const VTable vb = v_table(ModelSpec::poisson_bedd(1.0, DegreeFunction::constant(), DegreeFunction::power(s2)),
                              builtin(Builtin::h3), VTableBudget{2000, seed, true});
    const VTable vc = v_table(ModelSpec::overdispersed(1.0, DegreeFunction::power(1.0), DegreeFunction::power(1.0), 0.0),
                              builtin(Builtin::h6), VTableBudget{2000, seed, true});
    e = std::max({e, std::fabs(sigma_squared_balanced(va, 3, 0.5) - s1), std::fabs(sigma_squared_balanced(vb, 3, 0.5) - s3),
                  std::fabs(sigma_squared_balanced(vc, 2, 0.5) - s6)});
    out.add("sigma_closed_forms", e <= 1e-12, e, 1e-12, "sigma1^2 = sigma3^2 = 16, sigma6^2 = 1168/81 at rho = 1/2");

    const VTable mc_a = v_table(ModelSpec::gaussian_iid(), builtin(Builtin::h1), VTableBudget{mc, seed + 7, false});
    const double z = (mc_a.value(1, 2) - 2.0) / mc_a.std_error(1, 2);
    out.add("sigma1_monte_carlo", std::fabs(z) <= 3.0, mc_a.value(1, 2), 3.0,
            "V(1,2) for h1 under Gaussian entries, closed form 2, z = " + std::to_string(z));

    AnalyticInputs in;
    in.f = DegreeFunction::power(0.5);
    in.g = DegreeFunction::power(1.0);
    const auto est3 = cond_exp_pair_moment(ModelSpec::poisson_bedd(1.0, in.f, in.g), builtin(Builtin::h3), {1, 3, 3},
                                           {1, 3, 3}, mc, derive(seed, 300));
    const double v3 = analytic_cond_exp(AnalyticId::h3_k12_second_moment, in);
    const double z3 = (est3.value - v3) / est3.std_error;
    out.add("h3_second_moment_oracle", std::fabs(z3) <= 3.0, est3.value, 3.0,
            "E[E[h3|K12]^2] vs closed form " + std::to_string(v3) + ", z = " + std::to_string(z3));

    in.f = DegreeFunction::power(1.0);
    const auto est6 = cond_exp_pair_moment(ModelSpec::poisson_bedd(1.0, in.f, in.g), builtin(Builtin::h6), {1, 1, 1},
                                           {1, 1, 1}, mc, derive(seed, 301));
    const double v6 = analytic_cond_exp(AnalyticId::h6_k11_second_moment, in);
    const double z6 = (est6.value - v6) / est6.std_error;
    out.add("h6_second_moment_oracle", std::fabs(z6) <= 3.0, est6.value, 3.0,
            "E[E[h6|K11]^2] vs closed form " + std::to_string(v6) + ", z = " + std::to_string(z6));
  }

  VerifyReport report;
  report.checks = std::move(out.checks);
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / (cfg.run_name + ".json");
    std::ofstream f(path, std::ios::binary);
    f << to_json(report).dump(2) << "\n";
    report.outputs.push_back(path.filename().string());
    nlohmann::json m;
    m["config"] = config_to_json(cfg);
    m["seed"] = cfg.seed;
    m["version"] = std::string(kVersion);
    m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m["outputs"] = report.outputs;
    std::ofstream mf(std::filesystem::path(cfg.output_dir) / (cfg.run_name + ".manifest.json"), std::ios::binary);
    mf << m.dump(2) << "\n";
  }
  return report;
}

}  // namespace rcu

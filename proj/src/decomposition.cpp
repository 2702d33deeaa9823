#include "rcu/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "rcu/accumulate.hpp"
#include "rcu/distributions.hpp"
#include "rcu/ustat.hpp"

namespace rcu {

namespace {

int frame_extent(const std::vector<int>& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

int set_size(const LatentSet& s) {
  return std::popcount(unsigned(s.rows)) + std::popcount(unsigned(s.cols)) + std::popcount(unsigned(s.edges));
}

constexpr std::uint64_t kChunk = 2048;

// Mean of i.i.d. replicate values; replicate r uses the stream derive(key, r), so
// the result does not depend on how chunks are scheduled.
template <typename Replicate>
MomentEstimate replicate_mean(std::uint64_t samples, std::uint64_t key, Replicate&& one, std::string estimand) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo estimate needs at least 2 samples");
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<RunningMoments> parts(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::uint64_t lo = std::uint64_t(c) * kChunk, hi = std::min(samples, lo + kChunk);
    RunningMoments acc;
    for (std::uint64_t r = lo; r < hi; ++r) {
      KeyedStream rng(derive(key, r));
      acc.add(one(rng));
    }
    parts[c] = acc;
  }
  RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return {total.mean(), total.std_error(), total.count(), std::move(estimand)};
}

void check_frame(int rows, int cols) {
  if (rows < 0 || cols < 0 || rows > kMaxRows || cols > kMaxCols) throw SizeLimitError("latent frame beyond 4x4");
}

void check_in_frame(const LatentSet& s, int rows, int cols) {
  const LatentSet full{static_cast<std::uint8_t>((1u << rows) - 1), static_cast<std::uint8_t>((1u << cols) - 1),
                       full_mask(rows, cols)};
  if (!subset_of(s, full)) throw std::invalid_argument("labeled subgraph outside the index universe");
}

LatentSet full_set(int rows, int cols) {
  return {static_cast<std::uint8_t>((1u << rows) - 1), static_cast<std::uint8_t>((1u << cols) - 1),
          full_mask(rows, cols)};
}

std::string set_label(const LatentSet& s, int frame_cols) { return to_graph(s, frame_cols).describe(); }

}  // namespace

ProjectionPlan projection_plan(const LatentSet& s, int frame_rows, int frame_cols) {
  check_frame(frame_rows, frame_cols);
  check_in_frame(s, frame_rows, frame_cols);
  auto subs = latent_subsets(s, frame_rows, frame_cols);
  if (subs.size() > kMaxPlanSubgraphs)
    throw SizeLimitError("projection plan over " + std::to_string(subs.size()) + " labeled subgraphs exceeds the cap of " +
                         std::to_string(kMaxPlanSubgraphs));
  // Coefficient of E[X|H(F)] in p^G solves the recursion from the top:
  // c_G = 1 and c_F = -sum_{F < H <= G} c_H.
  std::stable_sort(subs.begin(), subs.end(),
                   [](const LatentSet& a, const LatentSet& b) { return set_size(a) > set_size(b); });
  std::vector<long> coef(subs.size(), 0);
  for (std::size_t a = 0; a < subs.size(); ++a) {
    if (a == 0) {
      coef[a] = 1;
      continue;
    }
    long acc = 0;
    for (std::size_t b = 0; b < a; ++b)
      if (set_size(subs[b]) > set_size(subs[a]) && subset_of(subs[a], subs[b])) acc += coef[b];
    coef[a] = -acc;
  }
  ProjectionPlan plan;
  plan.target = to_graph(s, frame_cols);
  plan.frame_rows = frame_rows;
  plan.frame_cols = frame_cols;
  for (std::size_t a = subs.size(); a-- > 0;)
    if (coef[a] != 0) plan.terms.push_back({subs[a], coef[a]});
  return plan;
}

ProjectionPlan projection_plan(const BipartiteGraph& g, int frame_rows, int frame_cols) {
  for (int i = 0; i < g.rows(); ++i)
    if (g.row_label(i) >= frame_rows) throw std::invalid_argument("row label outside the frame");
  for (int j = 0; j < g.cols(); ++j)
    if (g.col_label(j) >= frame_cols) throw std::invalid_argument("column label outside the frame");
  return projection_plan(to_latent_set(g, frame_cols), frame_rows, frame_cols);
}

ProjectionPlan projection_plan(const BipartiteGraph& g) {
  std::vector<int> rl, cl;
  for (int i = 0; i < g.rows(); ++i) rl.push_back(g.row_label(i));
  for (int j = 0; j < g.cols(); ++j) cl.push_back(g.col_label(j));
  return projection_plan(g, frame_extent(rl), frame_extent(cl));
}

LatentFrame LatentFrame::draw(int rows, int cols, KeyedStream& rng) {
  LatentFrame f;
  for (int i = 0; i < rows; ++i) f.xi[i] = rng.uniform();
  for (int j = 0; j < cols; ++j) f.eta[j] = rng.uniform();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) f.zeta[i * kMaxCols + j] = rng.uniform();
  return f;
}

LatentFrame LatentFrame::merge(const LatentFrame& base, const LatentFrame& fresh, const LatentSet& keep,
                               int frame_cols) {
  LatentFrame out = fresh;
  for (int i = 0; i < kMaxRows; ++i)
    if ((keep.rows >> i) & 1u) out.xi[i] = base.xi[i];
  for (int j = 0; j < kMaxCols; ++j)
    if ((keep.cols >> j) & 1u) out.eta[j] = base.eta[j];
  for (int i = 0; i < kMaxRows; ++i)
    for (int j = 0; j < frame_cols; ++j)
      if ((keep.edges >> (i * frame_cols + j)) & 1u) out.zeta[i * kMaxCols + j] = base.zeta[i * kMaxCols + j];
  return out;
}

double evaluate_on_frame(const ModelSpec& model, const KernelSpec& k, const LatentFrame& f, const KernelBlock& b) {
  SubMatrix y(k.p(), k.q());
  for (int a = 0; a < k.p(); ++a)
    for (int c = 0; c < k.q(); ++c) {
      const int i = b.rows[a], j = b.cols[c];
      y(a, c) = model.realize(f.xi[i], f.eta[j], f.zeta[i * kMaxCols + j]);
    }
  return k(y);
}

MomentEstimate cond_exp_pair_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f1,
                                    const LatentSet& f2, int rows, int cols, const KernelBlock& b1,
                                    const KernelBlock& b2, std::uint64_t samples, std::uint64_t seed) {
  check_frame(rows, cols);
  check_in_frame(f1, rows, cols);
  check_in_frame(f2, rows, cols);
  for (int a = 0; a < k.p(); ++a)
    if (b1.rows[a] >= rows || b2.rows[a] >= rows) throw std::invalid_argument("kernel block outside the universe");
  for (int c = 0; c < k.q(); ++c)
    if (b1.cols[c] >= cols || b2.cols[c] >= cols) throw std::invalid_argument("kernel block outside the universe");
  auto one = [&](KeyedStream& rng) {
    const LatentFrame base = LatentFrame::draw(rows, cols, rng);
    const LatentFrame y1 = LatentFrame::merge(base, LatentFrame::draw(rows, cols, rng), f1, cols);
    const LatentFrame y2 = LatentFrame::merge(base, LatentFrame::draw(rows, cols, rng), f2, cols);
    return evaluate_on_frame(model, k, y1, b1) * evaluate_on_frame(model, k, y2, b2);
  };
  return replicate_mean(samples, derive(seed, tag_hash("cond_exp_pair")), one,
                        "E[E[h|" + set_label(f1, cols) + "] E[h|" + set_label(f2, cols) + "]]");
}

MomentEstimate cond_exp_pair_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f1,
                                    const LatentSet& f2, std::uint64_t samples, std::uint64_t seed) {
  return cond_exp_pair_moment(model, k, f1, f2, k.p(), k.q(), KernelBlock{}, KernelBlock{}, samples, seed);
}

namespace {

// Unbiased one-draw estimate of p^F: each term completed with its own fresh latents.
double plan_draw(const ModelSpec& model, const KernelSpec& k, const ProjectionPlan& plan, const LatentFrame& base,
                 KeyedStream& rng, int inner = 1) {
  const LatentSet full = full_set(k.p(), k.q());
  double acc = 0.0;
  for (const auto& t : plan.terms) {
    double v;
    if (t.subgraph == full) {
      v = evaluate_on_frame(model, k, base, KernelBlock{});
    } else {
      v = 0.0;
      for (int l = 0; l < inner; ++l) {
        const LatentFrame y = LatentFrame::merge(base, LatentFrame::draw(k.p(), k.q(), rng), t.subgraph, k.q());
        v += evaluate_on_frame(model, k, y, KernelBlock{});
      }
      v /= inner;
    }
    acc += static_cast<double>(t.coefficient) * v;
  }
  return acc;
}

}  // namespace

MomentEstimate projection_cross_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f1,
                                       const LatentSet& f2, std::uint64_t samples, std::uint64_t seed, int inner) {
  if (inner < 1) throw std::invalid_argument("inner completions must be >= 1");
  const ProjectionPlan p1 = projection_plan(f1, k.p(), k.q());
  const ProjectionPlan p2 = projection_plan(f2, k.p(), k.q());
  // E[A B | base] = p^{F1} p^{F2} since A and B use independent completions
  auto one = [&](KeyedStream& rng) {
    const LatentFrame base = LatentFrame::draw(k.p(), k.q(), rng);
    const double a = plan_draw(model, k, p1, base, rng, inner);
    const double b = plan_draw(model, k, p2, base, rng, inner);
    return a * b;
  };
  return replicate_mean(samples, derive(seed, tag_hash("projection_cross")), one,
                        "E[p^" + set_label(f1, k.q()) + " p^" + set_label(f2, k.q()) + "]");
}

MomentEstimate projection_second_moment(const ModelSpec& model, const KernelSpec& k, const GraphClass& g,
                                        std::uint64_t samples, std::uint64_t seed, int inner) {
  const BipartiteGraph& rep = g.representative;
  if (rep.rows() > k.p() || rep.cols() > k.q()) throw std::invalid_argument("class does not fit in the kernel arity");
  const LatentSet s = to_latent_set(rep, k.q());
  auto est = projection_cross_moment(model, k, s, s, samples, seed, inner);
  est.estimand = "E[(p^G)^2], G=" + rep.describe();
  return est;
}

double default_probe(const LatentFrame& f, const LatentSet& s, int frame_cols) {
  double acc = 0.0;
  for (int i = 0; i < kMaxRows; ++i)
    if ((s.rows >> i) & 1u) acc += f.xi[i];
  for (int j = 0; j < kMaxCols; ++j)
    if ((s.cols >> j) & 1u) acc += f.eta[j];
  for (int i = 0; i < kMaxRows; ++i)
    for (int j = 0; j < frame_cols; ++j)
      if ((s.edges >> (i * frame_cols + j)) & 1u) acc += f.zeta[i * kMaxCols + j];
  return std::exp(acc);
}

MomentEstimate projection_probe_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f,
                                       const LatentSet& f_probe, std::uint64_t samples, std::uint64_t seed,
                                       const LatentProbe& probe) {
  const ProjectionPlan plan = projection_plan(f, k.p(), k.q());
  check_in_frame(f_probe, k.p(), k.q());
  auto one = [&](KeyedStream& rng) {
    const LatentFrame base = LatentFrame::draw(k.p(), k.q(), rng);
    return plan_draw(model, k, plan, base, rng) * probe(base, f_probe, k.q());
  };
  return replicate_mean(samples, derive(seed, tag_hash("projection_probe")), one,
                        "E[p^" + set_label(f, k.q()) + " g(H(" + set_label(f_probe, k.q()) + "))]");
}

MomentEstimate conditional_expectation(const ModelSpec& model, const KernelSpec& k, const LatentFrame& base,
                                       const LatentSet& keep, std::uint64_t samples, std::uint64_t seed) {
  check_in_frame(keep, k.p(), k.q());
  auto one = [&](KeyedStream& rng) {
    const LatentFrame y = LatentFrame::merge(base, LatentFrame::draw(k.p(), k.q(), rng), keep, k.q());
    return evaluate_on_frame(model, k, y, KernelBlock{});
  };
  return replicate_mean(samples, derive(seed, tag_hash("conditional_expectation")), one,
                        "E[h|" + set_label(keep, k.q()) + "]");
}

SupportReport detect_principal_support(const ModelSpec& model, const KernelSpec& k, const SupportPolicy& policy) {
  if (!(policy.alpha > 0.0 && policy.alpha < 1.0)) throw std::invalid_argument("significance must be in (0,1)");
  const int max_level = policy.max_level > 0 ? std::min(policy.max_level, k.p() + k.q()) : k.p() + k.q();
  SupportReport report;
  for (int level = 1; level <= max_level; ++level) {
    std::vector<GraphClass> classes;
    for (int r = 0; r <= std::min(level, k.p()); ++r) {
      const int c = level - r;
      if (c < 0 || c > k.q()) continue;
      auto cls = enumerate_gamma(r, c);
      classes.insert(classes.end(), cls.begin(), cls.end());
    }
    if (classes.empty()) continue;
    LevelLog log;
    log.level = level;
    // one-sided, Bonferroni over the level's classes
    log.threshold = normal_quantile(1.0 - policy.alpha / static_cast<double>(classes.size()));
    for (const auto& gc : classes) {
      const std::uint64_t key = derive(policy.seed, {std::uint64_t(level), std::uint64_t(gc.representative.rows()),
                                                     std::uint64_t(gc.representative.cols()),
                                                     std::uint64_t(gc.representative.edges())});
      SupportEntry e;
      e.graph_class = gc;
      e.estimate = projection_second_moment(model, k, gc, policy.pilot_samples, key, policy.inner_completions);
      auto zscore = [](const MomentEstimate& m) {
        if (m.std_error > 0.0) return m.value / m.std_error;
        return m.value > 0.0 ? INFINITY : 0.0;
      };
      e.z = zscore(e.estimate);
      if (e.z > policy.escalation_floor_z && e.z <= log.threshold) {
        const auto more = static_cast<std::uint64_t>(policy.escalation_factor * double(policy.pilot_samples));
        e.estimate = projection_second_moment(model, k, gc, more, key, policy.inner_completions);
        e.z = zscore(e.estimate);
        e.escalated = true;
      }
      e.nonzero = e.z > log.threshold;
      log.entries.push_back(e);
    }
    report.levels.push_back(log);
    for (const auto& e : log.entries)
      if (e.nonzero) report.support.push_back(e);
    if (!report.support.empty()) {
      report.found = true;
      report.principal_degree = level;
      report.degeneracy_order = level - 1;
      report.all_connected = std::all_of(report.support.begin(), report.support.end(),
                                         [](const SupportEntry& e) { return e.graph_class.connected; });
      return report;
    }
  }
  report.message = "no support found up to level " + std::to_string(max_level);
  return report;
}

double telescoping_check(const KernelSpec& k, const ModelSpec& model, std::uint64_t seed, std::uint64_t inner_samples) {
  const int p = k.p(), q = k.q();
  const LatentSet full = full_set(p, q);
  const auto subs = latent_subsets(full, p, q);
  if (subs.size() > kMaxPlanSubgraphs) throw SizeLimitError("kernel frame too large for the telescoping check");

  KeyedStream rng(derive(seed, tag_hash("telescoping")));
  const LatentFrame base = LatentFrame::draw(p, q, rng);
  std::vector<LatentFrame> inner;
  for (std::uint64_t s = 0; s < inner_samples; ++s) inner.push_back(LatentFrame::draw(p, q, rng));

  // Conditional expectation estimates, one per labeled subgraph, from the shared inner set.
  std::map<std::tuple<int, int, int>, double> cond;
  for (const auto& f : subs) {
    ExactSum acc;
    for (const auto& fr : inner) acc.add(evaluate_on_frame(model, k, LatentFrame::merge(base, fr, f, q), KernelBlock{}));
    cond[{f.rows, f.cols, f.edges}] = acc.value() / static_cast<double>(inner_samples);
  }
  ExactSum total;
  for (const auto& f : subs) {
    const ProjectionPlan plan = projection_plan(f, p, q);
    double pf = 0.0;
    for (const auto& t : plan.terms)
      pf += static_cast<double>(t.coefficient) * cond.at({t.subgraph.rows, t.subgraph.cols, t.subgraph.edges});
    total.add(pf);
  }
  const double h = evaluate_on_frame(model, k, base, KernelBlock{});
  return std::fabs(total.value() - h);
}

}  // namespace rcu

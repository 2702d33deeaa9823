#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcu/graph_catalog.hpp"
#include "rcu/kernels.hpp"
#include "rcu/models.hpp"

namespace rcu {

struct PlanTerm {
  LatentSet subgraph;
  long coefficient = 0;
};

// p^G = sum_F c_F E[X | H(F)], F ranging over labeled subgraphs of G. Terms are
// expressed in a (frame_rows, frame_cols) node frame; zero coefficients dropped.
struct ProjectionPlan {
  BipartiteGraph target;
  int frame_rows = 0, frame_cols = 0;
  std::vector<PlanTerm> terms;
};

inline constexpr std::size_t kMaxPlanSubgraphs = 4096;

ProjectionPlan projection_plan(const BipartiteGraph& g);
ProjectionPlan projection_plan(const BipartiteGraph& g, int frame_rows, int frame_cols);
ProjectionPlan projection_plan(const LatentSet& s, int frame_rows, int frame_cols);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::string estimand;
};

// Latents of a node frame of at most 4 x 4 nodes.
struct LatentFrame {
  std::array<double, kMaxRows> xi{};
  std::array<double, kMaxCols> eta{};
  std::array<double, kMaxRows * kMaxCols> zeta{};  // (i, j) at i*4+j

  static LatentFrame draw(int rows, int cols, KeyedStream& rng);
  // Keeps the latents of keep (edge bits i*frame_cols+j), takes the rest from fresh.
  static LatentFrame merge(const LatentFrame& base, const LatentFrame& fresh, const LatentSet& keep, int frame_cols);
};

// Index block (rows, cols) of the frame on which the kernel is evaluated.
struct KernelBlock {
  std::array<int, kMaxRows> rows{0, 1, 2, 3};
  std::array<int, kMaxCols> cols{0, 1, 2, 3};
};

double evaluate_on_frame(const ModelSpec& model, const KernelSpec& k, const LatentFrame& f, const KernelBlock& block);

// E[ E[h(block1)|H(F1)] E[h(block2)|H(F2)] ] over a (frame_rows, frame_cols) universe.
MomentEstimate cond_exp_pair_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f1,
                                    const LatentSet& f2, int frame_rows, int frame_cols, const KernelBlock& block1,
                                    const KernelBlock& block2, std::uint64_t samples, std::uint64_t seed);
// Universe = the kernel's own p x q block.
MomentEstimate cond_exp_pair_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f1,
                                    const LatentSet& f2, std::uint64_t samples, std::uint64_t seed);

// E[p^{F1} p^{F2}] with F1, F2 labeled subgraphs of the kernel frame K_{p,q}.
// inner: completions averaged per plan term; the noise-by-noise part of the
// product falls like 1/inner^2, which matters for heavy kernels such as h6.
MomentEstimate projection_cross_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f1,
                                       const LatentSet& f2, std::uint64_t samples, std::uint64_t seed,
                                       int inner = 1);
// E[(p^G)^2] for a class, embedded on the first r rows and c columns.
MomentEstimate projection_second_moment(const ModelSpec& model, const KernelSpec& k, const GraphClass& g,
                                        std::uint64_t samples, std::uint64_t seed, int inner = 1);

using LatentProbe = std::function<double(const LatentFrame&, const LatentSet&, int frame_cols)>;
// exp of the sum of the latents in the set
double default_probe(const LatentFrame& f, const LatentSet& s, int frame_cols);
// E[p^F * probe(H(F'))]; zero when F' is a proper subgraph of F.
MomentEstimate projection_probe_moment(const ModelSpec& model, const KernelSpec& k, const LatentSet& f,
                                       const LatentSet& f_probe, std::uint64_t samples, std::uint64_t seed,
                                       const LatentProbe& probe = default_probe);

// Monte Carlo E[h | H(keep)] at fixed base latents.
MomentEstimate conditional_expectation(const ModelSpec& model, const KernelSpec& k, const LatentFrame& base,
                                       const LatentSet& keep, std::uint64_t samples, std::uint64_t seed);

struct SupportPolicy {
  std::uint64_t pilot_samples = 40000;
  int inner_completions = 4;
  double alpha = 0.01;
  double escalation_factor = 4.0;
  double escalation_floor_z = 2.0;
  int max_level = 0;  // 0: p + q
  std::uint64_t seed = 1;
};

struct SupportEntry {
  GraphClass graph_class;
  MomentEstimate estimate;
  double z = 0.0;
  bool escalated = false;
  bool nonzero = false;
};

struct LevelLog {
  int level = 0;
  double threshold = 0.0;
  std::vector<SupportEntry> entries;
};

struct SupportReport {
  bool found = false;
  int principal_degree = 0;
  int degeneracy_order = 0;
  std::vector<SupportEntry> support;
  bool all_connected = false;
  std::vector<LevelLog> levels;
  std::string message;
};

SupportReport detect_principal_support(const ModelSpec& model, const KernelSpec& k, const SupportPolicy& policy);

// |sum_F p^F - h| on one latent configuration of K_{p,q}, with all conditional
// expectations estimated from one shared set of inner samples.
double telescoping_check(const KernelSpec& k, const ModelSpec& model, std::uint64_t seed,
                         std::uint64_t inner_samples = 256);

}  // namespace rcu

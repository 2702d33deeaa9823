#pragma once

#include <string_view>
#include <vector>

#include "rcu/graph_catalog.hpp"
#include "rcu/kernels.hpp"
#include "rcu/models.hpp"

namespace rcu {

// Closed-form conditional expectations of h3 under Poisson-BEDD and of h6 under the
// overdispersed model, on the block rows {1,2}, cols {1,2}.
enum class AnalyticId {
  h3_given_xi12,
  h3_given_eta12,
  h3_given_xi1_eta1,
  h3_given_xi1_eta1_zeta11,
  h3_given_xi12_eta1,
  h3_given_xi12_eta1_zeta11,
  h3_given_xi12_eta1_zeta11_zeta21,
  h3_given_xi1_eta12,
  h3_given_xi1_eta12_zeta11,
  h3_given_k12,
  h3_k12_second_moment,
  h6_mean,
  h6_given_xi1,
  h6_given_eta1,
  h6_given_xi12,
  h6_given_eta12,
  h6_given_xi1_eta1,
  h6_given_k11,
  h6_k11_second_moment,
};

struct AnalyticInputs {
  double lambda = 1.0;
  DegreeFunction f, g;
  double alpha = 0.0;
  double xi1 = 0.5, xi2 = 0.5, eta1 = 0.5, eta2 = 0.5;
  double y11 = 0.0, y12 = 0.0, y21 = 0.0;
};

struct AnalyticCase {
  AnalyticId id;
  std::string_view name;   // e.g. "h3|xi1,xi2"
  std::string_view alias;  // "F1".."F11", "G1".."G8", in order of appearance
  Builtin kernel;
  LatentSet conditioning;  // in the 2x2 frame; empty for unconditional moments
  bool second_moment;      // value is E[E[h|H(F)]^2]
  bool needs_alpha_zero;
};

const std::vector<AnalyticCase>& analytic_cases();
const AnalyticCase& analytic_case(AnalyticId id);
AnalyticId parse_analytic_id(std::string_view name_or_alias);

double analytic_cond_exp(AnalyticId id, const AnalyticInputs& in);

}  // namespace rcu

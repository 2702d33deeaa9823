#include "rcu/analytic.hpp"

#include <stdexcept>
#include <string>

namespace rcu {

namespace {

// 2x2 frame: edge bit i*2+j
constexpr EdgeMask e11 = 1, e21 = 4;

}  // namespace

const std::vector<AnalyticCase>& analytic_cases() {
  using A = AnalyticId;
  static const std::vector<AnalyticCase> cases = {
      {A::h3_given_xi12, "h3|xi1,xi2", "F1", Builtin::h3, {3, 0, 0}, false, false},
      {A::h3_given_eta12, "h3|eta1,eta2", "F2", Builtin::h3, {0, 3, 0}, false, false},
      {A::h3_given_xi1_eta1, "h3|xi1,eta1", "F3", Builtin::h3, {1, 1, 0}, false, false},
      {A::h3_given_xi1_eta1_zeta11, "h3|xi1,eta1,zeta11", "F4", Builtin::h3, {1, 1, e11}, false, false},
      {A::h3_given_xi12_eta1, "h3|xi1,xi2,eta1", "F5", Builtin::h3, {3, 1, 0}, false, false},
      {A::h3_given_xi12_eta1_zeta11, "h3|xi1,xi2,eta1,zeta11", "F6", Builtin::h3, {3, 1, e11}, false, false},
      {A::h3_given_xi12_eta1_zeta11_zeta21, "h3|xi1,xi2,eta1,zeta11,zeta21", "F7", Builtin::h3, {3, 1, e11 | e21},
       false, false},
      {A::h3_given_xi1_eta12, "h3|xi1,eta1,eta2", "F8", Builtin::h3, {1, 3, 0}, false, false},
      {A::h3_given_xi1_eta12_zeta11, "h3|xi1,eta1,eta2,zeta11", "F9", Builtin::h3, {1, 3, e11}, false, false},
      {A::h3_given_k12, "h3|K12", "F10", Builtin::h3, {1, 3, 3}, false, false},
      {A::h3_k12_second_moment, "E[E[h3|K12]^2]", "F11", Builtin::h3, {1, 3, 3}, true, false},
      {A::h6_mean, "E[h6]", "G1", Builtin::h6, {0, 0, 0}, false, false},
      {A::h6_given_xi1, "h6|xi1", "G2", Builtin::h6, {1, 0, 0}, false, false},
      {A::h6_given_eta1, "h6|eta1", "G3", Builtin::h6, {0, 1, 0}, false, false},
      {A::h6_given_xi12, "h6|xi1,xi2", "G4", Builtin::h6, {3, 0, 0}, false, false},
      {A::h6_given_eta12, "h6|eta1,eta2", "G5", Builtin::h6, {0, 3, 0}, false, false},
      {A::h6_given_xi1_eta1, "h6|xi1,eta1", "G6", Builtin::h6, {1, 1, 0}, false, false},
      {A::h6_given_k11, "h6|xi1,eta1,zeta11", "G7", Builtin::h6, {1, 1, e11}, false, false},
      {A::h6_k11_second_moment, "E[E[h6|K11]^2]", "G8", Builtin::h6, {1, 1, e11}, true, true},
  };
  return cases;
}

const AnalyticCase& analytic_case(AnalyticId id) {
  for (const auto& c : analytic_cases())
    if (c.id == id) return c;
  throw std::invalid_argument("unknown analytic id");
}

AnalyticId parse_analytic_id(std::string_view s) {
  for (const auto& c : analytic_cases())
    if (c.name == s || c.alias == s) return c.id;
  throw std::invalid_argument("unknown analytic id '" + std::string(s) + "'");
}

double analytic_cond_exp(AnalyticId id, const AnalyticInputs& in) {
  const double l = in.lambda, a = in.alpha;
  const double f1 = in.f(in.xi1), f2 = in.f(in.xi2), g1 = in.g(in.eta1), g2 = in.g(in.eta2);
  const double F2 = moment(in.f, 2), F3 = moment(in.f, 3), F4 = moment(in.f, 4);
  const double G2 = moment(in.g, 2), G3 = moment(in.g, 3);
  const double y11 = in.y11, y12 = in.y12, y21 = in.y21;
  const double l2 = l * l, l3 = l2 * l, l4 = l3 * l;
  switch (id) {
    case AnalyticId::h3_given_xi12:
      return l2 / 2 * (f1 - f2) * (f1 - f2);
    case AnalyticId::h3_given_eta12:
      return l2 * (F2 - 1) * g1 * g2;
    case AnalyticId::h3_given_xi1_eta1:
      return l2 / 2 * (f1 * f1 - 2 * f1 + F2) * g1;
    case AnalyticId::h3_given_xi1_eta1_zeta11:
      return l / 2 * (f1 - 1) * y11 + l2 / 2 * (F2 - f1) * g1;
    case AnalyticId::h3_given_xi12_eta1:
      return l2 / 2 * (f1 - f2) * (f1 - f2) * g1;
    case AnalyticId::h3_given_xi12_eta1_zeta11:
      return l / 2 * (f1 - f2) * y11 + l2 / 2 * (f2 - f1) * f2 * g1;
    case AnalyticId::h3_given_xi12_eta1_zeta11_zeta21:
      return l / 2 * (f1 - f2) * (y11 - y21);
    case AnalyticId::h3_given_xi1_eta12:
      return l2 / 2 * (f1 * f1 - 2 * f1 + F2) * g1 * g2;
    case AnalyticId::h3_given_xi1_eta12_zeta11:
      return l / 2 * (f1 - 1) * g2 * y11 + l2 / 2 * (F2 - f1) * g1 * g2;
    case AnalyticId::h3_given_k12:
      return 0.5 * y11 * y12 - l / 2 * (g2 * y11 + g1 * y12) + l2 / 2 * F2 * g1 * g2;
    case AnalyticId::h3_k12_second_moment:
      return l2 / 4 * F2 + l3 / 2 * (F3 - 2 * F2 + 1) * G2 + l4 / 4 * (F4 - 4 * F3 + 3 * F2 * F2) * G2 * G2;
    case AnalyticId::h6_mean:
      return l3 * F2 * G2 * a;
    case AnalyticId::h6_given_xi1:
      return l3 / 2 * f1 * (f1 + F2) * G2 * a;
    case AnalyticId::h6_given_eta1:
      return l3 / 2 * F2 * g1 * (g1 + G2) * a;
    case AnalyticId::h6_given_xi12:
      return l3 / 2 * (f1 * f1 * f2 + f2 * f2 * f1) * G2 * a;
    case AnalyticId::h6_given_eta12:
      return l3 / 2 * F2 * (g1 * g1 * g2 + g2 * g2 * g1) * a;
    case AnalyticId::h6_given_xi1_eta1:
      return l3 / 4 * f1 * g1 * (f1 * g1 + f1 * G2 + F2 * g1 + F2 * G2) * a;
    case AnalyticId::h6_given_k11:
      return l3 / 4 * f1 * g1 * (f1 * G2 * (a + 1) + F2 * g1 * (a + 1) - F2 * G2) +
             l2 / 4 * y11 * (F2 * G2 * (a + 1) - f1 * G2 - F2 * g1 - f1 * g1) + l / 4 * y11 * (y11 - 1);
    case AnalyticId::h6_k11_second_moment:
      if (a != 0.0) throw std::invalid_argument("E[E[h6|K11]^2] closed form holds only at alpha = 0");
      return l4 / 16 * (l * (F3 - F2 * F2) * (G3 - G2 * G2) + 2 * F2 * G2);
  }
  throw std::invalid_argument("unknown analytic id");
}

}  // namespace rcu

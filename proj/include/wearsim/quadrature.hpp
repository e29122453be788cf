#pragma once

#include "wearsim/common.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wearsim {

/// Quadrature point on a reference simplex with k+1 vertices. The weight is
/// the fraction of the simplex measure, so the weights of a rule sum to one.
struct SimplexPoint {
  std::array<double, 4> bary{};
  double weight = 0.0;
};

/// Rules exact for polynomials of degree `order` on simplices of dimension
/// `k` (1 = segment, 2 = triangle, 3 = tetrahedron).
inline std::vector<SimplexPoint> simplex_rule(int k, int order) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("unsupported quadrature order " + std::to_string(order));
  }
  std::vector<SimplexPoint> rule;
  switch (k) {
    case 1:
      if (order == 1) {
        rule.push_back({{0.5, 0.5, 0.0, 0.0}, 1.0});
      } else {
        const double s = 0.5 / std::sqrt(3.0);
        rule.push_back({{0.5 + s, 0.5 - s, 0.0, 0.0}, 0.5});
        rule.push_back({{0.5 - s, 0.5 + s, 0.0, 0.0}, 0.5});
      }
      break;
    case 2:
      if (order == 1) {
        rule.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}, 1.0});
      } else if (order == 2) {
        const double a = 2.0 / 3, b = 1.0 / 6;
        rule.push_back({{a, b, b, 0.0}, 1.0 / 3});
        rule.push_back({{b, a, b, 0.0}, 1.0 / 3});
        rule.push_back({{b, b, a, 0.0}, 1.0 / 3});
      } else {
        // Degree-4 six-point rule with positive weights.
        const double a1 = 0.445948490915965, w1 = 0.223381589678011;
        const double a2 = 0.091576213509771, w2 = 0.109951743655322;
        for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
          const double c = 1.0 - 2.0 * a;
          rule.push_back({{c, a, a, 0.0}, w});
          rule.push_back({{a, c, a, 0.0}, w});
          rule.push_back({{a, a, c, 0.0}, w});
        }
      }
      break;
    case 3:
      if (order == 1) {
        rule.push_back({{0.25, 0.25, 0.25, 0.25}, 1.0});
      } else if (order == 2) {
        const double a = 0.5854101966249685, b = 0.1381966011250105;
        for (int i = 0; i < 4; ++i) {
          SimplexPoint p{{b, b, b, b}, 0.25};
          p.bary[i] = a;
          rule.push_back(p);
        }
      } else {
        rule.push_back({{0.25, 0.25, 0.25, 0.25}, -0.8});
        for (int i = 0; i < 4; ++i) {
          SimplexPoint p{{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}, 0.45};
          p.bary[i] = 0.5;
          rule.push_back(p);
        }
      }
      break;
    default:
      throw std::invalid_argument("unsupported simplex dimension " + std::to_string(k));
  }
  return rule;
}

}  // namespace wearsim

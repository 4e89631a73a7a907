#include "wstab/quadrature.hpp"

#include <cmath>

namespace wstab {

const std::vector<TrianglePoint>& triangle_points(TriangleRule rule) {
  static const std::vector<TrianglePoint> centroid{{1.0 / 3.0, 1.0 / 3.0, 1.0}};
  static const std::vector<TrianglePoint> gauss3{
      {1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0}};
  // Strang-Fix / Dunavant degree-4 rule.
  static const std::vector<TrianglePoint> gauss6 = [] {
    const double a = 0.445948490915965, wa = 0.223381589678011;
    const double b = 0.091576213509771, wb = 0.109951743655322;
    return std::vector<TrianglePoint>{
        {a, a, wa}, {1.0 - 2.0 * a, a, wa}, {a, 1.0 - 2.0 * a, wa},
        {b, b, wb}, {1.0 - 2.0 * b, b, wb}, {b, 1.0 - 2.0 * b, wb}};
  }();
  switch (rule) {
    case TriangleRule::Centroid1: return centroid;
    case TriangleRule::Gauss3: return gauss3;
    case TriangleRule::Gauss6: return gauss6;
  }
  return gauss6;
}

const std::vector<EdgePoint>& edge_points(EdgeRule rule) {
  static const std::vector<EdgePoint> midpoint{{0.5, 1.0}};
  static const std::vector<EdgePoint> gauss2{
      {0.5 - 0.5 / std::sqrt(3.0), 0.5}, {0.5 + 0.5 / std::sqrt(3.0), 0.5}};
  return rule == EdgeRule::Midpoint ? midpoint : gauss2;
}

const char* to_string(TriangleRule r) {
  switch (r) {
    case TriangleRule::Centroid1: return "Centroid1";
    case TriangleRule::Gauss3: return "Gauss3";
    case TriangleRule::Gauss6: return "Gauss6";
  }
  return "?";
}

const char* to_string(EdgeRule r) { return r == EdgeRule::Midpoint ? "Midpoint" : "Gauss2"; }

}  // namespace wstab

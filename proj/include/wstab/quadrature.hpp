#pragma once

#include <vector>

#include "wstab/jet.hpp"

namespace wstab {

enum class TriangleRule { Centroid1, Gauss3, Gauss6 };
enum class EdgeRule { Midpoint, Gauss2 };

struct Quadrature {
  TriangleRule rule = TriangleRule::Gauss6;
  EdgeRule boundary_rule = EdgeRule::Gauss2;
};

// Rule used for index-form assembly.
inline Quadrature fem_quadrature() { return {TriangleRule::Gauss3, EdgeRule::Gauss2}; }

struct TrianglePoint {
  double l1, l2;   // barycentric weights of corners 1 and 2; corner 0 gets 1 - l1 - l2
  double weight;   // fraction of the element measure; weights sum to 1
};
struct EdgePoint {
  double t;        // position along the edge in [0, 1]
  double weight;   // weights sum to 1
};

const std::vector<TrianglePoint>& triangle_points(TriangleRule rule);
const std::vector<EdgePoint>& edge_points(EdgeRule rule);

const char* to_string(TriangleRule r);
const char* to_string(EdgeRule r);

}  // namespace wstab

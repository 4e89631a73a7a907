// Builtin scenarios. Each config asserts the outcome known in closed form.
#include <sstream>

#include "wstab/errors.hpp"
#include "wstab/scenario.hpp"

namespace wstab {

namespace {

BuiltinScenario make(const char* name, const char* description, const char* config) {
  BuiltinScenario b;
  b.name = name;
  b.description = description;
  b.config = Json::parse(config);
  b.config["name"] = name;
  b.config["description"] = description;
  return b;
}

std::vector<BuiltinScenario> build() {
  std::vector<BuiltinScenario> v;
  v.push_back(make(
      "paper-ex-3.9-threshold",
      "unit half-sphere in a half-space, psi = k log|p|: lambda_min = -(2 + k), stable iff k <= -2; "
      "sweeps k over [-3, -1]",
      R"({
        "resolution": 16,
        "ambient": {"density": {"name": "radial-log", "k": -2},
                    "boundary": {"name": "half-space"}},
        "surface": {"builtin": "hemisphere"},
        "tasks": ["stationarity", "spectrum", "identities", "topology"],
        "expect": {"stationary": true, "strongly_stationary": true, "strongly_stable": true,
                   "topology": "DiskOrCylinder", "crossing": {"value": -2, "tol": 0.02}},
        "sweep": {"param": "k", "range": "-3:-1:0.25"}
      })"));
  v.push_back(make(
      "paper-Mr-k-minus-2",
      "sphere of radius 2 in the complement of the unit ball, psi = -2 log|p|: S_f = 0, "
      "f-mean convex boundary, stable, chi = 2",
      R"({
        "resolution": 12,
        "ambient": {"density": {"name": "radial-log", "k": -2},
                    "boundary": {"name": "ball-complement", "radius": 1}},
        "surface": {"builtin": "sphere", "radius": 2},
        "tasks": ["stationarity", "spectrum", "identities", "topology", "rigidity"],
        "expect": {"strongly_stationary": true, "strongly_stable": true,
                   "topology": "SphereOrTorus", "rigidity": false}
      })"));
  v.push_back(make(
      "paper-product-cylinder",
      "slice {0} x S^1 x [-1, 1] of R x S^1 x [-1, 1] with psi = s: S_f + H_f^2 = -1 + 1 = 0, "
      "equality case of the topology bound",
      R"({
        "resolution": 12,
        "ambient": {"metric_kind": "flat-product", "circumferences": [6.283185307179586],
                    "density": {"name": "linear", "a": [1, 0, 0]},
                    "boundary": {"name": "slab", "axis": 2, "half_width": 1}},
        "surface": {"builtin": "product-slice"},
        "tasks": ["stationarity", "first-variation", "second-variation", "spectrum",
                  "identities", "topology", "area-bounds", "rigidity", "foliation"],
        "variation": {"fields": [{"name": "translation", "vector": [1, 0, 0]}]},
        "area_bounds": {"S0": -1},
        "foliation": {"field": {"name": "translation", "vector": [1, 0, 0]},
                      "s_values": [-0.5, -0.25, 0, 0.25, 0.5]},
        "expect": {"stationary": true, "strongly_stable": true, "topology": "DiskOrCylinder",
                   "rigidity": true}
      })"));
  v.push_back(make(
      "paper-product-torus",
      "slice {0} x S^1 x S^1 of R x T^2 with psi = s: closed equality case, chi = 0",
      R"({
        "resolution": 12,
        "ambient": {"metric_kind": "flat-product",
                    "circumferences": [6.283185307179586, 6.283185307179586],
                    "density": {"name": "linear", "a": [1, 0, 0]}},
        "surface": {"builtin": "product-torus"},
        "tasks": ["stationarity", "spectrum", "identities", "topology", "rigidity", "foliation"],
        "foliation": {"field": {"name": "translation", "vector": [1, 0, 0]}},
        "expect": {"stationary": true, "strongly_stable": true, "topology": "SphereOrTorus",
                   "rigidity": true}
      })"));
  v.push_back(make(
      "paper-ex-3.8-gaussian-hemisphere",
      "unit half-sphere in a half-space with Gaussian density: f-stationary but not "
      "volume-constrained stable",
      R"({
        "resolution": 16,
        "ambient": {"density": {"name": "gaussian"}, "boundary": {"name": "half-space"}},
        "surface": {"builtin": "hemisphere"},
        "tasks": ["stationarity", "spectrum", "identities", "topology"],
        "expect": {"stationary": true, "strongly_stable": false,
                   "volume_constrained_stable": false, "topology": "NotApplicable"}
      })"));
  v.push_back(make(
      "paper-ex-3.8-cone-log-convex",
      "spherical cap in the convex cone of half-angle pi/3 with log-convex density "
      "psi = |p|^2/2: volume-constrained stable",
      R"({
        "resolution": 16,
        "ambient": {"density": {"name": "radial-smooth", "coefficients": [0, 0, 0.5]},
                    "boundary": {"name": "cone", "alpha": 1.0471975511965976}},
        "surface": {"builtin": "cap", "alpha": 1.0471975511965976},
        "tasks": ["stationarity", "spectrum", "identities"],
        "expect": {"stationary": true, "strongly_stable": false,
                   "volume_constrained_stable": true}
      })"));
  v.push_back(make(
      "hemisphere-constant-density",
      "unit half-sphere in a half-space, constant density: A'(0) = 4 pi under inflation, "
      "volume-constrained stable, strongly unstable",
      R"({
        "resolution": 12,
        "ambient": {"boundary": {"name": "half-space"}},
        "surface": {"builtin": "hemisphere"},
        "tasks": ["stationarity", "first-variation", "second-variation", "spectrum",
                  "identities"],
        "variation": {"fields": [{"name": "inflation"},
                                 {"name": "rotation", "axis": [0, 0, 1]},
                                 {"name": "radial", "a0": 1, "a": [0.3, -0.2, 0]}]},
        "expect": {"stationary": true, "strongly_stationary": false, "strongly_stable": false,
                   "volume_constrained_stable": true}
      })"));
  v.push_back(make(
      "hemisphere-k-minus-2.5",
      "unit half-sphere in a half-space, psi = -2.5 log|p|: lambda_min = 0.5, inflation family "
      "with dH_f/dr = -0.5/r^2",
      R"({
        "resolution": 12,
        "ambient": {"density": {"name": "radial-log", "k": -2.5},
                    "boundary": {"name": "half-space"}},
        "surface": {"builtin": "hemisphere"},
        "tasks": ["stationarity", "first-variation", "second-variation", "spectrum",
                  "identities", "topology", "foliation"],
        "variation": {"fields": [{"name": "inflation"},
                                 {"name": "radial", "a0": 1, "a": [0.25, 0, 0]}]},
        "foliation": {"field": {"name": "inflation"}, "s_values": [-0.2, 0, 0.2, 0.4]},
        "expect": {"stationary": true, "strongly_stable": true, "topology": "NotApplicable"}
      })"));
  v.push_back(make(
      "unit-sphere-constant",
      "round unit sphere, constant density: lambda_min = -2, volume-constrained stable",
      R"({
        "resolution": 10,
        "ambient": {},
        "surface": {"builtin": "sphere"},
        "tasks": ["stationarity", "spectrum", "identities", "topology"],
        "expect": {"stationary": true, "strongly_stable": false,
                   "volume_constrained_stable": true, "topology": "NotApplicable"}
      })"));
  v.push_back(make(
      "cylinder-disk-area-bound",
      "flat disk of radius 1/2 in the solid cylinder of radius 1/2, psi = -(x^2 + y^2): "
      "S_f >= 6 f, stable disk with A_f <= 4 pi / 6",
      R"({
        "resolution": 12,
        "ambient": {"density": {"name": "gaussian", "weights": [1, 1, 0]},
                    "boundary": {"name": "cylinder", "radius": 0.5}},
        "surface": {"builtin": "disk", "radius": 0.5},
        "tasks": ["stationarity", "spectrum", "identities", "topology", "area-bounds",
                  "rigidity"],
        "area_bounds": {"S0": 6},
        "expect": {"strongly_stationary": true, "strongly_stable": true,
                   "topology": "DiskOrCylinder", "rigidity": false}
      })"));
  v.push_back(make(
      "perturbed-hemisphere",
      "half-sphere with a smooth radial perturbation: first variation still matches, "
      "stationarity fails",
      R"({
        "resolution": 24,
        "ambient": {"boundary": {"name": "half-space"}},
        "surface": {"builtin": "hemisphere", "perturbation": 0.1},
        "tasks": ["stationarity", "first-variation", "identities"],
        "variation": {"fields": [{"name": "inflation"},
                                 {"name": "normal-constant", "normal": [0, 0, 1],
                                  "a0": 0.2, "a": [0.5, 0, 0],
                                  "cutoff": {"center": [0, 0, 1], "radius": 0.8}}]},
        "expect": {"stationary": false}
      })"));
  v.push_back(make(
      "disk-in-ball-offset",
      "flat disk at height 0.3 inside the unit ball: contact angle is not orthogonal, "
      "so the disk is not f-stationary",
      R"({
        "resolution": 12,
        "ambient": {"boundary": {"name": "ball", "radius": 1}},
        "surface": {"builtin": "disk", "radius": 0.9539392014169456, "center": [0, 0, 0.3]},
        "tasks": ["stationarity", "first-variation", "identities"],
        "variation": {"fields": [{"name": "rotation", "axis": [0, 0, 1]},
                                 {"name": "sphere-tangential", "a": [0, 0, 1]}]},
        "expect": {"stationary": false}
      })"));
  return v;
}

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> v = build();
  return v;
}

Scenario builtin_scenario(const std::string& name) {
  for (const auto& b : builtin_scenarios())
    if (b.name == name) return parse_scenario(b.config);
  throw ConfigError("unknown builtin scenario '" + name + "' (see `wstab list`)");
}

std::string list_builtins() {
  std::ostringstream os;
  for (const auto& b : builtin_scenarios()) os << b.name << "\n    " << b.description << "\n";
  return os.str();
}

}  // namespace wstab

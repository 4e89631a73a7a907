#include "wstab/registry.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "wstab/errors.hpp"
#include "wstab/expression.hpp"

namespace wstab {

namespace {
const Json& empty_object() {
  static const Json e = Json::object();
  return e;
}
}  // namespace

ConfigNode::ConfigNode(const Json& in, Json& normalized, std::string path)
    : in_(&in), out_(&normalized), path_(std::move(path)) {
  if (!in.is_object()) throw ConfigError(path_ + ": expected an object");
  if (!out_->is_object()) *out_ = Json::object();
}

std::string ConfigNode::key_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void ConfigNode::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(key_path(key) + ": " + what);
}

bool ConfigNode::has(const std::string& key) const { return in_->contains(key); }

const Json& ConfigNode::get(const std::string& key) const { return in_->at(key); }

double ConfigNode::number(const std::string& key, std::optional<double> def) {
  used_.insert(key);
  double x;
  if (has(key)) {
    const Json& v = get(key);
    if (!v.is_number()) fail(key, "expected a number");
    x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "expected a finite number");
  } else if (def) {
    x = *def;
  } else {
    fail(key, "missing required key");
  }
  (*out_)[key] = x;
  return x;
}

int ConfigNode::integer(const std::string& key, std::optional<int> def) {
  used_.insert(key);
  int x;
  if (has(key)) {
    const Json& v = get(key);
    if (v.is_number_integer()) x = v.get<int>();
    else if (v.is_number_float() && v.get<double>() == std::round(v.get<double>()))
      x = static_cast<int>(v.get<double>());
    else fail(key, "expected an integer");
  } else if (def) {
    x = *def;
  } else {
    fail(key, "missing required key");
  }
  (*out_)[key] = x;
  return x;
}

bool ConfigNode::boolean(const std::string& key, std::optional<bool> def) {
  used_.insert(key);
  bool x;
  if (has(key)) {
    const Json& v = get(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    x = v.get<bool>();
  } else if (def) {
    x = *def;
  } else {
    fail(key, "missing required key");
  }
  (*out_)[key] = x;
  return x;
}

std::string ConfigNode::string(const std::string& key, std::optional<std::string> def) {
  used_.insert(key);
  std::string x;
  if (has(key)) {
    const Json& v = get(key);
    if (!v.is_string()) fail(key, "expected a string");
    x = v.get<std::string>();
  } else if (def) {
    x = *def;
  } else {
    fail(key, "missing required key");
  }
  (*out_)[key] = x;
  return x;
}

std::vector<double> ConfigNode::numbers(const std::string& key,
                                        std::optional<std::vector<double>> def) {
  used_.insert(key);
  std::vector<double> x;
  if (has(key)) {
    const Json& v = get(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        fail(key + "[" + std::to_string(i) + "]", "expected a number");
      x.push_back(v[i].get<double>());
    }
  } else if (def) {
    x = *def;
  } else {
    fail(key, "missing required key");
  }
  (*out_)[key] = x;
  return x;
}

std::vector<std::string> ConfigNode::strings(const std::string& key,
                                             std::optional<std::vector<std::string>> def) {
  used_.insert(key);
  std::vector<std::string> x;
  if (has(key)) {
    const Json& v = get(key);
    if (!v.is_array()) fail(key, "expected an array of strings");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string())
        fail(key + "[" + std::to_string(i) + "]", "expected a string");
      x.push_back(v[i].get<std::string>());
    }
  } else if (def) {
    x = *def;
  } else {
    fail(key, "missing required key");
  }
  (*out_)[key] = x;
  return x;
}

Vec3 ConfigNode::vec3(const std::string& key, std::optional<Vec3> def) {
  std::optional<std::vector<double>> d;
  if (def) d = std::vector<double>{(*def)[0], (*def)[1], (*def)[2]};
  const std::vector<double> v = numbers(key, d);
  if (v.size() != 3) fail(key, "expected 3 numbers");
  return Vec3(v[0], v[1], v[2]);
}

ConfigNode ConfigNode::child(const std::string& key) {
  used_.insert(key);
  if (has(key) && !in_->at(key).is_object()) fail(key, "expected an object");
  const Json& src = has(key) ? in_->at(key) : empty_object();
  return ConfigNode(src, (*out_)[key], key_path(key));
}

std::vector<ConfigNode> ConfigNode::children(const std::string& key) {
  used_.insert(key);
  std::vector<ConfigNode> out;
  if (!has(key)) {
    (*out_)[key] = Json::array();
    return out;
  }
  const Json& v = in_->at(key);
  if (!v.is_array()) fail(key, "expected an array of objects");
  Json& dst = (*out_)[key];
  dst = Json::array();
  for (std::size_t i = 0; i < v.size(); ++i) dst.push_back(Json::object());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = key_path(key) + "[" + std::to_string(i) + "]";
    if (!v[i].is_object()) throw ConfigError(p + ": expected an object");
    out.emplace_back(v[i], dst[i], p);
  }
  return out;
}

const Json& ConfigNode::raw(const std::string& key) {
  used_.insert(key);
  if (!has(key)) fail(key, "missing required key");
  (*out_)[key] = in_->at(key);
  return in_->at(key);
}

void ConfigNode::finish() const {
  for (auto it = in_->begin(); it != in_->end(); ++it)
    if (!used_.count(it.key())) throw ConfigError(key_path(it.key()) + ": unknown key");
}

// ------------------------------------------------------------------ registries

const std::vector<RegistryEntry>& density_registry() {
  static const std::vector<RegistryEntry> r = {
      {"constant", "value: number = 1", "f = value"},
      {"gaussian", "weights: [3] = [1,1,1]", "psi = -sum w_i p_i^2"},
      {"radial-log", "k: number (required)", "psi = k log|p|"},
      {"linear", "a: [3] = [1,0,0], b: number = 0", "psi = <a,p> + b"},
      {"radial-smooth", "coefficients: [numbers] (required)", "psi = sum g_i |p|^i"},
  };
  return r;
}

const std::vector<RegistryEntry>& boundary_registry() {
  static const std::vector<RegistryEntry> r = {
      {"none", "", "no boundary"},
      {"half-space", "normal: [3] = [0,0,1], offset: number = 0", "{<n,p> >= offset}"},
      {"slab", "axis: integer = 2, half_width: number = 1", "{|p_axis| <= w}"},
      {"ball", "center: [3] = 0, radius: number = 1", "{|p - c| <= r}"},
      {"ball-complement", "center: [3] = 0, radius: number = 1", "{|p - c| >= r}"},
      {"cone", "alpha: number (required), axis: [3] = [0,0,1]",
       "{angle(p, axis) <= alpha}"},
      {"cylinder", "radius: number = 1, axis: integer = 2", "{dist(p, axis line) <= r}"},
  };
  return r;
}

const std::vector<RegistryEntry>& surface_registry() {
  static const std::vector<RegistryEntry> r = {
      {"sphere", "center: [3] = 0, radius: number = 1, perturbation: number = 0",
       "closed round sphere"},
      {"hemisphere", "center: [3] = 0, radius: number = 1, perturbation: number = 0",
       "upper half-sphere, boundary on the equator"},
      {"cap", "alpha: number (required), center: [3] = 0, radius: number = 1",
       "spherical cap of polar half-angle alpha"},
      {"disk", "center: [3] = 0, radius: number = 1, height: number = 0", "flat round disk"},
      {"product-slice", "s0: number = 0, circumference: number = 2 pi, half_width: number = 1",
       "{s0} x S^1 x [-w, w]"},
      {"product-torus", "s0: number = 0, circumferences: [2] = [2 pi, 2 pi]",
       "{s0} x S^1 x S^1"},
  };
  return r;
}

const std::vector<RegistryEntry>& field_registry() {
  static const std::vector<RegistryEntry> r = {
      {"zero", "", "X = 0"},
      {"translation", "vector: [3] (required)", "X = v"},
      {"radial", "center: [3] = 0, a0: number = 1, a: [3] = 0",
       "X = (a0 + <a, p - c>) (p - c)/|p - c|"},
      {"inflation", "center: [3] = 0", "X = p - c"},
      {"rotation", "axis: [3] (required), center: [3] = 0", "X = axis x (p - c)"},
      {"normal-constant", "normal: [3] (required), a0: number = 1, a: [3] = 0",
       "X = (a0 + <a, p>) n"},
      {"sphere-tangential", "a: [3] (required), center: [3] = 0",
       "tangential part of a on spheres about c"},
      {"gradient", "a: [3] = 0, Q: [9] = 0 (row-major)", "X = grad(<a,p> + <p,Qp>/2)"},
      {"sum", "fields: [field specs] (required)", "sum of fields"},
  };
  return r;
}

namespace {

template <class Entries>
std::string known_names(const Entries& e) {
  std::string s;
  for (const auto& x : e) s += (s.empty() ? "" : ", ") + x.name;
  return s;
}

}  // namespace

Density parse_density(ConfigNode n) {
  const std::string name = n.string("name", "constant");
  Density d;
  if (name == "constant") {
    const double v = n.number("value", 1.0);
    if (!(v > 0.0)) n.fail("value", "must be positive");
    d = constant_density(v);
  } else if (name == "gaussian") {
    d = gaussian_density(n.vec3("weights", Vec3(1, 1, 1)));
  } else if (name == "radial-log") {
    d = radial_log_density(n.number("k"));
  } else if (name == "linear") {
    d = linear_density(n.vec3("a", Vec3(1, 0, 0)), n.number("b", 0.0));
  } else if (name == "radial-smooth") {
    const std::vector<double> g = n.numbers("coefficients");
    if (g.empty()) n.fail("coefficients", "must not be empty");
    if (g.size() > 1 && g[1] != 0.0)
      n.fail("coefficients", "the |p| coefficient must be 0 for a smooth density");
    d = radial_smooth_density(g);
  } else {
    n.fail("name", "unknown density '" + name + "' (known: " + known_names(density_registry()) +
                       ")");
  }
  n.finish();
  return d;
}

std::optional<BoundarySpec> parse_boundary(ConfigNode n) {
  const std::string name = n.string("name", "none");
  std::optional<BoundarySpec> b;
  auto positive = [&](const char* key, double def) {
    const double v = n.number(key, def);
    if (!(v > 0.0)) n.fail(key, "must be positive");
    return v;
  };
  auto axis_index = [&] {
    const int a = n.integer("axis", 2);
    if (a < 0 || a > 2) n.fail("axis", "must be 0, 1 or 2");
    return a;
  };
  if (name == "none") {
  } else if (name == "half-space") {
    const Vec3 normal = n.vec3("normal", Vec3(0, 0, 1));
    if (normal.norm() == 0.0) n.fail("normal", "must be non-zero");
    b = half_space_boundary(normal, n.number("offset", 0.0));
  } else if (name == "slab") {
    const int axis = axis_index();
    b = slab_boundary(axis, positive("half_width", 1.0));
  } else if (name == "ball") {
    const Vec3 c = n.vec3("center", Vec3::Zero());
    b = ball_boundary(c, positive("radius", 1.0));
  } else if (name == "ball-complement") {
    const Vec3 c = n.vec3("center", Vec3::Zero());
    b = ball_complement_boundary(c, positive("radius", 1.0));
  } else if (name == "cone") {
    const double alpha = n.number("alpha");
    if (!(alpha > 0.0 && alpha < M_PI)) n.fail("alpha", "must lie in (0, pi)");
    const Vec3 axis = n.vec3("axis", Vec3(0, 0, 1));
    if (axis.norm() == 0.0) n.fail("axis", "must be non-zero");
    b = cone_boundary(alpha, axis);
  } else if (name == "cylinder") {
    const double r = positive("radius", 1.0);
    b = cylinder_boundary(r, axis_index());
  } else {
    n.fail("name", "unknown boundary '" + name + "' (known: " + known_names(boundary_registry()) +
                       ")");
  }
  if (b) b->collar = positive("collar", b->collar);
  n.finish();
  return b;
}

AmbientSpace parse_ambient(ConfigNode n) {
  const std::string kind = n.string("metric_kind", "flat-euclidean");
  const int dim = n.integer("dim", 3);
  if (dim != 3) n.fail("dim", "only surfaces in 3-dimensional ambients are supported");
  Density d = parse_density(n.child("density"));
  std::optional<BoundarySpec> b = parse_boundary(n.child("boundary"));
  AmbientSpace s;
  if (kind == "flat-euclidean") {
    s = euclidean_space(std::move(d), std::move(b), dim);
  } else if (kind == "flat-product") {
    const std::vector<double> L = n.numbers("circumferences", std::vector<double>{2 * M_PI});
    if (L.empty() || L.size() > 2) n.fail("circumferences", "needs one or two entries");
    for (double x : L)
      if (!(x > 0.0)) n.fail("circumferences", "entries must be positive");
    s = product_space(L, std::move(d), std::move(b));
  } else {
    n.fail("metric_kind", "unknown metric kind '" + kind + "' (known: flat-euclidean, flat-product)");
  }
  s.name = kind;
  n.finish();
  return s;
}

namespace {

Immersion parse_chart(ConfigNode n) {
  std::map<std::string, double> params;
  if (n.has("params")) {
    const Json& p = n.raw("params");
    if (!p.is_object()) n.fail("params", "expected an object of numbers");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number()) n.fail("params." + it.key(), "expected a number");
      params[it.key()] = it.value().get<double>();
    }
  }
  Immersion imm;
  imm.name = n.string("name", "chart");
  imm.scale = n.number("scale", 1.0);
  if (!(imm.scale > 0.0)) n.fail("scale", "must be positive");
  auto patches = n.children("patches");
  if (patches.empty()) n.fail("patches", "needs at least one patch");
  for (ConfigNode& pn : patches) {
    auto expr = [&](const char* key) {
      const std::string text = pn.string(key);
      try {
        return std::make_shared<const Expression>(Expression::parse(text, params));
      } catch (const ConfigError& e) {
        pn.fail(key, e.what());
      }
    };
    auto ex = expr("x"), ey = expr("y"), ez = expr("z");
    auto range = [&](const char* key) {
      const std::vector<double> r = pn.numbers(key);
      if (r.size() != 2 || !(r[1] > r[0])) pn.fail(key, "expected [lo, hi] with lo < hi");
      return r;
    };
    const auto ur = range("u"), vr = range("v");
    Patch p = make_patch(
        [ex, ey, ez](auto u, auto v) {
          using T = decltype(u);
          return V3<T>{{ex->eval<T>(u, v), ey->eval<T>(u, v), ez->eval<T>(u, v)}};
        },
        Vec2(ur[0], vr[0]), Vec2(ur[1], vr[1]));
    p.periodic_u = pn.boolean("periodic_u", false);
    p.periodic_v = pn.boolean("periodic_v", false);
    p.cells_u = pn.number("cells_u", 1.0);
    p.cells_v = pn.number("cells_v", 1.0);
    if (!(p.cells_u > 0.0)) pn.fail("cells_u", "must be positive");
    if (!(p.cells_v > 0.0)) pn.fail("cells_v", "must be positive");
    static const std::map<std::string, Side> sides = {
        {"u_lo", SideULo}, {"u_hi", SideUHi}, {"v_lo", SideVLo}, {"v_hi", SideVHi}};
    for (const std::string& s : pn.strings("boundary_sides", std::vector<std::string>{})) {
      auto it = sides.find(s);
      if (it == sides.end())
        pn.fail("boundary_sides", "unknown side '" + s + "' (known: u_lo, u_hi, v_lo, v_hi)");
      p.on_boundary[it->second] = true;
    }
    pn.finish();
    imm.patches.push_back(std::move(p));
  }
  n.finish();
  return imm;
}

}  // namespace

Immersion parse_surface(ConfigNode n) {
  const bool has_builtin = n.has("builtin"), has_chart = n.has("chart");
  if (has_builtin == has_chart) n.fail("builtin", "exactly one of 'builtin' and 'chart' is required");
  const int sign = n.integer("orientation_sign", 1);
  if (sign != 1 && sign != -1) n.fail("orientation_sign", "must be 1 or -1");
  Immersion imm;
  if (has_chart) {
    imm = parse_chart(n.child("chart"));
  } else {
    const std::string name = n.string("builtin");
    auto positive = [&](const char* key, double def) {
      const double v = n.number(key, def);
      if (!(v > 0.0)) n.fail(key, "must be positive");
      return v;
    };
    auto sphere_opts = [&] {
      SphereOptions o;
      o.center = n.vec3("center", Vec3::Zero());
      o.radius = positive("radius", 1.0);
      o.perturbation = n.number("perturbation", 0.0);
      return o;
    };
    if (name == "sphere") {
      imm = sphere_immersion(sphere_opts());
    } else if (name == "hemisphere") {
      imm = hemisphere_immersion(sphere_opts());
    } else if (name == "cap") {
      const double alpha = n.number("alpha");
      if (!(alpha > 0.0 && alpha < M_PI)) n.fail("alpha", "must lie in (0, pi)");
      SphereOptions o;
      o.center = n.vec3("center", Vec3::Zero());
      o.radius = positive("radius", 1.0);
      imm = cap_immersion(alpha, o);
    } else if (name == "disk") {
      const Vec3 c = n.vec3("center", Vec3::Zero());
      const double r = positive("radius", 1.0);
      imm = disk_immersion(c, r, n.number("height", 0.0));
    } else if (name == "product-slice") {
      const double s0 = n.number("s0", 0.0);
      const double L = positive("circumference", 2 * M_PI);
      imm = product_slice_immersion(s0, L, positive("half_width", 1.0));
    } else if (name == "product-torus") {
      const double s0 = n.number("s0", 0.0);
      const std::vector<double> L =
          n.numbers("circumferences", std::vector<double>{2 * M_PI, 2 * M_PI});
      if (L.size() != 2 || !(L[0] > 0.0) || !(L[1] > 0.0))
        n.fail("circumferences", "expected two positive numbers");
      imm = product_torus_immersion(s0, L[0], L[1]);
    } else {
      n.fail("builtin", "unknown surface '" + name + "' (known: " +
                            known_names(surface_registry()) + ")");
    }
  }
  imm.orientation_sign = sign;
  n.finish();
  return imm;
}

VariationField parse_field(ConfigNode n) {
  const std::string name = n.string("name");
  VariationField f;
  auto nonzero = [&](const char* key) {
    const Vec3 v = n.vec3(key);
    if (v.norm() == 0.0) n.fail(key, "must be non-zero");
    return v;
  };
  if (name == "zero") {
    f = zero_field();
  } else if (name == "translation") {
    f = translation_field(n.vec3("vector"));
  } else if (name == "radial") {
    const Vec3 c = n.vec3("center", Vec3::Zero());
    const double a0 = n.number("a0", 1.0);
    f = radial_field(c, a0, n.vec3("a", Vec3::Zero()));
  } else if (name == "inflation") {
    f = inflation_field(n.vec3("center", Vec3::Zero()));
  } else if (name == "rotation") {
    const Vec3 axis = nonzero("axis");
    f = rotation_field(axis, n.vec3("center", Vec3::Zero()));
  } else if (name == "normal-constant") {
    const Vec3 nn = nonzero("normal");
    const double a0 = n.number("a0", 1.0);
    f = normal_constant_field(nn, a0, n.vec3("a", Vec3::Zero()));
  } else if (name == "sphere-tangential") {
    const Vec3 a = n.vec3("a");
    f = sphere_tangential_field(a, n.vec3("center", Vec3::Zero()));
  } else if (name == "gradient") {
    const Vec3 a = n.vec3("a", Vec3::Zero());
    const std::vector<double> q = n.numbers("Q", std::vector<double>(9, 0.0));
    if (q.size() != 9) n.fail("Q", "expected 9 numbers (row-major 3x3)");
    Mat3 Q;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Q(i, j) = q[3 * i + j];
    if ((Q - Q.transpose()).norm() > 0.0) n.fail("Q", "must be symmetric");
    f = gradient_field(a, Q);
  } else if (name == "sum") {
    auto parts = n.children("fields");
    if (parts.empty()) n.fail("fields", "needs at least one field");
    f = parse_field(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) f = sum_field(f, parse_field(parts[i]));
  } else {
    n.fail("name", "unknown field '" + name + "' (known: " + known_names(field_registry()) + ")");
  }
  if (n.has("cutoff")) {
    ConfigNode c = n.child("cutoff");
    BumpCutoff b;
    b.center = c.vec3("center", Vec3::Zero());
    b.radius = c.number("radius", 1.0);
    if (!(b.radius > 0.0)) c.fail("radius", "must be positive");
    c.finish();
    f = with_cutoff(f, b);
  }
  n.finish();
  return f;
}

}  // namespace wstab

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "wstab/errors.hpp"
#include "wstab/surface.hpp"

namespace wstab {

namespace {

struct CellKey {
  long long x, y, z;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL);
  }
};

// Merges coincident points coming from different patches.
class Welder {
 public:
  explicit Welder(double scale) : tol_(1e-9 * scale), cell_(1e-6 * scale) {}

  int insert(const Vec3& p, std::vector<Vec3>& positions) {
    const CellKey k = key(p);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = grid_.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == grid_.end()) continue;
          for (int id : it->second)
            if ((positions[id] - p).norm() <= tol_) return id;
        }
    const int id = static_cast<int>(positions.size());
    positions.push_back(p);
    grid_[k].push_back(id);
    return id;
  }

 private:
  CellKey key(const Vec3& p) const {
    return {std::llround(std::floor(p[0] / cell_)), std::llround(std::floor(p[1] / cell_)),
            std::llround(std::floor(p[2] / cell_))};
  }
  double tol_, cell_;
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid_;
};

int find_root(std::vector<int>& parent, int a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

bool on_side(const Patch& p, const Vec2& a, const Vec2& b, int side) {
  const double eps = 1e-12 * (1.0 + (p.hi - p.lo).norm());
  switch (side) {
    case SideULo: return std::abs(a[0] - p.lo[0]) < eps && std::abs(b[0] - p.lo[0]) < eps;
    case SideUHi: return std::abs(a[0] - p.hi[0]) < eps && std::abs(b[0] - p.hi[0]) < eps;
    case SideVLo: return std::abs(a[1] - p.lo[1]) < eps && std::abs(b[1] - p.lo[1]) < eps;
    default: return std::abs(a[1] - p.hi[1]) < eps && std::abs(b[1] - p.hi[1]) < eps;
  }
}

double corner_angle_deg(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = b - a, v = c - a;
  const double cs = u.dot(v) / (u.norm() * v.norm());
  return std::acos(std::clamp(cs, -1.0, 1.0)) * 180.0 / M_PI;
}

}  // namespace

SurfaceMesh mesh_from_immersion(const AmbientSpace& space, ImmersionPtr imm, int resolution) {
  if (!imm) throw InputError("mesh_from_immersion: null immersion");
  if (resolution < 4) throw InputError("resolution must be at least 4");
  SurfaceMesh mesh;
  mesh.immersion = imm;
  mesh.resolution = resolution;
  Welder welder(imm->scale);

  for (std::size_t pi = 0; pi < imm->patches.size(); ++pi) {
    const Patch& p = imm->patches[pi];
    const int nu = std::max(1, static_cast<int>(std::lround(resolution * p.cells_u)));
    const int nv = std::max(1, static_cast<int>(std::lround(resolution * p.cells_v)));
    auto param = [&](int i, int j) {
      return Vec2(p.lo[0] + (p.hi[0] - p.lo[0]) * double(i) / nu,
                  p.lo[1] + (p.hi[1] - p.lo[1]) * double(j) / nv);
    };
    std::vector<int> ids((nu + 1) * (nv + 1));
    for (int j = 0; j <= nv; ++j)
      for (int i = 0; i <= nu; ++i) {
        const int ci = p.periodic_u && i == nu ? 0 : i;
        const int cj = p.periodic_v && j == nv ? 0 : j;
        if (ci != i || cj != j) {
          ids[j * (nu + 1) + i] = ids[cj * (nu + 1) + ci];
          continue;
        }
        const Vec2 uv = param(i, j);
        ids[j * (nu + 1) + i] = welder.insert(p.eval(uv[0], uv[1]), mesh.positions);
      }
    for (int j = 0; j <= nv; ++j)
      for (int i = 0; i <= nu; ++i) {
        const int ci = p.periodic_u && i == nu ? 0 : i;
        const int cj = p.periodic_v && j == nv ? 0 : j;
        ids[j * (nu + 1) + i] = ids[cj * (nu + 1) + ci];
      }
    auto id = [&](int i, int j) { return ids[j * (nu + 1) + i]; };
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu; ++i) {
        const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
        const Vec2 ua = param(i, j), ub = param(i + 1, j), uc = param(i + 1, j + 1),
                   ud = param(i, j + 1);
        auto push = [&](int v0, int v1, int v2, Vec2 p0, Vec2 p1, Vec2 p2) {
          Triangle t;
          t.v = {v0, v1, v2};
          t.patch = static_cast<int>(pi);
          t.uv = {p0, p1, p2};
          mesh.triangles.push_back(t);
        };
        if ((i + j) % 2 == 0) {
          push(a, b, c, ua, ub, uc);
          push(a, c, d, ua, uc, ud);
        } else {
          push(a, b, d, ua, ub, ud);
          push(b, c, d, ub, uc, ud);
        }
      }
  }

  // Edge incidence and orientation consistency.
  struct EdgeUse {
    int count = 0;
    int tri = -1, c0 = 0, c1 = 0;
    int from = -1;
  };
  std::map<std::pair<int, int>, EdgeUse> edges;
  for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2])
      throw MeshingError("degenerate triangle after welding");
    for (int k = 0; k < 3; ++k) {
      const int a = t.v[k], b = t.v[(k + 1) % 3];
      EdgeUse& e = edges[{std::min(a, b), std::max(a, b)}];
      if (e.count == 1 && e.from == a) throw MeshingError("inconsistent triangle orientation");
      if (++e.count > 2) throw MeshingError("non-manifold edge");
      if (e.count == 1) {
        e.tri = static_cast<int>(ti);
        e.c0 = k;
        e.c1 = (k + 1) % 3;
        e.from = a;
      }
    }
  }
  mesh.edge_count = static_cast<int>(edges.size());

  std::vector<int> parent(mesh.positions.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<char> on_bdry(mesh.positions.size(), 0);
  for (const auto& [key, e] : edges) {
    if (e.count != 1) continue;
    const Triangle& t = mesh.triangles[e.tri];
    const Patch& p = imm->patches[t.patch];
    bool flagged = false;
    for (int side = 0; side < 4; ++side)
      if (p.on_boundary[side] && on_side(p, t.uv[e.c0], t.uv[e.c1], side)) flagged = true;
    if (!flagged) throw MeshingError("free mesh edge away from the boundary arcs");
    BoundaryEdge be;
    be.v0 = t.v[e.c0];
    be.v1 = t.v[e.c1];
    be.tri = e.tri;
    be.corner0 = e.c0;
    be.corner1 = e.c1;
    mesh.boundary_edges.push_back(be);
    on_bdry[be.v0] = on_bdry[be.v1] = 1;
    parent[find_root(parent, be.v0)] = find_root(parent, be.v1);
  }

  if (!mesh.boundary_edges.empty()) {
    if (!space.boundary) throw MeshingError("surface has boundary but M has no boundary");
    const BoundarySpec& bd = *space.boundary;
    for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
      if (!on_bdry[i]) continue;
      Vec3& x = mesh.positions[i];
      for (int it = 0; it < 3 && std::abs(bd.phi(x)) > 1e-14; ++it) {
        const Vec3 g = bd.grad_phi(x);
        x -= bd.phi(x) * g / g.squaredNorm();
      }
      if (std::abs(bd.phi(x)) > 1e-10) {
        std::ostringstream os;
        os << "boundary vertex " << i << " cannot be projected onto {Phi = 0} (residual "
           << std::abs(bd.phi(x)) << ")";
        throw MeshingError(os.str());
      }
    }
  }

  std::vector<char> seen(mesh.positions.size(), 0);
  int loops = 0;
  for (const auto& be : mesh.boundary_edges) {
    const int r = find_root(parent, be.v0);
    if (!seen[r]) {
      seen[r] = 1;
      ++loops;
    }
  }
  mesh.boundary_components = loops;
  mesh.genus = (2 - loops - mesh.euler_characteristic()) / 2;

  double min_angle = 180.0;
  for (const auto& t : mesh.triangles) {
    const Patch& p = imm->patches[t.patch];
    Vec3 c[3];
    for (int k = 0; k < 3; ++k) c[k] = p.eval(t.uv[k][0], t.uv[k][1]);
    for (int k = 0; k < 3; ++k)
      min_angle = std::min(min_angle, corner_angle_deg(c[k], c[(k + 1) % 3], c[(k + 2) % 3]));
  }
  mesh.min_angle_deg = min_angle;
  if (min_angle < 5.0) {
    std::ostringstream os;
    os << "minimum triangle angle " << min_angle << " deg is below 5 deg";
    throw MeshingError(os.str());
  }
  return mesh;
}

// ------------------------------------------------------------ file formats

namespace {
std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void write_off(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "OFF\n" << mesh.positions.size() << ' ' << mesh.triangles.size() << " 0\n";
  for (const auto& p : mesh.positions) out << num(p[0]) << ' ' << num(p[1]) << ' ' << num(p[2]) << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  std::ofstream side(path + ".boundary");
  if (!side) throw InputError("cannot write " + path + ".boundary");
  side << "# oriented boundary edges: v0 v1\n" << mesh.boundary_edges.size() << '\n';
  for (const auto& e : mesh.boundary_edges) side << e.v0 << ' ' << e.v1 << '\n';
}

SurfaceMesh read_off(const std::string& path, ImmersionPtr imm) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::string magic;
  in >> magic;
  if (magic != "OFF") throw InputError(path + ": not an OFF file");
  int nv = 0, nf = 0, ne = 0;
  in >> nv >> nf >> ne;
  if (!in || nv < 0 || nf < 0) throw InputError(path + ": bad OFF header");
  SurfaceMesh mesh;
  mesh.immersion = std::move(imm);
  mesh.positions.resize(nv);
  for (auto& p : mesh.positions) in >> p[0] >> p[1] >> p[2];
  std::map<std::pair<int, int>, int> edges;
  for (int f = 0; f < nf; ++f) {
    int k = 0;
    in >> k;
    if (k != 3) throw InputError(path + ": only triangle faces are supported");
    Triangle t;
    in >> t.v[0] >> t.v[1] >> t.v[2];
    for (int i = 0; i < 3; ++i) {
      if (t.v[i] < 0 || t.v[i] >= nv) throw InputError(path + ": face index out of range");
      const int a = t.v[i], b = t.v[(i + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
    mesh.triangles.push_back(t);
  }
  if (!in) throw InputError(path + ": truncated OFF file");
  mesh.edge_count = static_cast<int>(edges.size());
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<char> bv(nv, 0);
  for (const auto& [e, c] : edges)
    if (c == 1) {
      BoundaryEdge be;
      be.v0 = e.first;
      be.v1 = e.second;
      mesh.boundary_edges.push_back(be);
      bv[e.first] = bv[e.second] = 1;
      parent[find_root(parent, e.first)] = find_root(parent, e.second);
    }
  int loops = 0;
  for (int i = 0; i < nv; ++i)
    if (bv[i] && find_root(parent, i) == i) ++loops;
  mesh.boundary_components = loops;
  mesh.genus = (2 - loops - mesh.euler_characteristic()) / 2;
  return mesh;
}

void write_geometry_csv(const ExtrinsicData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "tri,qp,x,y,z,H,H_f,K,Ric_f_NN,sigma_norm\n";
  for (const auto& s : data.interior)
    out << s.tri << ',' << s.qp << ',' << num(s.x[0]) << ',' << num(s.x[1]) << ',' << num(s.x[2])
        << ',' << num(s.H) << ',' << num(s.H_f) << ',' << num(s.K) << ',' << num(s.ric_f_nn) << ','
        << num(s.sigma_norm) << '\n';
}

}  // namespace wstab

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "whodge/error.hpp"
#include "whodge/mesh.hpp"
#include "whodge/quadrature.hpp"

namespace whodge {

namespace {

double wrap_delta(double d, double period) {
  if (period <= 0) return d;
  return d - period * std::round(d / period);
}

Point unwrap(const Point& base, const Point& x, const Point& per) {
  return {base[0] + wrap_delta(x[0] - base[0], per[0]), base[1] + wrap_delta(x[1] - base[1], per[1])};
}

Point wrap_into(const Point& x, const Point& per) {
  Point r = x;
  for (int k = 0; k < 2; ++k)
    if (per[k] > 0) {
      r[k] = std::fmod(r[k], per[k]);
      if (r[k] < 0) r[k] += per[k];
    }
  return r;
}

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

Point wrap_point(const DomainSpec& spec, const Point& x) { return wrap_into(x, spec.period()); }

std::array<Point, 3> SimplicialComplex::simplex_points(int p, int i) const {
  std::array<Point, 3> out{};
  const auto& s = simplices[p][i];
  const Point per = domain.period();
  out[0] = vertex_coords[s[0]];
  for (int k = 1; k <= p; ++k) out[k] = unwrap(out[0], vertex_coords[s[k]], per);
  return out;
}

double SimplicialComplex::top_volume(int i) const {
  const auto x = simplex_points(dim, i);
  if (dim == 1) return x[1][0] - x[0][0];
  return 0.5 * ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[2][0] - x[0][0]) * (x[1][1] - x[0][1]));
}

std::vector<int> SimplicialComplex::interior_indices(int p) const {
  std::vector<int> idx;
  for (int i = 0; i < count(p); ++i)
    if (!boundary_marker[p][i]) idx.push_back(i);
  return idx;
}

int SimplicialComplex::boundary_count(int p) const {
  return static_cast<int>(std::count(boundary_marker[p].begin(), boundary_marker[p].end(), 1));
}

SimplicialComplex build_complex(int dim, std::vector<Point> coords, std::vector<std::array<int, 3>> tops,
                                const DomainSpec& spec) {
  SimplicialComplex c;
  c.dim = dim;
  c.domain = spec;
  c.vertex_coords = std::move(coords);
  const Point per = spec.period();
  const int nv = static_cast<int>(c.vertex_coords.size());
  for (int v = 0; v < nv; ++v) c.simplices[0].push_back({v, -1, -1});

  auto edge_len = [&](int a, int b) {
    return dist(c.vertex_coords[a], unwrap(c.vertex_coords[a], c.vertex_coords[b], per));
  };

  if (dim == 1) {
    for (auto t : tops) {
      const Point xb = unwrap(c.vertex_coords[t[0]], c.vertex_coords[t[1]], per);
      if (xb[0] < c.vertex_coords[t[0]][0]) std::swap(t[0], t[1]);
      if (t[0] == t[1]) throw Error("build_complex: degenerate edge");
      c.simplices[1].push_back({t[0], t[1], -1});
      c.faces[1].push_back({t[0], t[1], -1});
      c.face_signs[1].push_back({-1, 1, 0});
    }
    std::vector<int> deg(nv, 0);
    for (const auto& e : c.simplices[1]) ++deg[e[0]], ++deg[e[1]];
    c.boundary_marker[0].assign(nv, 0);
    c.boundary_marker[1].assign(c.count(1), 0);
    for (int v = 0; v < nv; ++v) {
      if (deg[v] == 0) throw Error("build_complex: isolated vertex");
      if (deg[v] > 2) throw Error("build_complex: non-manifold vertex");
      c.boundary_marker[0][v] = deg[v] == 1;
    }
    for (const auto& e : c.simplices[1]) c.mesh_size_h = std::max(c.mesh_size_h, edge_len(e[0], e[1]));
    return c;
  }

  // 2D: orient triangles (sorted, then counterclockwise).
  for (auto& t : tops) {
    std::sort(t.begin(), t.end());
    const Point a = c.vertex_coords[t[0]];
    const Point b = unwrap(a, c.vertex_coords[t[1]], per);
    const Point d = unwrap(a, c.vertex_coords[t[2]], per);
    const double det = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
    if (std::abs(det) < 1e-300 || t[0] == t[1] || t[1] == t[2])
      throw Error("build_complex: degenerate triangle");
    if (det < 0) std::swap(t[1], t[2]);
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(3 * tops.size());
  for (const auto& t : tops)
    for (int k = 0; k < 3; ++k) {
      const int u = t[k], v = t[(k + 1) % 3];
      edges.push_back({std::min(u, v), std::max(u, v)});
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  auto edge_id = [&](int u, int v) {
    const std::pair<int, int> key{std::min(u, v), std::max(u, v)};
    return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), key) - edges.begin());
  };
  for (const auto& [u, v] : edges) {
    c.simplices[1].push_back({u, v, -1});
    c.faces[1].push_back({u, v, -1});
    c.face_signs[1].push_back({-1, 1, 0});
  }
  std::vector<int> edge_deg(edges.size(), 0);
  for (const auto& t : tops) {
    c.simplices[2].push_back(t);
    // ∂[a,b,c] = [b,c] - [a,c] + [a,b]
    const int fa[3][2] = {{t[1], t[2]}, {t[0], t[2]}, {t[0], t[1]}};
    const int base[3] = {1, -1, 1};
    std::array<int, 3> f{}, s{};
    for (int k = 0; k < 3; ++k) {
      f[k] = edge_id(fa[k][0], fa[k][1]);
      s[k] = fa[k][0] < fa[k][1] ? base[k] : -base[k];
      ++edge_deg[f[k]];
    }
    c.faces[2].push_back(f);
    c.face_signs[2].push_back(s);
  }
  c.boundary_marker[0].assign(nv, 0);
  c.boundary_marker[1].assign(edges.size(), 0);
  c.boundary_marker[2].assign(tops.size(), 0);
  std::vector<char> used(nv, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edge_deg[e] > 2) throw Error("build_complex: non-manifold edge");
    if (edge_deg[e] == 1) {
      c.boundary_marker[1][e] = 1;
      c.boundary_marker[0][edges[e].first] = 1;
      c.boundary_marker[0][edges[e].second] = 1;
    }
    used[edges[e].first] = used[edges[e].second] = 1;
    c.mesh_size_h = std::max(c.mesh_size_h, edge_len(edges[e].first, edges[e].second));
  }
  for (int v = 0; v < nv; ++v)
    if (!used[v]) throw Error("build_complex: isolated vertex");
  return c;
}

SimplicialComplex refine(const SimplicialComplex& c) {
  const Point per = c.domain.period();
  std::vector<Point> coords = c.vertex_coords;
  const int nv = c.count(0);
  for (int e = 0; e < c.count(1); ++e) {
    const auto x = c.simplex_points(1, e);
    Point m{0.5 * (x[0][0] + x[1][0]), 0.5 * (x[0][1] + x[1][1])};
    m = wrap_into(m, per);
    if (c.dim == 2 && c.boundary_marker[1][e]) m = project_to_boundary(c.domain, m);
    coords.push_back(m);
  }
  std::vector<std::array<int, 3>> tops;
  if (c.dim == 1) {
    for (int e = 0; e < c.count(1); ++e) {
      const auto& s = c.simplices[1][e];
      tops.push_back({s[0], nv + e, -1});
      tops.push_back({nv + e, s[1], -1});
    }
  } else {
    for (int t = 0; t < c.count(2); ++t) {
      const auto& v = c.simplices[2][t];
      const auto& f = c.faces[2][t];
      // faces: f[0] = [v1,v2], f[1] = [v0,v2], f[2] = [v0,v1]
      const int m12 = nv + f[0], m02 = nv + f[1], m01 = nv + f[2];
      tops.push_back({v[0], m01, m02});
      tops.push_back({m01, v[1], m12});
      tops.push_back({m02, m12, v[2]});
      tops.push_back({m01, m12, m02});
    }
  }
  return build_complex(c.dim, std::move(coords), std::move(tops), c.domain);
}

IncidenceMatrix incidence_matrix(const SimplicialComplex& c, int p) {
  if (p < 0 || p >= c.dim) throw std::out_of_range("incidence_matrix: p out of range");
  std::vector<Eigen::Triplet<int>> trip;
  for (int i = 0; i < c.count(p + 1); ++i)
    for (int k = 0; k <= p + 1; ++k) trip.emplace_back(i, c.faces[p + 1][i][k], c.face_signs[p + 1][i][k]);
  IncidenceMatrix D;
  D.degree = p;
  D.entries.resize(c.count(p + 1), c.count(p));
  D.entries.setFromTriplets(trip.begin(), trip.end());
  return D;
}

BoundaryGeometry boundary_geometry(const SimplicialComplex& c, const DomainSpec& spec, int quad_order) {
  if (quad_order < 1) throw ValidationError("quad_order", "must be >= 1");
  BoundaryGeometry bg;
  bg.ambient_dim = c.dim;
  if (!spec.has_boundary()) return bg;
  if (c.dim == 1) {
    const double mid = 0.5 * (spec.parameters[0] + spec.parameters[1]);
    for (int v = 0; v < c.count(0); ++v)
      if (c.boundary_marker[0][v]) {
        const Point x = c.vertex_coords[v];
        bg.points.push_back({x, {x[0] < mid ? -1.0 : 1.0, 0.0}, 0.0, 0.0, 1.0});
      }
    return bg;
  }
  const auto loops = boundary_loops(spec);
  const quad::Rule1D& g = quad::segment_rule(quad_order);
  double scale = 0.0;
  for (const Point& x : c.vertex_coords) scale = std::max({scale, std::abs(x[0]), std::abs(x[1])});
  const double tol = 1e-9 * std::max(1.0, scale);
  for (int e = 0; e < c.count(1); ++e) {
    if (!c.boundary_marker[1][e]) continue;
    const Point a = c.vertex_coords[c.simplices[1][e][0]];
    const Point b = c.vertex_coords[c.simplices[1][e][1]];
    const CurvePiece* best = nullptr;
    double best_d = INFINITY, ta = 0, tb = 0;
    for (const auto& loop : loops)
      for (const CurvePiece& piece : loop) {
        const auto [sa, da] = piece.project(a);
        const auto [sb, db] = piece.project(b);
        const double d = std::max(da, db);
        if (d < best_d) best_d = d, best = &piece, ta = sa, tb = sb;
      }
    if (best && best_d <= tol) {
      const bool full = best->type == CurvePiece::Type::arc &&
                        std::abs(std::abs(best->theta1 - best->theta0) - 2 * std::numbers::pi) < 1e-12;
      if (full && std::abs(tb - ta) > 0.5) (ta < tb ? ta : tb) += 1.0;
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double t = ta + g.x[i] * (tb - ta);
        bg.points.push_back({best->point(t), best->normal(t), best->k1(), best->k1(),
                             best->speed() * std::abs(tb - ta) * g.w[i]});
      }
    } else {
      // Edge not on the analytic curve (e.g. imported mesh): use the chord.
      const double L = dist(a, b);
      Point n{(b[1] - a[1]) / L, -(b[0] - a[0]) / L};
      // Orient outward using the adjacent triangle.
      for (int t = 0; t < c.count(2); ++t) {
        const auto& f = c.faces[2][t];
        if (f[0] != e && f[1] != e && f[2] != e) continue;
        const auto x = c.simplex_points(2, t);
        const Point cen{(x[0][0] + x[1][0] + x[2][0]) / 3, (x[0][1] + x[1][1] + x[2][1]) / 3};
        if ((cen[0] - a[0]) * n[0] + (cen[1] - a[1]) * n[1] > 0) n = {-n[0], -n[1]};
        break;
      }
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double t = g.x[i];
        bg.points.push_back({{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}, n, 0.0, 0.0, L * g.w[i]});
      }
    }
  }
  return bg;
}

std::vector<QuadPoint> mesh_interior_rule(const SimplicialComplex& c, int quad_order) {
  std::vector<QuadPoint> pts;
  const Point per = c.domain.period();
  if (c.dim == 1) {
    const quad::Rule1D& g = quad::segment_rule(quad_order);
    for (int e = 0; e < c.count(1); ++e) {
      const auto x = c.simplex_points(1, e);
      const double L = x[1][0] - x[0][0];
      for (std::size_t i = 0; i < g.x.size(); ++i)
        pts.push_back({wrap_into({x[0][0] + g.x[i] * L, 0.0}, per), L * g.w[i]});
    }
    return pts;
  }
  const quad::RuleTri& r = quad::triangle_rule(quad_order);
  for (int t = 0; t < c.count(2); ++t) {
    const auto x = c.simplex_points(2, t);
    const double A = c.top_volume(t);
    for (std::size_t i = 0; i < r.w.size(); ++i) {
      const auto& l = r.bary[i];
      const Point q{l[0] * x[0][0] + l[1] * x[1][0] + l[2] * x[2][0],
                    l[0] * x[0][1] + l[1] * x[1][1] + l[2] * x[2][1]};
      pts.push_back({wrap_into(q, per), A * r.w[i]});
    }
  }
  return pts;
}

double min_angle_degrees(const SimplicialComplex& c) {
  if (c.dim != 2) return 180.0;
  double best = 180.0;
  for (int t = 0; t < c.count(2); ++t) {
    const auto x = c.simplex_points(2, t);
    for (int k = 0; k < 3; ++k) {
      const Point& o = x[k];
      const Point& p = x[(k + 1) % 3];
      const Point& q = x[(k + 2) % 3];
      const double ux = p[0] - o[0], uy = p[1] - o[1], vx = q[0] - o[0], vy = q[1] - o[1];
      const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
      best = std::min(best, ang * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

void write_off(std::ostream& os, const SimplicialComplex& c) {
  if (c.dim != 2) throw Error("write_off: only 2D complexes can be exported");
  os.precision(17);
  os << "OFF\n" << c.count(0) << " " << c.count(2) << " 0\n";
  for (const Point& x : c.vertex_coords) os << x[0] << " " << x[1] << " 0\n";
  for (const auto& t : c.simplices[2]) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

SimplicialComplex read_off(std::istream& is, const DomainSpec& spec) {
  auto next_line = [&](std::string& line) {
    while (std::getline(is, line)) {
      const auto pos = line.find('#');
      if (pos != std::string::npos) line.erase(pos);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  std::string line;
  if (!next_line(line) || line.substr(0, 3) != "OFF") throw ValidationError("off", "missing OFF header");
  std::istringstream rest(line.substr(3));
  int nv = -1, nf = -1, ne = 0;
  if (!(rest >> nv >> nf >> ne)) {
    if (!next_line(line)) throw ValidationError("off", "missing counts line");
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) throw ValidationError("off", "bad counts line");
  }
  if (nv <= 0 || nf <= 0) throw ValidationError("off", "empty mesh");
  std::vector<Point> coords(nv);
  for (int i = 0; i < nv; ++i) {
    if (!next_line(line)) throw ValidationError("off", "truncated vertex list");
    std::istringstream ls(line);
    double z = 0;
    if (!(ls >> coords[i][0] >> coords[i][1])) throw ValidationError("off", "bad vertex line");
    ls >> z;
  }
  std::vector<std::array<int, 3>> tris(nf);
  for (int i = 0; i < nf; ++i) {
    if (!next_line(line)) throw ValidationError("off", "truncated face list");
    std::istringstream ls(line);
    int k = 0;
    ls >> k;
    if (k != 3) throw ValidationError("off", "only triangular faces are supported");
    ls >> tris[i][0] >> tris[i][1] >> tris[i][2];
    for (int v : tris[i])
      if (v < 0 || v >= nv) throw ValidationError("off", "face index out of range");
  }
  return build_complex(2, std::move(coords), std::move(tris), spec);
}

}  // namespace whodge

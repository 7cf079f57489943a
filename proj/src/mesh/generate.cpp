#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "whodge/error.hpp"
#include "whodge/mesh.hpp"

namespace whodge {

namespace {

constexpr double kPi = std::numbers::pi;

int cells(double length, double spacing) {
  return std::max(1, static_cast<int>(std::ceil(length / spacing - 1e-9)));
}

SimplicialComplex interval_mesh(const DomainSpec& s, double h) {
  const double a = s.parameters[0], b = s.parameters[1];
  const int n = cells(b - a, h);
  std::vector<Point> x(n + 1);
  std::vector<std::array<int, 3>> e;
  for (int i = 0; i <= n; ++i) x[i] = {a + (b - a) * i / n, 0.0};
  x[n][0] = b;
  for (int i = 0; i < n; ++i) e.push_back({i, i + 1, -1});
  return build_complex(1, std::move(x), std::move(e), s);
}

SimplicialComplex circle_mesh(const DomainSpec& s, double h) {
  const double L = s.parameters[0];
  const int n = std::max(3, cells(L, h));
  std::vector<Point> x(n);
  std::vector<std::array<int, 3>> e;
  for (int i = 0; i < n; ++i) x[i] = {L * i / n, 0.0};
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, -1});
  return build_complex(1, std::move(x), std::move(e), s);
}

SimplicialComplex grid_mesh(const DomainSpec& s, double h, bool periodic) {
  double x0 = 0, x1, y0 = 0, y1;
  if (periodic) {
    const Point per = s.period();
    x1 = per[0], y1 = per[1];
  } else {
    x0 = s.parameters[0], x1 = s.parameters[1], y0 = s.parameters[2], y1 = s.parameters[3];
  }
  const double spacing = h / std::sqrt(2.0);
  int nx = cells(x1 - x0, spacing), ny = cells(y1 - y0, spacing);
  if (periodic) nx = std::max(nx, 3), ny = std::max(ny, 3);
  const int cx = periodic ? nx : nx + 1, cy = periodic ? ny : ny + 1;
  std::vector<Point> x;
  for (int j = 0; j < cy; ++j)
    for (int i = 0; i < cx; ++i) x.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  auto id = [&](int i, int j) { return (j % cy) * cx + (i % cx); };
  std::vector<std::array<int, 3>> t;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      t.push_back({a, b, c});
      t.push_back({a, c, d});
    }
  return build_complex(2, std::move(x), std::move(t), s);
}

// Triangulates the strip between two concentric rings whose vertices are
// uniformly spaced in angle starting at angle 0.
void zip_rings(const std::vector<int>& inner, const std::vector<int>& outer,
               std::vector<std::array<int, 3>>& t) {
  const int n1 = static_cast<int>(inner.size()), n2 = static_cast<int>(outer.size());
  int i = 0, j = 0;
  while (i < n1 || j < n2) {
    const double ai = double(i + 1) / n1, aj = double(j + 1) / n2;
    if (j == n2 || (i < n1 && ai <= aj)) {
      t.push_back({inner[i], inner[(i + 1) % n1], outer[j % n2]});
      ++i;
    } else {
      t.push_back({inner[i % n1], outer[(j + 1) % n2], outer[j]});
      ++j;
    }
  }
}

SimplicialComplex polar_mesh(const DomainSpec& s, double h, double factor) {
  const bool disk = s.kind == DomainKind::disk;
  const double r0 = disk ? 0.0 : s.parameters[0];
  const double r1 = disk ? s.parameters[0] : s.parameters[1];
  const int K = cells(r1 - r0, h / factor);
  std::vector<Point> x;
  std::vector<std::array<int, 3>> t;
  std::vector<int> prev;
  auto ring = [&](double r, int n) {
    std::vector<int> ids;
    for (int j = 0; j < n; ++j) {
      const double th = 2 * kPi * j / n;
      ids.push_back(static_cast<int>(x.size()));
      x.push_back({r * std::cos(th), r * std::sin(th)});
    }
    return ids;
  };
  const double dr = (r1 - r0) / K;
  if (disk) {
    x.push_back({0.0, 0.0});
    prev = ring(dr, 6);
    for (int j = 0; j < 6; ++j) t.push_back({0, prev[j], prev[(j + 1) % 6]});
  } else {
    prev = ring(r0, std::max(8, static_cast<int>(std::ceil(2 * kPi * r0 / dr))));
  }
  for (int k = disk ? 2 : 1; k <= K; ++k) {
    const double r = r0 + dr * k;
    const int n = disk ? 6 * k : std::max(8, static_cast<int>(std::ceil(2 * kPi * r / dr)));
    std::vector<int> cur = ring(r, n);
    zip_rings(prev, cur, t);
    prev = std::move(cur);
  }
  // Boundary rings sit exactly on the circles.
  for (Point& p : x) {
    const double rr = std::hypot(p[0], p[1]);
    if (std::abs(rr - r1) < 1e-12 * r1) p = {r1 * p[0] / rr, r1 * p[1] / rr};
  }
  return build_complex(2, std::move(x), std::move(t), s);
}

// ---------------------------------------------------------------------------
// Bowyer-Watson Delaunay triangulation for polygonal domains.

struct Tri {
  int v[3];
  double cx, cy, r2;
  bool alive;
};

Tri make_tri(const std::vector<Point>& P, int a, int b, int c) {
  const double ax = P[a][0], ay = P[a][1], bx = P[b][0], by = P[b][1], qx = P[c][0], qy = P[c][1];
  const double d = 2 * (ax * (by - qy) + bx * (qy - ay) + qx * (ay - by));
  const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = qx * qx + qy * qy;
  const double ux = (a2 * (by - qy) + b2 * (qy - ay) + c2 * (ay - by)) / d;
  const double uy = (a2 * (qx - bx) + b2 * (ax - qx) + c2 * (bx - ax)) / d;
  return {{a, b, c}, ux, uy, (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy), true};
}

std::vector<std::array<int, 3>> delaunay(std::vector<Point> P) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const Point& p : P) {
    xmin = std::min(xmin, p[0]), xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]), ymax = std::max(ymax, p[1]);
  }
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  const double R = 20.0 * std::max(xmax - xmin, ymax - ymin);
  const int n = static_cast<int>(P.size());
  P.push_back({cx - R, cy - R});
  P.push_back({cx + R, cy - R});
  P.push_back({cx, cy + R});
  std::vector<Tri> tris{make_tri(P, n, n + 1, n + 2)};
  for (int k = 0; k < n; ++k) {
    const double px = P[k][0], py = P[k][1];
    std::vector<std::pair<int, int>> poly;
    for (Tri& t : tris) {
      if (!t.alive) continue;
      const double dx = px - t.cx, dy = py - t.cy;
      if (dx * dx + dy * dy < t.r2 * (1 - 1e-12)) {
        t.alive = false;
        for (int e = 0; e < 3; ++e) poly.push_back({t.v[e], t.v[(e + 1) % 3]});
      }
    }
    std::vector<std::pair<int, int>> boundary;
    for (const auto& e : poly) {
      bool shared = false;
      for (const auto& f : poly)
        if (f.first == e.second && f.second == e.first) {
          shared = true;
          break;
        }
      if (!shared) boundary.push_back(e);
    }
    for (const auto& e : boundary) tris.push_back(make_tri(P, e.first, e.second, k));
    if (tris.size() > 8 * static_cast<std::size_t>(n) + 64) {
      std::vector<Tri> live;
      for (const Tri& t : tris)
        if (t.alive) live.push_back(t);
      tris.swap(live);
    }
  }
  std::vector<std::array<int, 3>> out;
  for (const Tri& t : tris)
    if (t.alive && t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back({t.v[0], t.v[1], t.v[2]});
  return out;
}

double dist_to_boundary(const std::vector<std::vector<CurvePiece>>& loops, const Point& x) {
  double d = INFINITY;
  for (const auto& loop : loops)
    for (const CurvePiece& c : loop) d = std::min(d, c.project(x).second);
  return d;
}

SimplicialComplex polygon_mesh(const DomainSpec& s, double h, double factor) {
  const auto loops = boundary_loops(s);
  const double spacing = factor * h;
  // Boundary samples, piece endpoints included.
  std::vector<Point> bpts;
  std::vector<std::pair<int, int>> segs;
  for (const auto& loop : loops) {
    const int first = static_cast<int>(bpts.size());
    for (const CurvePiece& c : loop) {
      const int m = cells(c.length(), spacing);
      for (int k = 0; k < m; ++k) bpts.push_back(c.point(double(k) / m));
    }
    const int last = static_cast<int>(bpts.size());
    for (int i = first; i < last; ++i) segs.push_back({i, i + 1 < last ? i + 1 : first});
  }
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const Point& p : bpts) {
    xmin = std::min(xmin, p[0]), xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]), ymax = std::max(ymax, p[1]);
  }
  std::vector<Point> P = bpts;
  const double dy = spacing * std::sqrt(3.0) / 2;
  int row = 0;
  for (double y = ymin + 0.5 * dy; y < ymax; y += dy, ++row)
    for (double x = xmin + (row % 2 ? 0.5 * spacing : 0.0); x < xmax; x += spacing) {
      const Point q{x, y};
      if (point_inside(s, q) && dist_to_boundary(loops, q) > 0.55 * spacing) P.push_back(q);
    }
  const int nb = static_cast<int>(bpts.size());
  std::vector<std::array<int, 3>> tris;
  for (int pass = 0; pass < 4; ++pass) {
    tris.clear();
    for (const auto& t : delaunay(P)) {
      const Point c{(P[t[0]][0] + P[t[1]][0] + P[t[2]][0]) / 3, (P[t[0]][1] + P[t[1]][1] + P[t[2]][1]) / 3};
      if (point_inside(s, c)) tris.push_back(t);
    }
    if (pass == 3) break;
    // Laplacian smoothing of interior points.
    std::vector<Point> acc(P.size(), {0.0, 0.0});
    std::vector<int> deg(P.size(), 0);
    for (const auto& t : tris)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          if (k != l) acc[t[k]][0] += P[t[l]][0], acc[t[k]][1] += P[t[l]][1], ++deg[t[k]];
    for (std::size_t i = nb; i < P.size(); ++i)
      if (deg[i] > 0) {
        const Point q{acc[i][0] / deg[i], acc[i][1] / deg[i]};
        if (point_inside(s, q)) P[i] = q;
      }
  }
  std::set<std::pair<int, int>> edges;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) edges.insert({std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])});
  for (const auto& [a, b] : segs)
    if (!edges.count({std::min(a, b), std::max(a, b)}))
      throw Error("polygon mesh: boundary segment missing from triangulation");
  // Drop unused points and compact.
  std::vector<int> remap(P.size(), -1);
  std::vector<Point> coords;
  for (auto& t : tris)
    for (int& v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(coords.size());
        coords.push_back(P[v]);
      }
      v = remap[v];
    }
  return build_complex(2, std::move(coords), std::move(tris), s);
}

}  // namespace

SimplicialComplex generate_mesh(const DomainSpec& spec, double target_h) {
  if (!(target_h > 0) || !std::isfinite(target_h)) throw ValidationError("target_h", "must be positive");
  spec.validate();
  switch (spec.kind) {
    case DomainKind::interval: return interval_mesh(spec, target_h);
    case DomainKind::circle: return circle_mesh(spec, target_h);
    case DomainKind::rectangle: return grid_mesh(spec, target_h, false);
    case DomainKind::flat_torus: return grid_mesh(spec, target_h, true);
    case DomainKind::disk:
    case DomainKind::annulus:
    case DomainKind::polygon: {
      double factor = spec.kind == DomainKind::polygon ? 0.7 : 1.5;
      for (int attempt = 0; attempt < 20; ++attempt) {
        SimplicialComplex c = spec.kind == DomainKind::polygon ? polygon_mesh(spec, target_h, factor)
                                                               : polar_mesh(spec, target_h, factor);
        if (c.mesh_size_h <= target_h) return c;
        factor = spec.kind == DomainKind::polygon ? factor * 0.9 : factor * 1.1;
      }
      throw Error("generate_mesh: could not meet target_h");
    }
  }
  throw Error("generate_mesh: unknown domain");
}

}  // namespace whodge

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "whodge/error.hpp"
#include "whodge/mesh.hpp"
#include "whodge/quadrature.hpp"

namespace whodge {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Point& a, const Point& b) { return a[0] * b[1] - a[1] * b[0]; }
Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
double norm(const Point& a) { return std::hypot(a[0], a[1]); }

bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(sub(p2, p1), sub(q1, p1));
  const double d2 = cross(sub(p2, p1), sub(q2, p1));
  const double d3 = cross(sub(q2, q1), sub(p1, q1));
  const double d4 = cross(sub(q2, q1), sub(p2, q1));
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

std::vector<Point> polygon_vertices(const DomainSpec& s) {
  std::vector<Point> v;
  for (std::size_t i = 0; i + 1 < s.parameters.size(); i += 2)
    v.push_back({s.parameters[i], s.parameters[i + 1]});
  return v;
}

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ValidationError(field, msg);
}

}  // namespace

const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::interval: return "interval";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::disk: return "disk";
    case DomainKind::annulus: return "annulus";
    case DomainKind::polygon: return "polygon";
    case DomainKind::circle: return "circle";
    case DomainKind::flat_torus: return "flat_torus";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  for (DomainKind k : {DomainKind::interval, DomainKind::rectangle, DomainKind::disk,
                       DomainKind::annulus, DomainKind::polygon, DomainKind::circle,
                       DomainKind::flat_torus})
    if (s == to_string(k)) return k;
  throw ValidationError("domain.kind", "unknown domain kind '" + s + "'");
}

DomainSpec DomainSpec::interval(double a, double b) { return {DomainKind::interval, {a, b}, 1}; }
DomainSpec DomainSpec::rectangle(double x0, double x1, double y0, double y1) {
  return {DomainKind::rectangle, {x0, x1, y0, y1}, 2};
}
DomainSpec DomainSpec::disk(double r) { return {DomainKind::disk, {r}, 2}; }
DomainSpec DomainSpec::annulus(double r_in, double r_out) {
  return {DomainKind::annulus, {r_in, r_out}, 2};
}
DomainSpec DomainSpec::polygon(const std::vector<Point>& vertices, double fillet) {
  DomainSpec s{DomainKind::polygon, {}, 2, fillet};
  for (const Point& p : vertices) {
    s.parameters.push_back(p[0]);
    s.parameters.push_back(p[1]);
  }
  return s;
}
DomainSpec DomainSpec::circle(double length) { return {DomainKind::circle, {length}, 1}; }
DomainSpec DomainSpec::flat_torus(double lx, double ly) {
  return {DomainKind::flat_torus, {lx, ly}, 2};
}

void DomainSpec::validate() const {
  const auto& q = parameters;
  const int expected_dim =
      (kind == DomainKind::interval || kind == DomainKind::circle) ? 1 : 2;
  require(ambient_dim == expected_dim, "domain.ambient_dim",
          "must be " + std::to_string(expected_dim) + " for " + to_string(kind));
  for (double v : q) require(std::isfinite(v), "domain.parameters", "non-finite value");
  switch (kind) {
    case DomainKind::interval:
      require(q.size() == 2, "domain.parameters", "interval needs [a, b]");
      require(q[0] < q[1], "domain.parameters", "interval needs a < b");
      break;
    case DomainKind::rectangle:
      require(q.size() == 4, "domain.parameters", "rectangle needs [x0, x1, y0, y1]");
      require(q[0] < q[1] && q[2] < q[3], "domain.parameters", "rectangle needs x0 < x1, y0 < y1");
      break;
    case DomainKind::disk:
      require(q.size() == 1 && q[0] > 0, "domain.parameters", "disk needs [R] with R > 0");
      break;
    case DomainKind::annulus:
      require(q.size() == 2, "domain.parameters", "annulus needs [r_in, r_out]");
      require(q[0] > 0, "domain.parameters", "annulus inner radius must be positive");
      require(q[0] < q[1], "domain.parameters", "annulus needs r_in < r_out");
      break;
    case DomainKind::circle:
      require(q.size() == 1 && q[0] > 0, "domain.parameters", "circle needs [L] with L > 0");
      break;
    case DomainKind::flat_torus:
      require((q.size() == 1 || q.size() == 2), "domain.parameters", "torus needs [L] or [Lx, Ly]");
      for (double v : q) require(v > 0, "domain.parameters", "torus side must be positive");
      break;
    case DomainKind::polygon: {
      require(q.size() >= 6 && q.size() % 2 == 0, "domain.parameters",
              "polygon needs at least 3 vertices as [x0, y0, x1, y1, ...]");
      const auto v = polygon_vertices(*this);
      const std::size_t n = v.size();
      double area2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) area2 += cross(v[i], v[(i + 1) % n]);
      require(area2 > 0, "domain.parameters", "polygon must be counterclockwise");
      for (std::size_t i = 0; i < n; ++i) {
        require(norm(sub(v[(i + 1) % n], v[i])) > 0, "domain.parameters", "repeated vertex");
        for (std::size_t j = i + 1; j < n; ++j) {
          if (j == i + 1 || (i == 0 && j == n - 1)) continue;
          require(!segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]), "domain.parameters",
                  "polygon is self-intersecting");
        }
      }
      require(fillet >= 0, "domain.fillet", "must be nonnegative");
      if (fillet > 0) {
        // Tangent lengths of adjacent fillets must fit on each edge.
        std::vector<double> tlen(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const Point e1 = sub(v[i], v[(i + n - 1) % n]);
          const Point e2 = sub(v[(i + 1) % n], v[i]);
          const double c = cross(e1, e2);
          if (c < 0) {
            const double phi = std::acos(std::clamp(
                (e1[0] * e2[0] + e1[1] * e2[1]) / (norm(e1) * norm(e2)), -1.0, 1.0));
            tlen[i] = fillet * std::tan(0.5 * phi);
          }
        }
        for (std::size_t i = 0; i < n; ++i)
          require(tlen[i] + tlen[(i + 1) % n] < norm(sub(v[(i + 1) % n], v[i])), "domain.fillet",
                  "fillet radius too large for the adjacent edges");
      }
      break;
    }
  }
}

bool DomainSpec::has_boundary() const { return !periodic(); }
bool DomainSpec::periodic() const {
  return kind == DomainKind::circle || kind == DomainKind::flat_torus;
}

Point DomainSpec::period() const {
  if (kind == DomainKind::circle) return {parameters[0], 0.0};
  if (kind == DomainKind::flat_torus)
    return {parameters[0], parameters.size() > 1 ? parameters[1] : parameters[0]};
  return {0.0, 0.0};
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "(";
  for (std::size_t i = 0; i < parameters.size(); ++i) os << (i ? "," : "") << parameters[i];
  os << ")";
  if (fillet > 0) os << "+fillet(" << fillet << ")";
  return os.str();
}

DomainSpec domain_preset(const std::string& name) {
  DomainSpec s;
  if (name == "unit_interval") s = DomainSpec::interval(0.0, 1.0);
  else if (name == "unit_square") s = DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0);
  else if (name == "unit_disk") s = DomainSpec::disk(1.0);
  else if (name == "annulus") s = DomainSpec::annulus(0.5, 1.0);
  else if (name == "lshape" || name == "lshape_notch")
    s = DomainSpec::polygon({{-1, -1}, {1, -1}, {1, 0}, {0, 0}, {0, 1}, {-1, 1}},
                            name == "lshape_notch" ? 0.25 : 0.0);
  else if (name == "circle") s = DomainSpec::circle(1.0);
  else if (name == "torus") s = DomainSpec::flat_torus(1.0, 1.0);
  else throw ValidationError("domain.preset", "unknown domain preset '" + name + "'");
  s.validate();
  return s;
}

std::vector<std::string> domain_preset_names() {
  return {"unit_interval", "unit_square", "unit_disk", "annulus",
          "lshape",        "lshape_notch", "circle",   "torus"};
}

// ---------------------------------------------------------------------------

Point CurvePiece::point(double t) const {
  if (type == Type::segment) return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  const double th = theta0 + t * (theta1 - theta0);
  return {center[0] + radius * std::cos(th), center[1] + radius * std::sin(th)};
}

Point CurvePiece::tangent(double t) const {
  if (type == Type::segment) {
    const double L = norm(sub(b, a));
    return {(b[0] - a[0]) / L, (b[1] - a[1]) / L};
  }
  const double th = theta0 + t * (theta1 - theta0);
  const double s = theta1 > theta0 ? 1.0 : -1.0;
  return {-s * std::sin(th), s * std::cos(th)};
}

Point CurvePiece::normal(double t) const {
  const Point T = tangent(t);
  return {T[1], -T[0]};
}

double CurvePiece::speed() const {
  if (type == Type::segment) return norm(sub(b, a));
  return radius * std::abs(theta1 - theta0);
}

double CurvePiece::k1() const {
  if (type == Type::segment) return 0.0;
  return theta1 > theta0 ? -1.0 / radius : 1.0 / radius;
}

std::pair<double, double> CurvePiece::project(const Point& x) const {
  double t;
  if (type == Type::segment) {
    const Point d = sub(b, a);
    t = std::clamp(((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]),
                   0.0, 1.0);
  } else {
    const double span = std::abs(theta1 - theta0);
    const double dir = theta1 > theta0 ? 1.0 : -1.0;
    double phi = std::atan2(x[1] - center[1], x[0] - center[0]);
    // Angle measured from theta0 along the arc direction, in [0, 2π).
    double rel = dir * (phi - theta0);
    rel = std::fmod(rel, 2 * kPi);
    if (rel < 0) rel += 2 * kPi;
    if (rel > span) rel = (rel - span < 2 * kPi - rel) ? span : 0.0;
    t = rel / span;
  }
  const Point p = point(t);
  return {t, norm(sub(x, p))};
}

std::vector<std::vector<CurvePiece>> boundary_loops(const DomainSpec& spec) {
  using T = CurvePiece::Type;
  std::vector<std::vector<CurvePiece>> loops;
  const auto& q = spec.parameters;
  switch (spec.kind) {
    case DomainKind::rectangle: {
      const Point c[4] = {{q[0], q[2]}, {q[1], q[2]}, {q[1], q[3]}, {q[0], q[3]}};
      std::vector<CurvePiece> loop;
      for (int i = 0; i < 4; ++i) {
        CurvePiece p;
        p.type = T::segment;
        p.a = c[i];
        p.b = c[(i + 1) % 4];
        loop.push_back(p);
      }
      loops.push_back(loop);
      break;
    }
    case DomainKind::disk: {
      CurvePiece p;
      p.type = T::arc;
      p.radius = q[0];
      p.theta0 = 0.0;
      p.theta1 = 2 * kPi;
      loops.push_back({p});
      break;
    }
    case DomainKind::annulus: {
      CurvePiece outer;
      outer.type = T::arc;
      outer.radius = q[1];
      outer.theta1 = 2 * kPi;
      CurvePiece inner;
      inner.type = T::arc;
      inner.radius = q[0];
      inner.theta1 = -2 * kPi;
      loops.push_back({outer});
      loops.push_back({inner});
      break;
    }
    case DomainKind::polygon: {
      const auto v = polygon_vertices(spec);
      const std::size_t n = v.size();
      // Entry/exit points at each vertex (equal to the vertex unless filleted).
      std::vector<Point> in(v), out(v);
      std::vector<CurvePiece> arcs(n);
      std::vector<char> has_arc(n, 0);
      if (spec.fillet > 0) {
        for (std::size_t i = 0; i < n; ++i) {
          Point e1 = sub(v[i], v[(i + n - 1) % n]);
          Point e2 = sub(v[(i + 1) % n], v[i]);
          if (cross(e1, e2) >= 0) continue;
          const double l1 = norm(e1), l2 = norm(e2);
          e1 = {e1[0] / l1, e1[1] / l1};
          e2 = {e2[0] / l2, e2[1] / l2};
          const double phi = std::acos(std::clamp(e1[0] * e2[0] + e1[1] * e2[1], -1.0, 1.0));
          const double t = spec.fillet * std::tan(0.5 * phi);
          in[i] = {v[i][0] - t * e1[0], v[i][1] - t * e1[1]};
          out[i] = {v[i][0] + t * e2[0], v[i][1] + t * e2[1]};
          CurvePiece arc;
          arc.type = T::arc;
          arc.radius = spec.fillet;
          // Center to the right of travel, outside the domain.
          arc.center = {in[i][0] + spec.fillet * e1[1], in[i][1] - spec.fillet * e1[0]};
          arc.theta0 = std::atan2(in[i][1] - arc.center[1], in[i][0] - arc.center[0]);
          arc.theta1 = arc.theta0 - phi;
          arcs[i] = arc;
          has_arc[i] = 1;
        }
      }
      std::vector<CurvePiece> loop;
      for (std::size_t i = 0; i < n; ++i) {
        CurvePiece seg;
        seg.type = T::segment;
        seg.a = out[i];
        seg.b = in[(i + 1) % n];
        loop.push_back(seg);
        if (has_arc[(i + 1) % n]) loop.push_back(arcs[(i + 1) % n]);
      }
      loops.push_back(loop);
      break;
    }
    default:
      break;
  }
  return loops;
}

Point project_to_boundary(const DomainSpec& spec, const Point& x) {
  if (spec.kind == DomainKind::interval) {
    const double a = spec.parameters[0], b = spec.parameters[1];
    return {std::abs(x[0] - a) <= std::abs(x[0] - b) ? a : b, 0.0};
  }
  const auto loops = boundary_loops(spec);
  if (loops.empty()) return x;
  double best = INFINITY;
  Point bp = x;
  for (const auto& loop : loops)
    for (const CurvePiece& c : loop) {
      const auto [t, d] = c.project(x);
      if (d < best) {
        best = d;
        bp = c.point(t);
      }
    }
  return bp;
}

bool point_inside(const DomainSpec& spec, const Point& x) {
  const auto& q = spec.parameters;
  switch (spec.kind) {
    case DomainKind::interval: return x[0] >= q[0] && x[0] <= q[1];
    case DomainKind::circle: return x[0] >= 0 && x[0] <= q[0];
    case DomainKind::rectangle: return x[0] >= q[0] && x[0] <= q[1] && x[1] >= q[2] && x[1] <= q[3];
    case DomainKind::flat_torus: {
      const Point per = spec.period();
      return x[0] >= 0 && x[0] <= per[0] && x[1] >= 0 && x[1] <= per[1];
    }
    case DomainKind::disk: return norm(x) <= q[0];
    case DomainKind::annulus: return norm(x) >= q[0] && norm(x) <= q[1];
    case DomainKind::polygon: {
      // Even-odd rule on a fine polygonization of the loop.
      std::vector<Point> poly;
      const auto loops = boundary_loops(spec);
      for (const CurvePiece& c : loops[0]) {
        const int m = c.type == CurvePiece::Type::segment ? 1 : 64;
        for (int k = 0; k < m; ++k) poly.push_back(c.point(double(k) / m));
      }
      bool inside = false;
      for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a[1] > x[1]) != (b[1] > x[1]) &&
            x[0] < (b[0] - a[0]) * (x[1] - a[1]) / (b[1] - a[1]) + a[0])
          inside = !inside;
      }
      return inside;
    }
  }
  return false;
}

double domain_measure(const DomainSpec& spec) {
  const auto& q = spec.parameters;
  switch (spec.kind) {
    case DomainKind::interval: return q[1] - q[0];
    case DomainKind::circle: return q[0];
    case DomainKind::flat_torus: {
      const Point per = spec.period();
      return per[0] * per[1];
    }
    default: break;
  }
  double area2 = 0.0;
  for (const auto& loop : boundary_loops(spec))
    for (const CurvePiece& c : loop) {
      if (c.type == CurvePiece::Type::segment) {
        area2 += cross(c.a, c.b);
      } else {
        const double r = c.radius, cx = c.center[0], cy = c.center[1];
        area2 += r * cx * (std::sin(c.theta1) - std::sin(c.theta0)) -
                 r * cy * (std::cos(c.theta1) - std::cos(c.theta0)) + r * r * (c.theta1 - c.theta0);
      }
    }
  return 0.5 * area2;
}

double boundary_measure(const DomainSpec& spec) {
  if (spec.kind == DomainKind::interval) return 2.0;
  double L = 0.0;
  for (const auto& loop : boundary_loops(spec))
    for (const CurvePiece& c : loop) L += c.length();
  return L;
}

// ---------------------------------------------------------------------------

std::vector<QuadPoint> analytic_interior_rule(const DomainSpec& spec, int quad_order,
                                              int refine_panels) {
  const quad::Rule1D& g = quad::segment_rule(quad_order);
  const int rp = std::max(1, refine_panels);
  std::vector<QuadPoint> pts;
  auto composite = [&](double a, double b, int panels) {
    std::vector<std::pair<double, double>> r;
    const double w = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
      for (std::size_t i = 0; i < g.x.size(); ++i) r.push_back({a + w * (k + g.x[i]), w * g.w[i]});
    return r;
  };
  const auto& q = spec.parameters;
  switch (spec.kind) {
    case DomainKind::interval:
    case DomainKind::circle: {
      const double a = spec.kind == DomainKind::interval ? q[0] : 0.0;
      const double b = spec.kind == DomainKind::interval ? q[1] : q[0];
      for (auto [x, w] : composite(a, b, 32 * rp)) pts.push_back({{x, 0.0}, w});
      break;
    }
    case DomainKind::rectangle:
    case DomainKind::flat_torus: {
      double x0 = 0, x1, y0 = 0, y1;
      if (spec.kind == DomainKind::rectangle) {
        x0 = q[0], x1 = q[1], y0 = q[2], y1 = q[3];
      } else {
        const Point per = spec.period();
        x1 = per[0], y1 = per[1];
      }
      const auto rx = composite(x0, x1, 16 * rp);
      const auto ry = composite(y0, y1, 16 * rp);
      for (auto [x, wx] : rx)
        for (auto [y, wy] : ry) pts.push_back({{x, y}, wx * wy});
      break;
    }
    case DomainKind::disk:
    case DomainKind::annulus: {
      const double r0 = spec.kind == DomainKind::disk ? 0.0 : q[0];
      const double r1 = spec.kind == DomainKind::disk ? q[0] : q[1];
      const auto rr = composite(r0, r1, 8 * rp);
      const auto rt = composite(0.0, 2 * kPi, 32 * rp);
      for (auto [r, wr] : rr)
        for (auto [t, wt] : rt) pts.push_back({{r * std::cos(t), r * std::sin(t)}, r * wr * wt});
      break;
    }
    case DomainKind::polygon: {
      if (spec.fillet > 0)
        throw DomainError("analytic interior quadrature is not available for filleted polygons");
      double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
      for (std::size_t i = 0; i + 1 < q.size(); i += 2) {
        xmin = std::min(xmin, q[i]), xmax = std::max(xmax, q[i]);
        ymin = std::min(ymin, q[i + 1]), ymax = std::max(ymax, q[i + 1]);
      }
      SimplicialComplex m = generate_mesh(spec, 0.25 * std::max(xmax - xmin, ymax - ymin));
      for (int k = 1; k < rp; k *= 2) m = refine(m);
      pts = mesh_interior_rule(m, quad_order);
      break;
    }
  }
  return pts;
}

BoundaryGeometry analytic_boundary_rule(const DomainSpec& spec, int quad_order, int refine_panels) {
  BoundaryGeometry bg;
  bg.ambient_dim = spec.ambient_dim;
  if (spec.kind == DomainKind::interval) {
    bg.points.push_back({{spec.parameters[0], 0.0}, {-1.0, 0.0}, 0.0, 0.0, 1.0});
    bg.points.push_back({{spec.parameters[1], 0.0}, {1.0, 0.0}, 0.0, 0.0, 1.0});
    return bg;
  }
  const quad::Rule1D& g = quad::segment_rule(quad_order);
  const int rp = std::max(1, refine_panels);
  for (const auto& loop : boundary_loops(spec))
    for (const CurvePiece& c : loop) {
      int panels = c.type == CurvePiece::Type::segment
                       ? 8
                       : std::max(2, static_cast<int>(std::ceil(32 * std::abs(c.theta1 - c.theta0) /
                                                                (2 * kPi))));
      panels *= rp;
      for (int k = 0; k < panels; ++k)
        for (std::size_t i = 0; i < g.x.size(); ++i) {
          const double t = (k + g.x[i]) / panels;
          bg.points.push_back(
              {c.point(t), c.normal(t), c.k1(), c.k1(), c.speed() * g.w[i] / panels});
        }
    }
  return bg;
}

}  // namespace whodge

#pragma once

#include <Eigen/Sparse>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace whodge {

using Point = std::array<double, 2>;  // y = 0 on 1D domains

enum class DomainKind { interval, rectangle, disk, annulus, polygon, circle, flat_torus };

const char* to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

// Parameters by kind:
//   interval   [a, b]
//   rectangle  [x0, x1, y0, y1]
//   disk       [R]            centered at the origin
//   annulus    [r_in, r_out]  centered at the origin
//   polygon    [x0, y0, x1, y1, ...] counterclockwise
//   circle     [L]            periodic interval of length L
//   flat_torus [L] or [Lx, Ly]
struct DomainSpec {
  DomainKind kind = DomainKind::interval;
  std::vector<double> parameters;
  int ambient_dim = 1;
  // Polygons only: each reentrant corner is replaced by a tangent circular
  // arc of this radius, giving a smooth concave notch.
  double fillet = 0.0;

  static DomainSpec interval(double a, double b);
  static DomainSpec rectangle(double x0, double x1, double y0, double y1);
  static DomainSpec disk(double radius);
  static DomainSpec annulus(double r_in, double r_out);
  static DomainSpec polygon(const std::vector<Point>& vertices, double fillet = 0.0);
  static DomainSpec circle(double length);
  static DomainSpec flat_torus(double lx, double ly);

  void validate() const;  // throws ValidationError naming the field
  bool has_boundary() const;
  bool periodic() const;
  Point period() const;
  std::string describe() const;
};

// Named presets: unit_interval, unit_square, unit_disk, annulus, lshape,
// lshape_notch, circle, torus.
DomainSpec domain_preset(const std::string& name);
std::vector<std::string> domain_preset_names();

// One smooth piece of a boundary loop. Loops are oriented with the domain on
// the left, so the outward normal is the tangent rotated clockwise.
struct CurvePiece {
  enum class Type { segment, arc } type = Type::segment;
  Point a{}, b{};           // segment endpoints
  Point center{};           // arc
  double radius = 0.0;      // arc
  double theta0 = 0.0;      // arc start angle
  double theta1 = 0.0;      // arc end angle; theta1 < theta0 means clockwise

  Point point(double t) const;
  Point tangent(double t) const;  // unit, along the loop orientation
  Point normal(double t) const;   // outward unit normal
  double speed() const;           // |dγ/dt|, constant on each piece
  double k1() const;              // K1(T) = -∇_T n̂ = k1 T
  double length() const { return speed(); }
  // Closest parameter in [0,1] and the distance to it.
  std::pair<double, double> project(const Point& x) const;
};

std::vector<std::vector<CurvePiece>> boundary_loops(const DomainSpec& spec);
// Closest point on the analytic boundary (identity on empty boundary).
Point project_to_boundary(const DomainSpec& spec, const Point& x);
bool point_inside(const DomainSpec& spec, const Point& x);
// Maps x into the fundamental cell on periodic domains; identity otherwise.
Point wrap_point(const DomainSpec& spec, const Point& x);
double domain_measure(const DomainSpec& spec);  // analytic length/area
double boundary_measure(const DomainSpec& spec);

struct SimplicialComplex {
  int dim = 1;
  std::vector<Point> vertex_coords;
  // simplices[p][i] holds p+1 vertex ids; unused slots are -1.
  std::array<std::vector<std::array<int, 3>>, 3> simplices;
  std::array<std::vector<char>, 3> boundary_marker;
  // faces[p][i]: the p+1 codimension-1 faces of simplex i of degree p >= 1
  // with incidence signs.
  std::array<std::vector<std::array<int, 3>>, 3> faces;
  std::array<std::vector<std::array<int, 3>>, 3> face_signs;
  double mesh_size_h = 0.0;
  DomainSpec domain;

  int count(int p) const { return static_cast<int>(simplices[p].size()); }
  // Coordinates of the simplex's vertices, unwrapped across periodic seams.
  std::array<Point, 3> simplex_points(int p, int i) const;
  // Signed volume of top simplex i (positive by construction).
  double top_volume(int i) const;
  std::vector<int> interior_indices(int p) const;
  int boundary_count(int p) const;
};

// Builds faces, orientation and boundary markers from vertices and top simplices.
SimplicialComplex build_complex(int dim, std::vector<Point> coords,
                                std::vector<std::array<int, 3>> tops, const DomainSpec& spec);

SimplicialComplex generate_mesh(const DomainSpec& spec, double target_h);
SimplicialComplex refine(const SimplicialComplex& complex);

struct IncidenceMatrix {
  int degree = 0;
  Eigen::SparseMatrix<int> entries;  // count(p+1) x count(p)
};
IncidenceMatrix incidence_matrix(const SimplicialComplex& complex, int p);

struct BoundaryPoint {
  Point x{};
  Point normal{};
  double k1 = 0.0;        // shape operator on the 1D tangent space (0 in 1D)
  double trace_k1 = 0.0;  // equals k1 when n = 2
  double weight = 0.0;
};

struct BoundaryGeometry {
  int ambient_dim = 1;
  std::vector<BoundaryPoint> points;
};

// Quadrature on the analytic boundary over the mesh's boundary edges.
BoundaryGeometry boundary_geometry(const SimplicialComplex& complex, const DomainSpec& spec,
                                   int quad_order);

struct QuadPoint {
  Point x{};
  double w = 0.0;
};

// Mesh-based interior quadrature (polygonal approximation of Ω).
std::vector<QuadPoint> mesh_interior_rule(const SimplicialComplex& complex, int quad_order);

// Composite Gauss rules on the exact domain, independent of any mesh.
// `refine_panels` multiplies the default panel counts.
std::vector<QuadPoint> analytic_interior_rule(const DomainSpec& spec, int quad_order,
                                              int refine_panels = 1);
BoundaryGeometry analytic_boundary_rule(const DomainSpec& spec, int quad_order,
                                        int refine_panels = 1);

double min_angle_degrees(const SimplicialComplex& complex);

void write_off(std::ostream& os, const SimplicialComplex& complex);
SimplicialComplex read_off(std::istream& is, const DomainSpec& spec);

}  // namespace whodge

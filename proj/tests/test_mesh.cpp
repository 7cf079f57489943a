#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "whodge/error.hpp"
#include "whodge/mesh.hpp"

using namespace whodge;

namespace {

void check_invariants(const SimplicialComplex& c) {
  for (int p = 1; p <= c.dim; ++p)
    for (int i = 0; i < c.count(p); ++i)
      for (int k = 0; k <= p; ++k) {
        const int f = c.faces[p][i][k];
        REQUIRE(f >= 0);
        REQUIRE(f < c.count(p - 1));
        // Boundary markers are closed under faces.
        if (c.boundary_marker[p][i]) CHECK(c.boundary_marker[p - 1][f]);
      }
  for (int t = 0; t < c.count(c.dim); ++t) CHECK(c.top_volume(t) > 0);
  for (int p = 0; p + 1 < c.dim; ++p) {
    const Eigen::SparseMatrix<int> DD =
        incidence_matrix(c, p + 1).entries * incidence_matrix(c, p).entries;
    CHECK(DD.norm() == 0);
  }
}

double total_volume(const SimplicialComplex& c) {
  double v = 0;
  for (int t = 0; t < c.count(c.dim); ++t) v += c.top_volume(t);
  return v;
}

}  // namespace

TEST_CASE("interval mesh") {
  const auto c = generate_mesh(DomainSpec::interval(0, 1), 0.25);
  CHECK(c.count(1) == 4);
  CHECK(c.count(0) == 5);
  int nb = 0;
  for (int v = 0; v < c.count(0); ++v)
    if (c.boundary_marker[0][v]) {
      ++nb;
      const double x = c.vertex_coords[v][0];
      CHECK((x == 0.0 || x == 1.0));
    }
  CHECK(nb == 2);
  const auto D = incidence_matrix(c, 0).entries;
  for (int r = 0; r < D.rows(); ++r) {
    int plus = 0, minus = 0;
    for (int col = 0; col < D.cols(); ++col) {
      plus += D.coeff(r, col) == 1;
      minus += D.coeff(r, col) == -1;
    }
    CHECK(plus == 1);
    CHECK(minus == 1);
  }
  Eigen::VectorXi one = Eigen::VectorXi::Ones(c.count(0));
  CHECK((D * one).cwiseAbs().sum() == 0);
  check_invariants(c);
  const auto r = refine(c);
  CHECK(r.count(1) == 8);
  CHECK(r.mesh_size_h == doctest::Approx(0.125));
  check_invariants(r);
}

TEST_CASE("disk mesh boundary lies on the circle") {
  const auto c = generate_mesh(DomainSpec::disk(1.0), 0.1);
  CHECK(c.mesh_size_h <= 0.1);
  check_invariants(c);
  int nb = 0;
  for (int v = 0; v < c.count(0); ++v)
    if (c.boundary_marker[0][v]) {
      ++nb;
      CHECK(std::abs(std::hypot(c.vertex_coords[v][0], c.vertex_coords[v][1]) - 1.0) <= 1e-12);
    }
  CHECK(nb > 0);
  const auto r = refine(c);
  CHECK(r.count(2) == 4 * c.count(2));
  CHECK(r.mesh_size_h <= 0.55 * c.mesh_size_h);
  for (int v = 0; v < r.count(0); ++v)
    if (r.boundary_marker[0][v])
      CHECK(std::abs(std::hypot(r.vertex_coords[v][0], r.vertex_coords[v][1]) - 1.0) <= 1e-12);
  check_invariants(r);
  CHECK(min_angle_degrees(c) >= 20.0);
}

TEST_CASE("disk area converges at second order") {
  auto c = generate_mesh(DomainSpec::disk(1.0), 0.2);
  double prev = std::abs(total_volume(c) - std::numbers::pi);
  for (int k = 0; k < 3; ++k) {
    c = refine(c);
    const double err = std::abs(total_volume(c) - std::numbers::pi);
    CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("rectangle, torus, circle") {
  const auto r = generate_mesh(DomainSpec::rectangle(0, 2, 0, 1), 0.3);
  CHECK(r.mesh_size_h <= 0.3);
  CHECK(total_volume(r) == doctest::Approx(2.0).epsilon(1e-14));
  check_invariants(r);
  const auto t = generate_mesh(DomainSpec::flat_torus(1, 1), 0.5);
  CHECK(t.boundary_count(0) == 0);
  CHECK(t.boundary_count(1) == 0);
  CHECK(t.boundary_count(2) == 0);
  CHECK(total_volume(t) == doctest::Approx(1.0).epsilon(1e-14));
  // χ(torus) = 0
  CHECK(t.count(0) - t.count(1) + t.count(2) == 0);
  check_invariants(t);
  check_invariants(refine(t));
  const auto ci = generate_mesh(DomainSpec::circle(1.0), 0.1);
  CHECK(ci.boundary_count(0) == 0);
  CHECK(ci.count(0) == ci.count(1));
  CHECK(total_volume(ci) == doctest::Approx(1.0).epsilon(1e-14));
  check_invariants(refine(ci));
}

TEST_CASE("annulus mesh has Euler characteristic 0") {
  const auto c = generate_mesh(DomainSpec::annulus(0.5, 1.0), 0.15);
  CHECK(c.mesh_size_h <= 0.15);
  CHECK(c.count(0) - c.count(1) + c.count(2) == 0);
  check_invariants(c);
  CHECK(min_angle_degrees(c) >= 20.0);
  for (int v = 0; v < c.count(0); ++v)
    if (c.boundary_marker[0][v]) {
      const double r = std::hypot(c.vertex_coords[v][0], c.vertex_coords[v][1]);
      CHECK(std::min(std::abs(r - 0.5), std::abs(r - 1.0)) <= 1e-12);
    }
}

TEST_CASE("polygon meshes") {
  for (const char* name : {"lshape", "lshape_notch"}) {
    const DomainSpec s = domain_preset(name);
    const auto c = generate_mesh(s, 0.2);
    CHECK(c.mesh_size_h <= 0.2);
    CHECK(min_angle_degrees(c) >= 20.0);
    check_invariants(c);
    CHECK(c.count(0) - c.count(1) + c.count(2) == 1);
    const auto r = refine(c);
    check_invariants(r);
    if (std::string(name) == "lshape") CHECK(total_volume(c) == doctest::Approx(3.0).epsilon(1e-12));
  }
  CHECK(domain_measure(domain_preset("lshape")) == doctest::Approx(3.0));
  // Rounding the reentrant corner adds (1 - π/4) ρ².
  CHECK(domain_measure(domain_preset("lshape_notch")) ==
        doctest::Approx(3.0 + (1 - std::numbers::pi / 4) * 0.0625));
}

TEST_CASE("boundary geometry: curvature conventions") {
  const auto disk = generate_mesh(DomainSpec::disk(1.0), 0.2);
  const auto bg = boundary_geometry(disk, disk.domain, 4);
  double perim = 0;
  for (const auto& b : bg.points) {
    CHECK(std::hypot(b.normal[0], b.normal[1]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.k1 == doctest::Approx(-1.0));
    CHECK(b.trace_k1 == doctest::Approx(-1.0));
    CHECK(b.normal[0] * b.x[0] + b.normal[1] * b.x[1] == doctest::Approx(1.0));
    perim += b.weight;
  }
  CHECK(perim == doctest::Approx(2 * std::numbers::pi).epsilon(1e-13));

  const auto ann = generate_mesh(DomainSpec::annulus(0.4, 1.0), 0.2);
  int inner = 0;
  for (const auto& b : boundary_geometry(ann, ann.domain, 4).points) {
    const double r = std::hypot(b.x[0], b.x[1]);
    if (r < 0.7) {
      ++inner;
      CHECK(b.k1 == doctest::Approx(1.0 / 0.4));
      CHECK(b.normal[0] * b.x[0] + b.normal[1] * b.x[1] == doctest::Approx(-0.4));
    } else {
      CHECK(b.k1 == doctest::Approx(-1.0));
    }
  }
  CHECK(inner > 0);

  const auto rect = generate_mesh(DomainSpec::rectangle(0, 1, 0, 1), 0.25);
  double rp = 0;
  for (const auto& b : boundary_geometry(rect, rect.domain, 4).points) {
    CHECK(b.k1 == 0.0);
    rp += b.weight;
  }
  CHECK(rp == doctest::Approx(4.0));

  const auto I = generate_mesh(DomainSpec::interval(-1, 2), 0.5);
  const auto bi = boundary_geometry(I, I.domain, 4);
  REQUIRE(bi.points.size() == 2);
  for (const auto& b : bi.points) {
    CHECK(b.k1 == 0.0);
    CHECK(b.normal[0] == (b.x[0] < 0 ? -1.0 : 1.0));
  }
  CHECK(boundary_geometry(generate_mesh(DomainSpec::flat_torus(1, 1), 0.5), DomainSpec::flat_torus(1, 1), 4)
            .points.empty());

  const DomainSpec notch = domain_preset("lshape_notch");
  const auto nm = generate_mesh(notch, 0.1);
  double kmax = 0;
  for (const auto& b : boundary_geometry(nm, notch, 4).points) kmax = std::max(kmax, b.k1);
  CHECK(kmax == doctest::Approx(4.0));
}

TEST_CASE("analytic quadrature rules") {
  for (const char* name : {"unit_interval", "unit_square", "unit_disk", "annulus", "lshape", "circle", "torus"}) {
    const DomainSpec s = domain_preset(name);
    double v = 0;
    for (const auto& q : analytic_interior_rule(s, 6)) v += q.w;
    CHECK(v == doctest::Approx(domain_measure(s)).epsilon(1e-13));
    double b = 0;
    for (const auto& q : analytic_boundary_rule(s, 6).points) b += q.weight;
    CHECK(b == doctest::Approx(s.has_boundary() ? boundary_measure(s) : 0.0).epsilon(1e-13));
  }
  // ∫_disk x^2 = π/4
  double m2 = 0;
  for (const auto& q : analytic_interior_rule(DomainSpec::disk(1.0), 6)) m2 += q.w * q.x[0] * q.x[0];
  CHECK(m2 == doctest::Approx(std::numbers::pi / 4).epsilon(1e-13));
  CHECK_THROWS_AS(analytic_interior_rule(domain_preset("lshape_notch"), 4), DomainError);
}

TEST_CASE("validation errors name the field") {
  try {
    DomainSpec::annulus(1.0, 0.5).validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "domain.parameters");
  }
  CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {0, 1}, {1, 0}}).validate(), ValidationError);
  CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}).validate(), ValidationError);
  CHECK_THROWS_AS(generate_mesh(DomainSpec::disk(1.0), -1.0), ValidationError);
  CHECK_THROWS_AS(domain_preset("sphere"), ValidationError);
}

TEST_CASE("OFF round trip") {
  const auto c = generate_mesh(DomainSpec::disk(1.0), 0.3);
  std::stringstream ss;
  write_off(ss, c);
  const auto d = read_off(ss, c.domain);
  CHECK(d.count(0) == c.count(0));
  CHECK(d.count(1) == c.count(1));
  CHECK(d.count(2) == c.count(2));
  CHECK(d.boundary_count(1) == c.boundary_count(1));
  for (int v = 0; v < c.count(0); ++v) {
    CHECK(d.vertex_coords[v][0] == c.vertex_coords[v][0]);
    CHECK(d.vertex_coords[v][1] == c.vertex_coords[v][1]);
  }
  std::stringstream bad("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n");
  CHECK_THROWS_AS(read_off(bad, c.domain), ValidationError);
}

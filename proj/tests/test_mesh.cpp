#include <doctest.h>

#include "tfm/errors.hpp"
#include "tfm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace tfm;

namespace {

double total_area(const Mesh& m) {
  double a = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) a += m.cell_area(static_cast<int>(c));
  return a;
}

} // namespace

TEST_CASE("unit square with one rectangle") {
  const Mesh m = generate_rect_mesh(1.0, 1.0, 1, 1, DiagonalRule::Right);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_cells() == 2);
  CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));
  const auto inlet = boundary_facets(m, BoundaryTag::Inlet);
  REQUIRE(inlet.size() == 1);
  CHECK(m.facet_length(inlet[0]) == doctest::Approx(1.0));
}

TEST_CASE("degenerate sizes are rejected") {
  CHECK_THROWS_AS(generate_rect_mesh(1.0, 1.0, 0, 1, DiagonalRule::Right), InvalidArgument);
  CHECK_THROWS_AS(generate_rect_mesh(0.0, 1.0, 1, 1, DiagonalRule::Right), InvalidArgument);
  CHECK_THROWS_AS(generate_rect_mesh(1.0, -1.0, 1, 1, DiagonalRule::Left), InvalidArgument);
  CHECK_THROWS_AS(parse_diagonal_rule("crossed"), InvalidArgument);
}

TEST_CASE("column mesh counts and boundary geometry") {
  const Mesh m = generate_rect_mesh(0.05, 0.1, 50, 100, DiagonalRule::Alternating);
  CHECK(m.num_cells() == 2u * 50 * 100);
  CHECK(m.num_vertices() == 51u * 101);
  CHECK(total_area(m) == doctest::Approx(0.005).epsilon(1e-12));

  const auto outlet = boundary_facets(m, BoundaryTag::Outlet);
  CHECK(outlet.size() == 50);
  double len = 0.0;
  for (int f : outlet) len += m.facet_length(f);
  CHECK(len == doctest::Approx(0.05).epsilon(1e-12));

  const auto left = boundary_facets(m, BoundaryTag::WallLeft);
  CHECK(left.size() == 100);
  for (int f : left)
    for (int v : m.facets()[f].vertices) CHECK(std::abs(m.vertices()[v].x + 0.025) <= 1e-12);

  double perimeter = 0.0;
  for (std::size_t f = 0; f < m.facets().size(); ++f) perimeter += m.facet_length(static_cast<int>(f));
  CHECK(perimeter == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("cells are counterclockwise and diameters are the longest edge") {
  for (auto rule : {DiagonalRule::Right, DiagonalRule::Left, DiagonalRule::Alternating}) {
    const Mesh m = generate_rect_mesh(2.0, 3.0, 5, 7, rule);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      CHECK(m.cell_area(static_cast<int>(c)) > 0.0);
      const auto& t = m.cells()[c];
      double h = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) h = std::max(h, norm(m.vertices()[t[i]] - m.vertices()[t[j]]));
      CHECK(m.cell_diameters()[c] == doctest::Approx(h));
    }
  }
}

TEST_CASE("each boundary facet belongs to its cell and lies on its side") {
  const Mesh m = generate_rect_mesh(1.0, 2.0, 4, 6, DiagonalRule::Alternating);
  for (const Facet& f : m.facets()) {
    const auto& t = m.cells()[f.cell];
    for (int v : f.vertices) CHECK(std::find(t.begin(), t.end(), v) != t.end());
    const Vec2 a = m.vertices()[f.vertices[0]], b = m.vertices()[f.vertices[1]];
    switch (f.tag) {
    case BoundaryTag::Inlet: CHECK((a.y == 0.0 && b.y == 0.0)); break;
    case BoundaryTag::Outlet: CHECK((a.y == doctest::Approx(2.0) && b.y == doctest::Approx(2.0))); break;
    case BoundaryTag::WallLeft: CHECK((a.x == doctest::Approx(-0.5) && b.x == doctest::Approx(-0.5))); break;
    case BoundaryTag::WallRight: CHECK((a.x == doctest::Approx(0.5) && b.x == doctest::Approx(0.5))); break;
    }
  }
  CHECK(m.facets().size() == 2u * (4 + 6));
}

TEST_CASE("alternating diagonals are mirror symmetric for even nx") {
  const Mesh m = generate_rect_mesh(1.0, 2.0, 6, 8, DiagonalRule::Alternating);
  const auto key = [&](Vec2 p) {
    return std::pair<long, long>(std::lround(p.x * 1e9), std::lround(p.y * 1e9));
  };
  std::set<std::set<std::pair<long, long>>> cells, mirrored;
  for (const Cell& c : m.cells()) {
    std::set<std::pair<long, long>> a, b;
    for (int v : c) {
      const Vec2 p = m.vertices()[v];
      a.insert(key(p));
      b.insert(key({-p.x, p.y}));
    }
    cells.insert(a);
    mirrored.insert(b);
  }
  CHECK(cells == mirrored);
}

TEST_CASE("point location and barycentric coordinates") {
  const Mesh m = generate_rect_mesh(1.0, 1.0, 3, 3, DiagonalRule::Left);
  const Vec2 p{0.1, 0.37};
  const auto c = m.locate(p);
  REQUIRE(c.has_value());
  const auto l = barycentric(m, *c, p);
  Vec2 back{};
  for (int k = 0; k < 3; ++k) {
    CHECK(l[k] >= -1e-12);
    back = back + l[k] * m.vertices()[m.cells()[*c][k]];
  }
  CHECK(back.x == doctest::Approx(p.x));
  CHECK(back.y == doctest::Approx(p.y));
  CHECK(m.locate({-0.5, 0.0}).has_value());
  CHECK(m.locate({0.5, 1.0}).has_value());
  CHECK_FALSE(m.locate({0.6, 0.5}).has_value());
  CHECK_FALSE(m.locate({0.0, -0.01}).has_value());
}

TEST_CASE("rebuilding a mesh from its triangles recovers the boundary") {
  const Mesh m = generate_rect_mesh(1.0, 2.0, 4, 5, DiagonalRule::Alternating);
  const Mesh r = mesh_from_triangles({m.vertices().begin(), m.vertices().end()},
                                     {m.cells().begin(), m.cells().end()});
  CHECK(r.width() == doctest::Approx(1.0));
  CHECK(r.height() == doctest::Approx(2.0));
  for (BoundaryTag tag : kAllBoundaryTags)
    CHECK(boundary_facets(r, tag).size() == boundary_facets(m, tag).size());
}

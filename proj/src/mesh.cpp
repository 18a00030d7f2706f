#include "tfm/mesh.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace tfm {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

const char* to_string(BoundaryTag tag) {
  switch (tag) {
  case BoundaryTag::Inlet:
    return "inlet";
  case BoundaryTag::Outlet:
    return "outlet";
  case BoundaryTag::WallLeft:
    return "wall_left";
  case BoundaryTag::WallRight:
    return "wall_right";
  }
  return "?";
}

DiagonalRule parse_diagonal_rule(std::string_view text) {
  if (text == "right") return DiagonalRule::Right;
  if (text == "left") return DiagonalRule::Left;
  if (text == "alternating") return DiagonalRule::Alternating;
  throw InvalidArgument("unknown diagonal rule '" + std::string(text) + "'");
}

const char* to_string(DiagonalRule rule) {
  switch (rule) {
  case DiagonalRule::Right:
    return "right";
  case DiagonalRule::Left:
    return "left";
  case DiagonalRule::Alternating:
    return "alternating";
  }
  return "?";
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells, std::vector<Facet> facets,
           double width, double height)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), facets_(std::move(facets)),
      width_(width), height_(height) {
  diameters_.reserve(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& t = cells_[c];
    for (int v : t) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size())
        throw InvalidArgument("cell references a missing vertex");
    }
    if (cell_area(static_cast<int>(c)) <= 0.0)
      throw InvalidArgument("cell " + std::to_string(c) + " is not counterclockwise");
    const Vec2 a = vertices_[t[0]], b = vertices_[t[1]], d = vertices_[t[2]];
    diameters_.push_back(std::max({norm(b - a), norm(d - b), norm(a - d)}));
  }
  build_locator();
}

double Mesh::cell_area(int c) const {
  const auto& t = cells_[c];
  return 0.5 * cross(vertices_[t[1]] - vertices_[t[0]], vertices_[t[2]] - vertices_[t[0]]);
}

double Mesh::facet_length(int f) const {
  const auto& e = facets_[f].vertices;
  return norm(vertices_[e[1]] - vertices_[e[0]]);
}

void Mesh::build_locator() {
  const double x0 = -0.5 * width_;
  const auto n = static_cast<double>(std::max<std::size_t>(cells_.size(), 1));
  // roughly one cell per bucket
  const double aspect = height_ / width_;
  bx_ = std::max(1, static_cast<int>(std::sqrt(n / (2.0 * aspect))));
  by_ = std::max(1, static_cast<int>(std::sqrt(n * aspect / 2.0)));
  buckets_.assign(static_cast<std::size_t>(bx_) * by_, {});
  const double sx = bx_ / width_, sy = by_ / height_;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int v : cells_[c]) {
      xmin = std::min(xmin, vertices_[v].x);
      xmax = std::max(xmax, vertices_[v].x);
      ymin = std::min(ymin, vertices_[v].y);
      ymax = std::max(ymax, vertices_[v].y);
    }
    const int i0 = std::clamp(static_cast<int>(std::floor((xmin - x0) * sx)), 0, bx_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor((xmax - x0) * sx)), 0, bx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor(ymin * sy)), 0, by_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor(ymax * sy)), 0, by_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        buckets_[static_cast<std::size_t>(j) * bx_ + i].push_back(static_cast<int>(c));
  }
}

std::array<double, 3> barycentric(const Mesh& mesh, int c, Vec2 p) {
  const auto& t = mesh.cells()[c];
  const auto vs = mesh.vertices();
  const Vec2 a = vs[t[0]], b = vs[t[1]], d = vs[t[2]];
  const double det = cross(b - a, d - a);
  const double l1 = cross(p - a, d - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<int> Mesh::locate(Vec2 p) const {
  const double x0 = -0.5 * width_;
  const double slack = 1e-12 * std::max(width_, height_);
  if (p.x < x0 - slack || p.x > -x0 + slack || p.y < -slack || p.y > height_ + slack)
    return std::nullopt;
  const int i = std::clamp(static_cast<int>(std::floor((p.x - x0) * bx_ / width_)), 0, bx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(p.y * by_ / height_)), 0, by_ - 1);
  auto search = [&](int ii, int jj) -> std::optional<int> {
    if (ii < 0 || ii >= bx_ || jj < 0 || jj >= by_) return std::nullopt;
    for (int c : buckets_[static_cast<std::size_t>(jj) * bx_ + ii]) {
      const auto l = barycentric(*this, c, p);
      if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) return c;
    }
    return std::nullopt;
  };
  if (auto c = search(i, j)) return c;
  // rounding at bucket edges
  for (int jj = j - 1; jj <= j + 1; ++jj)
    for (int ii = i - 1; ii <= i + 1; ++ii)
      if (auto c = search(ii, jj)) return c;
  return std::nullopt;
}

Mesh generate_rect_mesh(double width, double height, int nx, int ny, DiagonalRule diagonal) {
  if (!(width > 0.0) || !(height > 0.0))
    throw InvalidArgument("mesh width and height must be positive");
  if (nx < 1 || ny < 1) throw InvalidArgument("mesh nx and ny must be at least 1");

  const int px = nx + 1;
  auto vid = [px](int i, int j) { return j * px + i; };

  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(px) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = j == ny ? height : height * j / ny;
    for (int i = 0; i <= nx; ++i) {
      // symmetric placement: x(i) = -x(nx - i) exactly
      const double x = (2.0 * i - nx) * (0.5 * width) / nx;
      vertices.push_back({x, y});
    }
  }

  std::vector<Cell> cells;
  cells.reserve(2 * static_cast<std::size_t>(nx) * ny);
  // cell index of the triangle adjacent to each boundary edge
  std::vector<int> bottom(nx), top(nx), left(ny), right(ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      bool slash; // diagonal from (i,j) to (i+1,j+1)
      switch (diagonal) {
      case DiagonalRule::Right:
        slash = true;
        break;
      case DiagonalRule::Left:
        slash = false;
        break;
      default:
        slash = (i + j) % 2 == 0;
        break;
      }
      const int first = static_cast<int>(cells.size());
      if (slash) {
        cells.push_back({v00, v10, v11}); // lower right
        cells.push_back({v00, v11, v01}); // upper left
        if (j == 0) bottom[i] = first;
        if (j == ny - 1) top[i] = first + 1;
        if (i == 0) left[j] = first + 1;
        if (i == nx - 1) right[j] = first;
      } else {
        cells.push_back({v00, v10, v01}); // lower left
        cells.push_back({v10, v11, v01}); // upper right
        if (j == 0) bottom[i] = first;
        if (j == ny - 1) top[i] = first + 1;
        if (i == 0) left[j] = first;
        if (i == nx - 1) right[j] = first + 1;
      }
    }
  }

  std::vector<Facet> facets;
  facets.reserve(2 * static_cast<std::size_t>(nx + ny));
  for (int i = 0; i < nx; ++i)
    facets.push_back({{vid(i, 0), vid(i + 1, 0)}, bottom[i], BoundaryTag::Inlet});
  for (int i = 0; i < nx; ++i)
    facets.push_back({{vid(i + 1, ny), vid(i, ny)}, top[i], BoundaryTag::Outlet});
  for (int j = 0; j < ny; ++j)
    facets.push_back({{vid(0, j + 1), vid(0, j)}, left[j], BoundaryTag::WallLeft});
  for (int j = 0; j < ny; ++j)
    facets.push_back({{vid(nx, j), vid(nx, j + 1)}, right[j], BoundaryTag::WallRight});

  return Mesh(std::move(vertices), std::move(cells), std::move(facets), width, height);
}

Mesh mesh_from_triangles(std::vector<Vec2> vertices, std::vector<Cell> cells) {
  if (vertices.empty() || cells.empty()) throw InvalidArgument("empty triangulation");
  double xmin = 1e300, xmax = -1e300, ymax = -1e300;
  for (const Vec2& v : vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymax = std::max(ymax, v.y);
  }
  const double width = xmax - xmin, height = ymax;
  if (!(width > 0.0) || !(height > 0.0)) throw InvalidArgument("triangulation has no extent");
  // directed edges seen once are boundary edges, already counterclockwise
  std::map<std::pair<int, int>, int> owner;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int k = 0; k < 3; ++k) {
      const int a = cells[c][k], b = cells[c][(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, fresh] = owner.try_emplace(key, static_cast<int>(c));
      if (!fresh) owner.erase(it);
    }
  }
  const double tol = 1e-9 * std::max(width, height);
  std::vector<Facet> facets;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int k = 0; k < 3; ++k) {
      const int a = cells[c][k], b = cells[c][(k + 1) % 3];
      const auto it = owner.find(std::minmax(a, b));
      if (it == owner.end()) continue;
      const Vec2 m = 0.5 * (vertices[a] + vertices[b]);
      BoundaryTag tag;
      if (std::abs(m.y) <= tol)
        tag = BoundaryTag::Inlet;
      else if (std::abs(m.y - height) <= tol)
        tag = BoundaryTag::Outlet;
      else if (std::abs(m.x - xmin) <= tol)
        tag = BoundaryTag::WallLeft;
      else if (std::abs(m.x - xmax) <= tol)
        tag = BoundaryTag::WallRight;
      else
        throw InvalidArgument("boundary edge off the bounding rectangle");
      facets.push_back({{a, b}, static_cast<int>(c), tag});
    }
  }
  std::stable_sort(facets.begin(), facets.end(),
                   [](const Facet& l, const Facet& r) { return l.tag < r.tag; });
  return Mesh(std::move(vertices), std::move(cells), std::move(facets), width, height);
}

std::vector<int> boundary_facets(const Mesh& mesh, BoundaryTag tag) {
  std::vector<int> out;
  const auto facets = mesh.facets();
  for (std::size_t f = 0; f < facets.size(); ++f)
    if (facets[f].tag == tag) out.push_back(static_cast<int>(f));
  return out;
}

} // namespace tfm

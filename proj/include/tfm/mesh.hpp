#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tfm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

enum class BoundaryTag { Inlet, Outlet, WallLeft, WallRight };

inline constexpr std::array<BoundaryTag, 4> kAllBoundaryTags = {
    BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::WallLeft, BoundaryTag::WallRight};

const char* to_string(BoundaryTag tag);

enum class DiagonalRule { Right, Left, Alternating };

DiagonalRule parse_diagonal_rule(std::string_view text);
const char* to_string(DiagonalRule rule);

using Cell = std::array<int, 3>;

struct Facet {
  std::array<int, 2> vertices;
  int cell = -1;
  BoundaryTag tag = BoundaryTag::Inlet;
};

/// Triangulation of the rectangle [-width/2, width/2] x [0, height].
///
/// Cells are counterclockwise. Every boundary edge is a facet carrying one
/// tag: Inlet (y = 0), Outlet (y = height), WallLeft/WallRight (x = -+width/2).
/// Immutable once built.
class Mesh {
public:
  Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells, std::vector<Facet> facets,
       double width, double height);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const Facet> facets() const { return facets_; }
  std::span<const double> cell_diameters() const { return diameters_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }

  double width() const { return width_; }
  double height() const { return height_; }

  double cell_area(int c) const;
  double facet_length(int f) const;

  /// Index of a cell containing `p` (boundary inclusive, tolerance 1e-12
  /// relative to cell size), or nullopt.
  std::optional<int> locate(Vec2 p) const;

private:
  void build_locator();

  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  std::vector<Facet> facets_;
  std::vector<double> diameters_;
  double width_;
  double height_;

  // uniform bucket grid over the bounding box
  int bx_ = 1;
  int by_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Structured triangulation of an nx-by-ny grid of rectangles, each split by
/// one diagonal. `Alternating` uses a checkerboard so that for even nx the
/// mesh is mirror symmetric about x = 0.
Mesh generate_rect_mesh(double width, double height, int nx, int ny, DiagonalRule diagonal);

/// Mesh from a bare triangle list covering a rectangle centred on x = 0 with
/// its base on y = 0 (e.g. read back from a snapshot). Boundary edges are
/// found by edge counting and tagged by position.
Mesh mesh_from_triangles(std::vector<Vec2> vertices, std::vector<Cell> cells);

std::vector<int> boundary_facets(const Mesh& mesh, BoundaryTag tag);

/// Barycentric coordinates of p with respect to cell c.
std::array<double, 3> barycentric(const Mesh& mesh, int c, Vec2 p);

} // namespace tfm

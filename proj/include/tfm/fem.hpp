#pragma once

#include "tfm/linalg.hpp"
#include "tfm/mesh.hpp"
#include "tfm/quadrature.hpp"

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace tfm {

enum class SpaceKind { ScalarP1, ScalarP2, VectorP2 };

/// Lagrange space on a triangle mesh.
///
/// Nodes are numbered vertices first, then (for P2) edge midpoints in order of
/// first appearance while walking the cells. Local node order in a cell is
/// v0, v1, v2 followed by the edges (v0,v1), (v1,v2), (v2,v0).
/// Vector spaces interleave components: dof = 2 * node + component.
class FunctionSpace {
public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  SpaceKind kind() const { return kind_; }

  int degree() const { return kind_ == SpaceKind::ScalarP1 ? 1 : 2; }
  int components() const { return kind_ == SpaceKind::VectorP2 ? 2 : 1; }
  int nodes_per_cell() const { return degree() == 1 ? 3 : 6; }
  std::size_t num_nodes() const { return node_coords_.size(); }
  std::size_t dof_count() const { return num_nodes() * components(); }

  std::span<const int> cell_nodes(int c) const {
    return {cell_nodes_.data() + static_cast<std::size_t>(c) * nodes_per_cell(),
            static_cast<std::size_t>(nodes_per_cell())};
  }
  std::span<const Vec2> node_coords() const { return node_coords_; }

  /// Sorted node indices lying on facets with the given tag.
  std::vector<int> boundary_nodes(BoundaryTag tag) const;
  /// Nodes of facet f (2 for P1, 3 for P2 with the midpoint last).
  std::vector<int> facet_nodes(int f) const;

  /// Zero matrix carrying the dof-coupling pattern of this space.
  SparseMatrix new_matrix() const { return pattern_; }

  bool same_as(const FunctionSpace& other) const { return this == &other; }

private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_;
  std::vector<int> cell_nodes_;
  std::vector<Vec2> node_coords_;
  std::vector<int> facet_edge_node_; // P2 midpoint node of each facet
  SparseMatrix pattern_;
};

/// Coefficients over a function space.
class FeField {
public:
  FeField() = default;
  explicit FeField(std::shared_ptr<const FunctionSpace> space);
  FeField(std::shared_ptr<const FunctionSpace> space, Vector values);

  const FunctionSpace& space() const { return *space_; }
  const std::shared_ptr<const FunctionSpace>& space_ptr() const { return space_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

private:
  std::shared_ptr<const FunctionSpace> space_;
  Vector values_;
};

/// Affine element geometry: area and gradients of the barycentric coordinates.
struct CellGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda{};
  std::array<Vec2, 3> vertex{};
};

CellGeometry cell_geometry(const Mesh& mesh, int c);

/// Shape function values and physical gradients at one point of a cell.
struct ShapeValues {
  int n = 0;
  std::array<double, 6> phi{};
  std::array<Vec2, 6> grad{};
};

ShapeValues shape_functions(int degree, const CellGeometry& g, std::array<double, 3> lambda);

/// Barycentric coordinates of a reference-triangle quadrature point.
inline std::array<double, 3> ref_to_lambda(const std::array<double, 2>& xi) {
  return {1.0 - xi[0] - xi[1], xi[0], xi[1]};
}

/// Nodal interpolation; `f(p, component)`.
FeField interpolate(std::shared_ptr<const FunctionSpace> space,
                    const std::function<double(Vec2, int)>& f);

/// Point evaluation of one component. Throws OutOfDomain outside the mesh.
double evaluate(const FeField& field, Vec2 point, int component = 0);

/// Field value and gradient inside a known cell.
struct PointValue {
  std::array<double, 2> value{};
  std::array<Vec2, 2> grad{};
};
PointValue evaluate_in_cell(const FeField& field, int c, const CellGeometry& g,
                            const ShapeValues& s);

/// Values at mesh vertices (P2 fields are sampled at their vertex nodes).
/// For vector fields the result is interleaved.
Vector vertex_values(const FeField& field);

/// Scalar mass and stiffness matrices of a scalar space.
SparseMatrix assemble_mass(const FunctionSpace& space);
SparseMatrix assemble_stiffness(const FunctionSpace& space);
/// Mass matrix of the vector space (identity coupling between components).
SparseMatrix assemble_vector_mass(const FunctionSpace& space);

/// Integral of a scalar field over the domain.
double integrate(const FeField& field);

} // namespace tfm

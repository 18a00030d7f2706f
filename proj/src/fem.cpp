#include "tfm/fem.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>

namespace tfm {

namespace {

std::int64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

constexpr std::array<std::array<int, 2>, 3> kEdges = {{{0, 1}, {1, 2}, {2, 0}}};

} // namespace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)), kind_(kind) {
  if (!mesh_) throw InvalidArgument("function space needs a mesh");
  const auto verts = mesh_->vertices();
  node_coords_.assign(verts.begin(), verts.end());
  const int npc = nodes_per_cell();
  cell_nodes_.reserve(mesh_->num_cells() * npc);

  std::unordered_map<std::int64_t, int> edge_node;
  for (const Cell& t : mesh_->cells()) {
    for (int v : t) cell_nodes_.push_back(v);
    if (npc == 6) {
      for (const auto& e : kEdges) {
        const int a = t[e[0]], b = t[e[1]];
        auto [it, inserted] = edge_node.try_emplace(edge_key(a, b), static_cast<int>(node_coords_.size()));
        if (inserted) node_coords_.push_back(0.5 * (verts[a] + verts[b]));
        cell_nodes_.push_back(it->second);
      }
    }
  }
  if (npc == 6) {
    for (const Facet& f : mesh_->facets())
      facet_edge_node_.push_back(edge_node.at(edge_key(f.vertices[0], f.vertices[1])));
  }

  const int nc = components();
  std::vector<std::vector<int>> rows(dof_count());
  for (std::size_t c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = cell_nodes(static_cast<int>(c));
    for (int a : nodes)
      for (int ca = 0; ca < nc; ++ca)
        for (int b : nodes)
          for (int cb = 0; cb < nc; ++cb) rows[a * nc + ca].push_back(b * nc + cb);
  }
  pattern_ = SparseMatrix(dof_count(), dof_count(), rows);
}

std::vector<int> FunctionSpace::facet_nodes(int f) const {
  const Facet& facet = mesh_->facets()[f];
  std::vector<int> nodes{facet.vertices[0], facet.vertices[1]};
  if (degree() == 2) nodes.push_back(facet_edge_node_[f]);
  return nodes;
}

std::vector<int> FunctionSpace::boundary_nodes(BoundaryTag tag) const {
  std::vector<int> out;
  const auto facets = mesh_->facets();
  for (std::size_t f = 0; f < facets.size(); ++f) {
    if (facets[f].tag != tag) continue;
    for (int n : facet_nodes(static_cast<int>(f))) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FeField::FeField(std::shared_ptr<const FunctionSpace> space)
    : space_(std::move(space)), values_(space_->dof_count(), 0.0) {}

FeField::FeField(std::shared_ptr<const FunctionSpace> space, Vector values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_->dof_count())
    throw InvalidArgument("coefficient length " + std::to_string(values_.size()) +
                          " does not match dof count " + std::to_string(space_->dof_count()));
}

CellGeometry cell_geometry(const Mesh& mesh, int c) {
  CellGeometry g;
  const auto& t = mesh.cells()[c];
  const auto vs = mesh.vertices();
  for (int k = 0; k < 3; ++k) g.vertex[k] = vs[t[k]];
  const double twice_area = cross(g.vertex[1] - g.vertex[0], g.vertex[2] - g.vertex[0]);
  g.area = 0.5 * twice_area;
  for (int k = 0; k < 3; ++k) {
    // gradient is the inward normal of the opposite edge scaled by 1/(2A)
    const Vec2 p = g.vertex[(k + 1) % 3], q = g.vertex[(k + 2) % 3];
    g.grad_lambda[k] = {(p.y - q.y) / twice_area, (q.x - p.x) / twice_area};
  }
  return g;
}

ShapeValues shape_functions(int degree, const CellGeometry& g, std::array<double, 3> l) {
  ShapeValues s;
  const auto& dl = g.grad_lambda;
  if (degree == 1) {
    s.n = 3;
    for (int k = 0; k < 3; ++k) {
      s.phi[k] = l[k];
      s.grad[k] = dl[k];
    }
    return s;
  }
  s.n = 6;
  for (int k = 0; k < 3; ++k) {
    s.phi[k] = l[k] * (2.0 * l[k] - 1.0);
    s.grad[k] = (4.0 * l[k] - 1.0) * dl[k];
  }
  for (int e = 0; e < 3; ++e) {
    const int a = kEdges[e][0], b = kEdges[e][1];
    s.phi[3 + e] = 4.0 * l[a] * l[b];
    s.grad[3 + e] = 4.0 * (l[b] * dl[a] + l[a] * dl[b]);
  }
  return s;
}

FeField interpolate(std::shared_ptr<const FunctionSpace> space,
                    const std::function<double(Vec2, int)>& f) {
  FeField out(space);
  const int nc = space->components();
  const auto coords = space->node_coords();
  for (std::size_t n = 0; n < coords.size(); ++n)
    for (int c = 0; c < nc; ++c) out[n * nc + c] = f(coords[n], c);
  return out;
}

PointValue evaluate_in_cell(const FeField& field, int c, const CellGeometry&, const ShapeValues& s) {
  PointValue pv;
  const auto& space = field.space();
  const int nc = space.components();
  const auto nodes = space.cell_nodes(c);
  const auto vals = field.values();
  for (int k = 0; k < s.n; ++k) {
    for (int comp = 0; comp < nc; ++comp) {
      const double coef = vals[static_cast<std::size_t>(nodes[k]) * nc + comp];
      pv.value[comp] += coef * s.phi[k];
      pv.grad[comp] = pv.grad[comp] + coef * s.grad[k];
    }
  }
  return pv;
}

double evaluate(const FeField& field, Vec2 point, int component) {
  const auto& space = field.space();
  if (component < 0 || component >= space.components())
    throw InvalidArgument("component out of range");
  const auto cell = space.mesh().locate(point);
  if (!cell)
    throw OutOfDomain("point (" + std::to_string(point.x) + ", " + std::to_string(point.y) +
                      ") is outside the mesh");
  const CellGeometry g = cell_geometry(space.mesh(), *cell);
  const ShapeValues s = shape_functions(space.degree(), g, barycentric(space.mesh(), *cell, point));
  return evaluate_in_cell(field, *cell, g, s).value[component];
}

Vector vertex_values(const FeField& field) {
  const auto& space = field.space();
  const std::size_t nv = space.mesh().num_vertices() * space.components();
  return Vector(field.values().begin(), field.values().begin() + static_cast<std::ptrdiff_t>(nv));
}

namespace {

template <class Kernel>
SparseMatrix assemble_scalar(const FunctionSpace& space, Kernel kernel) {
  SparseMatrix a = space.new_matrix();
  const auto& mesh = space.mesh();
  const auto& quad = triangle_degree4();
  const int nc = space.components();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, static_cast<int>(c));
    const auto nodes = space.cell_nodes(static_cast<int>(c));
    std::array<std::array<double, 6>, 6> local{};
    for (std::size_t q = 0; q < quad.weights.size(); ++q) {
      const ShapeValues s = shape_functions(space.degree(), g, ref_to_lambda(quad.points[q]));
      const double w = 2.0 * g.area * quad.weights[q];
      for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j) local[i][j] += w * kernel(s, i, j);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j)
        for (int comp = 0; comp < nc; ++comp)
          a.add(static_cast<std::size_t>(nodes[i]) * nc + comp, nodes[j] * nc + comp, local[i][j]);
  }
  return a;
}

} // namespace

SparseMatrix assemble_mass(const FunctionSpace& space) {
  if (space.components() != 1) throw InvalidArgument("assemble_mass expects a scalar space");
  return assemble_scalar(space, [](const ShapeValues& s, int i, int j) { return s.phi[i] * s.phi[j]; });
}

SparseMatrix assemble_stiffness(const FunctionSpace& space) {
  if (space.components() != 1) throw InvalidArgument("assemble_stiffness expects a scalar space");
  return assemble_scalar(space,
                         [](const ShapeValues& s, int i, int j) { return dot(s.grad[i], s.grad[j]); });
}

SparseMatrix assemble_vector_mass(const FunctionSpace& space) {
  return assemble_scalar(space, [](const ShapeValues& s, int i, int j) { return s.phi[i] * s.phi[j]; });
}

double integrate(const FeField& field) {
  const auto& space = field.space();
  if (space.components() != 1) throw InvalidArgument("integrate expects a scalar field");
  const auto& mesh = space.mesh();
  const auto& quad = triangle_degree4();
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, static_cast<int>(c));
    for (std::size_t q = 0; q < quad.weights.size(); ++q) {
      const ShapeValues s = shape_functions(space.degree(), g, ref_to_lambda(quad.points[q]));
      total += 2.0 * g.area * quad.weights[q] *
               evaluate_in_cell(field, static_cast<int>(c), g, s).value[0];
    }
  }
  return total;
}

} // namespace tfm

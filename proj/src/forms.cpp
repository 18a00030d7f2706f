#include "tfm/forms.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tfm {

Discretization Discretization::build(std::shared_ptr<const Mesh> mesh) {
  Discretization d;
  d.mesh = std::move(mesh);
  d.scalar = std::make_shared<const FunctionSpace>(d.mesh, SpaceKind::ScalarP1);
  d.vector = std::make_shared<const FunctionSpace>(d.mesh, SpaceKind::VectorP2);
  return d;
}

State State::zeros(const Discretization& disc) {
  State s;
  s.alpha_g = FeField(disc.scalar);
  s.alpha_l = FeField(disc.scalar, Vector(disc.scalar->dof_count(), 1.0));
  s.v_g = FeField(disc.vector);
  s.v_l = FeField(disc.vector);
  s.p_l = FeField(disc.scalar);
  return s;
}

const char* to_string(Phase phase) { return phase == Phase::Liquid ? "liquid" : "gas"; }

Vector TentativeLoads::total() const {
  Vector t(convection.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = convection[i] + pressure[i] + gravity[i] + drag[i] + interfacial[i];
  return t;
}

namespace {

void require_spaces(const State& s) {
  if (s.alpha_g.space().kind() != SpaceKind::ScalarP1 || s.alpha_l.space().kind() != SpaceKind::ScalarP1 ||
      s.p_l.space().kind() != SpaceKind::ScalarP1)
    throw InvalidArgument("phase fractions and pressure must be scalar P1 fields");
  if (s.v_g.space().kind() != SpaceKind::VectorP2 || s.v_l.space().kind() != SpaceKind::VectorP2)
    throw InvalidArgument("velocities must be vector P2 fields");
  if (!s.v_g.space().same_as(s.v_l.space()) || !s.alpha_g.space().same_as(s.p_l.space()) ||
      !s.alpha_g.space().same_as(s.alpha_l.space()))
    throw InvalidArgument("state fields live on mismatched spaces");
  if (&s.v_g.space().mesh() != &s.alpha_g.space().mesh())
    throw InvalidArgument("state fields live on different meshes");
}

/// Nodal ln(max(alpha, floor)).
Vector log_floor(const FeField& alpha, double floor) {
  Vector out(alpha.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::max(alpha[i], floor));
  return out;
}

/// Gradient of a P1 nodal vector on a cell (constant).
Vec2 p1_gradient(std::span<const double> nodal, std::span<const int> nodes, const CellGeometry& g) {
  Vec2 grad{};
  for (int k = 0; k < 3; ++k) grad = grad + nodal[nodes[k]] * g.grad_lambda[k];
  return grad;
}

double p1_value(std::span<const double> nodal, std::span<const int> nodes,
                const std::array<double, 3>& l) {
  return nodal[nodes[0]] * l[0] + nodal[nodes[1]] * l[1] + nodal[nodes[2]] * l[2];
}

struct VectorAtPoint {
  Vec2 v{};
  std::array<Vec2, 2> grad{}; // grad of each component
  double div() const { return grad[0].x + grad[1].y; }
};

VectorAtPoint vector_at(std::span<const double> coef, std::span<const int> nodes, const ShapeValues& s) {
  VectorAtPoint out;
  for (int k = 0; k < s.n; ++k) {
    const double cx = coef[2 * static_cast<std::size_t>(nodes[k])];
    const double cy = coef[2 * static_cast<std::size_t>(nodes[k]) + 1];
    out.v.x += cx * s.phi[k];
    out.v.y += cy * s.phi[k];
    out.grad[0] = out.grad[0] + cx * s.grad[k];
    out.grad[1] = out.grad[1] + cy * s.grad[k];
  }
  return out;
}

double comp(Vec2 v, int a) { return a == 0 ? v.x : v.y; }

} // namespace

TentativeLoads tentative_loads(Phase phase, const State& state, const DimensionlessGroups& groups,
                               const ClosureInputs& closures) {
  require_spaces(state);
  const FunctionSpace& vs = state.v_g.space();
  const FunctionSpace& ss = state.alpha_g.space();
  const Mesh& mesh = vs.mesh();
  const auto& quad = triangle_degree4();
  const std::size_t n = vs.dof_count();
  TentativeLoads loads{Vector(n, 0.0), Vector(n, 0.0), Vector(n, 0.0), Vector(n, 0.0), Vector(n, 0.0)};

  const bool gas = phase == Phase::Gas;
  const FeField& own = gas ? state.v_g : state.v_l;
  const double Eu = gas ? groups.Eu_g : groups.Eu_l;
  const double inv_fr2 = 1.0 / (groups.Fr * groups.Fr);
  const double g_tilde = groups.g_tilde;
  const Vector ln_alpha_l = log_floor(state.alpha_l, closures.alpha_floor);
  const auto ag = state.alpha_g.values();
  const auto al = state.alpha_l.values();
  const auto p = state.p_l.values();

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const CellGeometry g = cell_geometry(mesh, ci);
    const auto vnodes = vs.cell_nodes(ci);
    const auto snodes = ss.cell_nodes(ci);
    const Vec2 grad_p = p1_gradient(p, snodes, g);
    const Vec2 grad_ln_al = p1_gradient(ln_alpha_l, snodes, g);
    std::array<double, 12> conv{}, pres{}, grav{}, drag{}, intf{};
    for (std::size_t q = 0; q < quad.weights.size(); ++q) {
      const auto l = ref_to_lambda(quad.points[q]);
      const ShapeValues s = shape_functions(2, g, l);
      const double w = 2.0 * g.area * quad.weights[q];
      const VectorAtPoint vo = vector_at(own.values(), vnodes, s);
      const VectorAtPoint vgp = vector_at(state.v_g.values(), vnodes, s);
      const VectorAtPoint vlp = vector_at(state.v_l.values(), vnodes, s);
      const Vec2 vr = vgp.v - vlp.v;
      const double vr2 = dot(vr, vr);
      const double K = drag_exchange_coefficient(std::sqrt(vr2), groups);

      const Vec2 c_adv{dot(vo.v, vo.grad[0]), dot(vo.v, vo.grad[1])};
      Vec2 f_pres = -Eu * grad_p;
      Vec2 f_drag{};
      Vec2 f_intf{};
      if (gas) {
        if (groups.C_P != 0.0) {
          // grad |v_r|^2 = 2 sum_c v_r,c grad v_r,c
          const Vec2 g_vr2 = 2.0 * (vr.x * (vgp.grad[0] - vlp.grad[0]) + vr.y * (vgp.grad[1] - vlp.grad[1]));
          f_pres = f_pres + (Eu * groups.C_P * groups.rho_ratio) * g_vr2;
        }
        if (closures.implicit_gas_drag)
          f_drag = (groups.rho_ratio * K) * vlp.v;
        else
          f_drag = (-groups.rho_ratio * K) * vr;
      } else {
        const double agq = p1_value(ag, snodes, l);
        const double alq = std::max(p1_value(al, snodes, l), closures.alpha_floor);
        f_drag = (agq / alq * K) * vr;
        f_intf = (-groups.C_P * vr2) * grad_ln_al;
      }
      const Vec2 f_grav{0.0, -inv_fr2 * g_tilde};
      for (int i = 0; i < 6; ++i) {
        const double wp = w * s.phi[i];
        for (int a = 0; a < 2; ++a) {
          conv[2 * i + a] -= wp * comp(c_adv, a);
          pres[2 * i + a] += wp * comp(f_pres, a);
          grav[2 * i + a] += wp * comp(f_grav, a);
          drag[2 * i + a] += wp * comp(f_drag, a);
          intf[2 * i + a] += wp * comp(f_intf, a);
        }
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int a = 0; a < 2; ++a) {
        const std::size_t dof = 2 * static_cast<std::size_t>(vnodes[i]) + a;
        loads.convection[dof] += conv[2 * i + a];
        loads.pressure[dof] += pres[2 * i + a];
        loads.gravity[dof] += grav[2 * i + a];
        loads.drag[dof] += drag[2 * i + a];
        loads.interfacial[dof] += intf[2 * i + a];
      }
    }
  }
  return loads;
}

TentativeParts assemble_tentative_parts(Phase phase, const State& state, double dt,
                                        const DimensionlessGroups& groups,
                                        const ClosureInputs& closures) {
  require_spaces(state);
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const FunctionSpace& vs = state.v_g.space();
  const FunctionSpace& ss = state.alpha_g.space();
  const Mesh& mesh = vs.mesh();
  const auto& quad = triangle_degree4();
  const bool gas = phase == Phase::Gas;
  const FeField& own = gas ? state.v_g : state.v_l;
  const FeField& alpha = gas ? state.alpha_g : state.alpha_l;
  const double nu = 0.5 / (gas ? groups.Re_g : groups.Re_l);
  const bool drag_implicit = gas && closures.implicit_gas_drag;
  const Vector ln_alpha = log_floor(alpha, closures.alpha_floor);

  TentativeParts parts{vs.new_matrix(), Vector(vs.dof_count(), 0.0), {}};
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const CellGeometry g = cell_geometry(mesh, ci);
    const auto vnodes = vs.cell_nodes(ci);
    const auto snodes = ss.cell_nodes(ci);
    const Vec2 gl = p1_gradient(ln_alpha, snodes, g);
    // mass/dt (+ implicit drag) and the Crank-Nicolson viscous operator
    double mass[12][12] = {};
    double visc[12][12] = {};
    for (std::size_t q = 0; q < quad.weights.size(); ++q) {
      const ShapeValues s = shape_functions(2, g, ref_to_lambda(quad.points[q]));
      const double w = 2.0 * g.area * quad.weights[q];
      double react = 1.0 / dt;
      if (drag_implicit) {
        const VectorAtPoint vgp = vector_at(state.v_g.values(), vnodes, s);
        const VectorAtPoint vlp = vector_at(state.v_l.values(), vnodes, s);
        react += groups.rho_ratio * drag_exchange_coefficient(norm(vgp.v - vlp.v), groups);
      }
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          const double mij = w * s.phi[i] * s.phi[j];
          const double kij = w * dot(s.grad[i], s.grad[j]);
          const double gij = w * s.phi[i] * dot(gl, s.grad[j]);
          for (int a = 0; a < 2; ++a) {
            mass[2 * i + a][2 * j + a] += react * mij;
            for (int b = 0; b < 2; ++b) {
              // <tau(v), grad phi> - <grad ln(alpha) . tau(v), phi>, tau = grad v + grad v^T
              double v = w * comp(s.grad[j], a) * comp(s.grad[i], b) -
                         w * s.phi[i] * comp(gl, b) * comp(s.grad[j], a);
              if (a == b) v += kij - gij;
              visc[2 * i + a][2 * j + b] += nu * v;
            }
          }
        }
      }
    }
    const auto vn = own.values();
    for (int r = 0; r < 12; ++r) {
      const int row = 2 * vnodes[r / 2] + r % 2;
      double hist = 0.0;
      for (int k = 0; k < 12; ++k) {
        const int col = 2 * vnodes[k / 2] + k % 2;
        parts.lhs.add(row, col, mass[r][k] + visc[r][k]);
        hist -= visc[r][k] * vn[col];
      }
      parts.history[row] += hist;
    }
  }
  // history gets M v^n / dt; assemble with plain mass to exclude implicit drag
  {
    const SparseMatrix m = assemble_vector_mass(vs);
    const Vector mv = m * own.values();
    for (std::size_t i = 0; i < mv.size(); ++i) parts.history[i] += mv[i] / dt;
  }
  parts.loads = tentative_loads(phase, state, groups, closures);
  return parts;
}

LinearSystem assemble_tentative_velocity(Phase phase, const State& state, double dt,
                                         const DimensionlessGroups& groups,
                                         const ClosureInputs& closures, const DirichletData& bc) {
  TentativeParts parts = assemble_tentative_parts(phase, state, dt, groups, closures);
  LinearSystem sys{std::move(parts.lhs), std::move(parts.history)};
  const Vector load = parts.loads.total();
  for (std::size_t i = 0; i < load.size(); ++i) sys.b[i] += load[i];
  apply_dirichlet(sys.A, sys.b, bc.dofs, bc.values, false);
  return sys;
}

LinearSystem assemble_pressure_poisson(const State& state, const FeField& v_star_l,
                                       const FeField& v_star_g, double dt,
                                       const DimensionlessGroups& groups,
                                       const std::vector<int>& fixed_dofs) {
  require_spaces(state);
  if (!v_star_l.space().same_as(state.v_l.space()) || !v_star_g.space().same_as(state.v_g.space()))
    throw InvalidArgument("tentative velocities live on a different space than the state");
  if (fixed_dofs.empty())
    throw SingularSystem("pressure increment has no Dirichlet boundary; the Poisson system is singular");
  const FunctionSpace& ss = state.alpha_g.space();
  const FunctionSpace& vs = state.v_g.space();
  const Mesh& mesh = ss.mesh();
  const auto& quad = triangle_degree4();
  LinearSystem sys{ss.new_matrix(), Vector(ss.dof_count(), 0.0)};
  const auto ag = state.alpha_g.values();
  const auto al = state.alpha_l.values();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const CellGeometry g = cell_geometry(mesh, ci);
    const auto snodes = ss.cell_nodes(ci);
    const auto vnodes = vs.cell_nodes(ci);
    const Vec2 grad_ag = p1_gradient(ag, snodes, g);
    const Vec2 grad_al = p1_gradient(al, snodes, g);
    double local[3][3] = {};
    double rhs[3] = {};
    for (std::size_t q = 0; q < quad.weights.size(); ++q) {
      const auto l = ref_to_lambda(quad.points[q]);
      const ShapeValues s2 = shape_functions(2, g, l);
      const double w = 2.0 * g.area * quad.weights[q];
      const double agq = p1_value(ag, snodes, l);
      const double alq = p1_value(al, snodes, l);
      const double coef = groups.Eu_l * alq + groups.Eu_g * agq;
      const VectorAtPoint vl = vector_at(v_star_l.values(), vnodes, s2);
      const VectorAtPoint vg = vector_at(v_star_g.values(), vnodes, s2);
      const double div = dot(grad_al, vl.v) + alq * vl.div() + dot(grad_ag, vg.v) + agq * vg.div();
      for (int i = 0; i < 3; ++i) {
        rhs[i] -= w * div / dt * l[i];
        for (int j = 0; j < 3; ++j) local[i][j] += w * coef * dot(g.grad_lambda[i], g.grad_lambda[j]);
      }
    }
    for (int i = 0; i < 3; ++i) {
      sys.b[snodes[i]] += rhs[i];
      for (int j = 0; j < 3; ++j) sys.A.add(snodes[i], snodes[j], local[i][j]);
    }
  }
  const Vector zeros(fixed_dofs.size(), 0.0);
  apply_dirichlet(sys.A, sys.b, fixed_dofs, zeros, true);
  return sys;
}

LinearSystem assemble_velocity_update(Phase phase, const FeField& v_star, const FeField& delta_p,
                                      double dt, const DimensionlessGroups& groups,
                                      const DirichletData& bc) {
  if (v_star.space().kind() != SpaceKind::VectorP2 || delta_p.space().kind() != SpaceKind::ScalarP1)
    throw InvalidArgument("velocity update expects a vector P2 velocity and a P1 pressure increment");
  if (&v_star.space().mesh() != &delta_p.space().mesh())
    throw InvalidArgument("velocity and pressure live on different meshes");
  const FunctionSpace& vs = v_star.space();
  const FunctionSpace& ss = delta_p.space();
  const Mesh& mesh = vs.mesh();
  const auto& quad = triangle_degree4();
  const double Eu = phase == Phase::Gas ? groups.Eu_g : groups.Eu_l;
  LinearSystem sys{assemble_vector_mass(vs), Vector{}};
  sys.b = sys.A * v_star.values();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const CellGeometry g = cell_geometry(mesh, ci);
    const auto vnodes = vs.cell_nodes(ci);
    const Vec2 grad = p1_gradient(delta_p.values(), ss.cell_nodes(ci), g);
    for (std::size_t q = 0; q < quad.weights.size(); ++q) {
      const ShapeValues s = shape_functions(2, g, ref_to_lambda(quad.points[q]));
      const double w = 2.0 * g.area * quad.weights[q] * dt * Eu;
      for (int i = 0; i < 6; ++i) {
        sys.b[2 * static_cast<std::size_t>(vnodes[i])] -= w * s.phi[i] * grad.x;
        sys.b[2 * static_cast<std::size_t>(vnodes[i]) + 1] -= w * s.phi[i] * grad.y;
      }
    }
  }
  apply_dirichlet(sys.A, sys.b, bc.dofs, bc.values, true);
  return sys;
}

double supg_tau(double h, double speed) { return speed < 1e-10 ? 0.0 : h / (2.0 * speed); }

namespace {

/// Unconstrained alpha system.
LinearSystem alpha_raw(const FeField& alpha_old, const FeField& v_g, double dt, bool supg) {
  if (alpha_old.space().kind() != SpaceKind::ScalarP1)
    throw InvalidArgument("alpha must be a scalar P1 field");
  if (v_g.space().kind() != SpaceKind::VectorP2)
    throw InvalidArgument("gas velocity must be a vector P2 field");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const FunctionSpace& ss = alpha_old.space();
  const FunctionSpace& vs = v_g.space();
  const Mesh& mesh = ss.mesh();
  const auto& quad = triangle_degree4();
  const auto h = mesh.cell_diameters();
  LinearSystem sys{ss.new_matrix(), Vector(ss.dof_count(), 0.0)};
  const auto a0 = alpha_old.values();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const CellGeometry g = cell_geometry(mesh, ci);
    const auto snodes = ss.cell_nodes(ci);
    const auto vnodes = vs.cell_nodes(ci);
    double local[3][3] = {};
    double rhs[3] = {};
    for (std::size_t q = 0; q < quad.weights.size(); ++q) {
      const auto l = ref_to_lambda(quad.points[q]);
      const ShapeValues s2 = shape_functions(2, g, l);
      const double w = 2.0 * g.area * quad.weights[q];
      const VectorAtPoint v = vector_at(v_g.values(), vnodes, s2);
      const double div = v.div();
      const double tau = supg ? supg_tau(h[c], norm(v.v)) : 0.0;
      const double aq = p1_value(a0, snodes, l);
      for (int i = 0; i < 3; ++i) {
        const double test = l[i] + tau * dot(v.v, g.grad_lambda[i]);
        rhs[i] += w * aq / dt * test;
        for (int j = 0; j < 3; ++j) {
          const double trial = l[j] / dt + dot(v.v, g.grad_lambda[j]) + l[j] * div;
          local[i][j] += w * trial * test;
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      sys.b[snodes[i]] += rhs[i];
      for (int j = 0; j < 3; ++j) sys.A.add(snodes[i], snodes[j], local[i][j]);
    }
  }
  return sys;
}

} // namespace

LinearSystem assemble_alpha_system(const FeField& alpha_old, const FeField& v_g, double dt,
                                   const DirichletData& bc, bool supg) {
  LinearSystem sys = alpha_raw(alpha_old, v_g, dt, supg);
  apply_dirichlet(sys.A, sys.b, bc.dofs, bc.values, false);
  return sys;
}

Vector alpha_residual(const FeField& alpha_old, const FeField& alpha_new, const FeField& v_g,
                      double dt, bool supg) {
  const LinearSystem sys = alpha_raw(alpha_old, v_g, dt, supg);
  Vector r = sys.A * alpha_new.values();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.b[i];
  return r;
}

Vec2 outward_normal(const Mesh& mesh, int facet) {
  // facets run counterclockwise around the domain
  const auto& f = mesh.facets()[facet];
  const Vec2 t = mesh.vertices()[f.vertices[1]] - mesh.vertices()[f.vertices[0]];
  const double len = norm(t);
  return {t.y / len, -t.x / len};
}

double boundary_flux(const FeField& alpha, const FeField& v, BoundaryTag tag) {
  if (alpha.space().kind() != SpaceKind::ScalarP1 || v.space().kind() != SpaceKind::VectorP2)
    throw InvalidArgument("boundary_flux expects P1 alpha and vector P2 velocity");
  const Mesh& mesh = alpha.space().mesh();
  const auto rule = gauss_line(3);
  double total = 0.0;
  for (int f : boundary_facets(mesh, tag)) {
    const Facet& facet = mesh.facets()[f];
    const Vec2 n = outward_normal(mesh, f);
    const double len = mesh.facet_length(f);
    const auto vnodes = v.space().facet_nodes(f); // v0, v1, midpoint
    const int a = facet.vertices[0], b = facet.vertices[1];
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const double s = rule.points[q][0];
      const double alpha_q = (1.0 - s) * alpha[a] + s * alpha[b];
      // 1D quadratic Lagrange basis on the edge
      const double n0 = (1.0 - s) * (1.0 - 2.0 * s), n1 = s * (2.0 * s - 1.0), nm = 4.0 * s * (1.0 - s);
      const auto vx = [&](int comp) {
        return n0 * v[2 * static_cast<std::size_t>(vnodes[0]) + comp] +
               n1 * v[2 * static_cast<std::size_t>(vnodes[1]) + comp] +
               nm * v[2 * static_cast<std::size_t>(vnodes[2]) + comp];
      };
      total += rule.weights[q] * len * alpha_q * (vx(0) * n.x + vx(1) * n.y);
    }
  }
  return total;
}

} // namespace tfm

#include "tfm/vi.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

namespace tfm {

void BoxVIProblem::validate() const {
  const std::size_t n = b.size();
  if (A.rows() != n || A.cols() != n) throw InvalidArgument("VI matrix must be square and match b");
  if (lower.size() != n || upper.size() != n) throw InvalidArgument("VI bounds must match b");
  if (!x0.empty() && x0.size() != n) throw InvalidArgument("VI initial guess must match b");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i])) throw InvalidArgument("VI lower bound exceeds upper bound");
}

double VIConditions::worst() const { return std::max({lower, upper, inactive, infeasibility}); }

VIConditions check_vi_conditions(std::span<const double> x, const SparseMatrix& A,
                                 std::span<const double> b, std::span<const double> lower,
                                 std::span<const double> upper) {
  const std::size_t n = b.size();
  if (x.size() != n || A.rows() != n || A.cols() != n || lower.size() != n || upper.size() != n)
    throw InvalidArgument("VI dimensions disagree");
  const Vector ax = A * x;
  VIConditions c;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ax[i] - b[i];
    c.infeasibility = std::max({c.infeasibility, lower[i] - x[i], x[i] - upper[i]});
    const bool at_l = x[i] <= lower[i];
    const bool at_u = x[i] >= upper[i];
    if (at_l && at_u) continue; // fixed component
    if (at_l)
      c.lower = std::max(c.lower, -r);
    else if (at_u)
      c.upper = std::max(c.upper, r);
    else
      c.inactive = std::max(c.inactive, std::abs(r));
  }
  return c;
}

namespace {

using Signature = std::vector<std::int8_t>; // -1 lower, 0 free, +1 upper

class ReducedSolver {
public:
  ReducedSolver(const BoxVIProblem& p, double tol) : p_(p), tol_(tol) {}

  /// Solve with the components flagged in `sig` held at their bounds.
  Vector solve(const Signature& sig) const {
    const std::size_t n = p_.b.size();
    Vector x(n, 0.0);
    std::vector<int> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (sig[i] < 0)
        x[i] = p_.lower[i];
      else if (sig[i] > 0)
        x[i] = p_.upper[i];
      else
        free.push_back(static_cast<int>(i));
    }
    if (free.empty()) return x;
    // rhs_I = b_I - A_IA x_A
    Vector rhs(free.size());
    {
      Vector xa = x;
      for (int i : free) xa[i] = 0.0;
      const Vector ax = p_.A * xa;
      for (std::size_t k = 0; k < free.size(); ++k) rhs[k] = p_.b[free[k]] - ax[free[k]];
    }
    const SparseMatrix sub = p_.A.principal_submatrix(free);
    Vector y;
    if (free.size() <= 64) {
      y = lu_solve_dense(sub.to_dense(), rhs);
    } else {
      Vector guess(free.size());
      for (std::size_t k = 0; k < free.size(); ++k) guess[k] = last_[free[k]];
      const double scale = std::max(norm2(rhs), 1e-300);
      const double rel = std::clamp(1e-3 * tol_ / scale, 1e-15, 1e-8);
      try {
        y = solve_bicgstab(sub, rhs, rel, 20 * static_cast<int>(free.size()) + 1000, guess).x;
      } catch (const NonConvergence&) {
        y = solve_bicgstab(sub, rhs, 1e-13, 40 * static_cast<int>(free.size()) + 1000, guess).x;
      }
    }
    for (std::size_t k = 0; k < free.size(); ++k) x[free[k]] = y[k];
    last_ = x;
    return x;
  }

  void seed(const Vector& x) const { last_ = x; }

private:
  const BoxVIProblem& p_;
  double tol_;
  mutable Vector last_;
};

Vector residual(const BoxVIProblem& p, const Vector& x) {
  Vector r = p.A * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= p.b[i];
  return r;
}

/// Clip to the box; returns the indices that were clipped.
std::vector<std::size_t> project(const BoxVIProblem& p, Vector& x) {
  std::vector<std::size_t> clipped;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < p.lower[i]) {
      x[i] = p.lower[i];
      clipped.push_back(i);
    } else if (x[i] > p.upper[i]) {
      x[i] = p.upper[i];
      clipped.push_back(i);
    }
  }
  return clipped;
}

} // namespace

VIResult solve_box_vi(const BoxVIProblem& problem, double tol, int max_iter) {
  problem.validate();
  if (!(tol > 0.0)) throw InvalidArgument("VI tolerance must be positive");
  const std::size_t n = problem.b.size();
  VIResult out;
  out.x = problem.x0.empty() ? Vector(n, 0.0) : problem.x0;
  project(problem, out.x);
  if (n == 0) return out;

  ReducedSolver reduced(problem, tol);
  reduced.seed(out.x);
  std::set<Signature> seen;
  Signature forced(n, 0); // components pinned by the anti-cycling safeguard
  bool least_index = false;

  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it;
    const Vector r = residual(problem, out.x);
    out.conditions = check_vi_conditions(out.x, problem.A, problem.b, problem.lower, problem.upper);
    if (out.conditions.satisfied(tol)) return out;

    Signature sig(n, 0);
    if (!least_index) {
      for (std::size_t i = 0; i < n; ++i) {
        if (out.x[i] <= problem.lower[i] && (r[i] > 0.0 || problem.lower[i] == problem.upper[i]))
          sig[i] = -1;
        else if (out.x[i] >= problem.upper[i] && r[i] < 0.0)
          sig[i] = 1;
        else if (forced[i] != 0)
          sig[i] = forced[i];
      }
      if (!seen.insert(sig).second) {
        // repeated active set: pin everything that sits on a bound
        bool grew = false;
        for (std::size_t i = 0; i < n; ++i) {
          const std::int8_t at = out.x[i] <= problem.lower[i] ? -1 : (out.x[i] >= problem.upper[i] ? 1 : 0);
          if (at != 0 && forced[i] == 0) {
            forced[i] = at;
            sig[i] = at;
            grew = true;
          }
        }
        if (!grew || !seen.insert(sig).second) least_index = true;
      }
    }
    if (least_index) {
      // one-index pivoting: flip the first component that violates its case
      for (std::size_t i = 0; i < n; ++i)
        sig[i] = out.x[i] <= problem.lower[i] ? -1 : (out.x[i] >= problem.upper[i] ? 1 : 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (sig[i] == -1 && r[i] < -tol && problem.lower[i] < problem.upper[i]) {
          sig[i] = 0;
          break;
        }
        if (sig[i] == 1 && r[i] > tol) {
          sig[i] = 0;
          break;
        }
        if (sig[i] == 0 && std::abs(r[i]) > tol) break; // resolved by the solve below
      }
      Vector x = reduced.solve(sig);
      // step towards the reduced solution, stopping at the first bound crossed
      double step = 1.0;
      std::size_t hit = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sig[i] != 0) continue;
        const double d = x[i] - out.x[i];
        if (x[i] < problem.lower[i] && d < 0.0) {
          const double s = (problem.lower[i] - out.x[i]) / d;
          if (s < step) step = s, hit = i;
        } else if (x[i] > problem.upper[i] && d > 0.0) {
          const double s = (problem.upper[i] - out.x[i]) / d;
          if (s < step) step = s, hit = i;
        }
      }
      for (std::size_t i = 0; i < n; ++i) out.x[i] += step * (x[i] - out.x[i]);
      if (hit < n) out.x[hit] = x[hit] < problem.lower[hit] ? problem.lower[hit] : problem.upper[hit];
      project(problem, out.x);
      continue;
    }
    out.x = reduced.solve(sig);
    project(problem, out.x);
  }
  out.conditions = check_vi_conditions(out.x, problem.A, problem.b, problem.lower, problem.upper);
  if (out.conditions.satisfied(tol)) {
    out.iterations = max_iter;
    return out;
  }
  throw NonConvergence("box VI solver reached the iteration limit", out.conditions.worst(), max_iter);
}

} // namespace tfm

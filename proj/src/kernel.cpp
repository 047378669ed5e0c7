#include "relaymec/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relaymec/errors.hpp"

namespace relaymec {

namespace {
constexpr double kGoldenRatio = 0.6180339887498949;  // (sqrt(5) - 1) / 2
}

ScalarMinimum golden_search(const ScalarProblem& p) {
  if (!(p.lo <= p.hi)) throw DomainError("golden_search: lo must be <= hi");
  if (!(p.tol > 0.0)) throw DomainError("golden_search: tol must be > 0");

  auto eval = [&](double x) {
    const double v = p.objective(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "golden_search: objective is not finite at x = " << x;
      throw NumericError(msg.str());
    }
    return v;
  };

  const double width0 = p.hi - p.lo;
  if (width0 == 0.0) return {p.lo, eval(p.lo), 1};

  double a = p.lo, b = p.hi;
  double x1 = b - kGoldenRatio * (b - a);
  double x2 = a + kGoldenRatio * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  int evals = 2;

  double best_x = f1 <= f2 ? x1 : x2;
  double best_f = std::min(f1, f2);

  while (b - a > p.tol * width0) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGoldenRatio * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGoldenRatio * (b - a);
      f2 = eval(x2);
    }
    ++evals;
    if (f1 < best_f) { best_f = f1; best_x = x1; }
    if (f2 < best_f) { best_f = f2; best_x = x2; }
  }
  return {best_x, best_f, evals};
}

double bisect_last_below(const std::function<double(double)>& f, double lo,
                         double hi, double limit, double tol) {
  if (!(lo <= hi)) throw DomainError("bisect_last_below: lo must be <= hi");
  if (f(lo) > limit) throw DomainError("bisect_last_below: f(lo) must be <= limit");
  if (f(hi) <= limit) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= limit)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double log_sum_exp(std::span<const std::pair<double, double>> terms) {
  if (terms.empty()) throw DomainError("log_sum_exp: empty term list");
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& [w, x] : terms) {
    if (!(w > 0.0)) throw DomainError("log_sum_exp: weights must be > 0");
    shift = std::max(shift, std::log(w) + x);
  }
  double acc = 0.0;
  for (const auto& [w, x] : terms) acc += std::exp(std::log(w) + x - shift);
  return shift + std::log(acc);
}

LseFunction::LseFunction(std::vector<LseTerm> terms) {
  if (terms.empty()) throw DomainError("LseFunction: empty term list");
  const int n = static_cast<int>(terms.front().exponent.size());
  const int k = static_cast<int>(terms.size());
  exponents_.resize(k, n);
  log_weights_.resize(k);
  for (int i = 0; i < k; ++i) {
    if (!(terms[i].weight > 0.0))
      throw DomainError("LseFunction: weights must be > 0");
    if (terms[i].exponent.size() != n)
      throw DomainError("LseFunction: inconsistent term dimensions");
    exponents_.row(i) = terms[i].exponent.transpose();
    log_weights_(i) = std::log(terms[i].weight);
  }
}

double LseFunction::value(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = log_weights_ + exponents_ * x;
  const double shift = z.maxCoeff();
  return shift + std::log((z.array() - shift).exp().sum());
}

double LseFunction::value_grad(const Eigen::VectorXd& x,
                               Eigen::VectorXd& grad) const {
  const Eigen::VectorXd z = log_weights_ + exponents_ * x;
  const double shift = z.maxCoeff();
  Eigen::VectorXd p = (z.array() - shift).exp();
  const double total = p.sum();
  p /= total;
  grad = exponents_.transpose() * p;
  return shift + std::log(total);
}

double LseFunction::value_grad_hess(const Eigen::VectorXd& x,
                                    Eigen::VectorXd& grad,
                                    Eigen::MatrixXd& hess) const {
  const Eigen::VectorXd z = log_weights_ + exponents_ * x;
  const double shift = z.maxCoeff();
  Eigen::VectorXd p = (z.array() - shift).exp();
  const double total = p.sum();
  p /= total;
  grad = exponents_.transpose() * p;
  hess = exponents_.transpose() * p.asDiagonal() * exponents_ -
         grad * grad.transpose();
  return shift + std::log(total);
}

namespace {

struct BarrierEval {
  double phi;           // t*f0 + barrier
  double f0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  bool feasible;
};

class BarrierProblem {
 public:
  BarrierProblem(const LseProgram& p, double t)
      : p_(p), t_(t), f0_(p.objective) {
    if (p.lse_constraint) f1_.emplace(p.lse_constraint->terms);
  }

  int dim() const { return static_cast<int>(p_.lower_bounds.size()); }

  // Strict feasibility; slack arguments let callers demand interior room.
  bool strictly_feasible(const Eigen::VectorXd& x) const {
    for (int j = 0; j < dim(); ++j)
      if (!(x(j) > p_.lower_bounds(j))) return false;
    if (f1_ && !(f1_->value(x) < p_.lse_constraint->bound)) return false;
    if (p_.affine_constraint &&
        !(p_.affine_constraint->w.dot(x) + p_.affine_constraint->offset > 0.0))
      return false;
    return true;
  }

  double objective(const Eigen::VectorXd& x) const { return f0_.value(x); }

  // phi only (for line search); +inf when infeasible.
  double phi(const Eigen::VectorXd& x) const {
    double acc = t_ * f0_.value(x);
    for (int j = 0; j < dim(); ++j) {
      const double s = x(j) - p_.lower_bounds(j);
      if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
      acc -= std::log(s);
    }
    if (f1_) {
      const double s = p_.lse_constraint->bound - f1_->value(x);
      if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
      acc -= std::log(s);
    }
    if (p_.affine_constraint) {
      const double s =
          p_.affine_constraint->w.dot(x) + p_.affine_constraint->offset;
      if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
      acc -= std::log(s);
    }
    return acc;
  }

  BarrierEval eval(const Eigen::VectorXd& x) const {
    const int n = dim();
    BarrierEval out;
    out.feasible = true;
    Eigen::VectorXd g0(n);
    Eigen::MatrixXd h0(n, n);
    out.f0 = f0_.value_grad_hess(x, g0, h0);
    out.phi = t_ * out.f0;
    out.grad = t_ * g0;
    out.hess = t_ * h0;

    for (int j = 0; j < n; ++j) {
      const double s = x(j) - p_.lower_bounds(j);
      if (!(s > 0.0)) { out.feasible = false; return out; }
      out.phi -= std::log(s);
      out.grad(j) -= 1.0 / s;
      out.hess(j, j) += 1.0 / (s * s);
    }
    if (f1_) {
      Eigen::VectorXd g1(n);
      Eigen::MatrixXd h1(n, n);
      const double v1 = f1_->value_grad_hess(x, g1, h1);
      const double s = p_.lse_constraint->bound - v1;
      if (!(s > 0.0)) { out.feasible = false; return out; }
      out.phi -= std::log(s);
      out.grad += g1 / s;
      out.hess += h1 / s + (g1 * g1.transpose()) / (s * s);
    }
    if (p_.affine_constraint) {
      const Eigen::VectorXd& w = p_.affine_constraint->w;
      const double s = w.dot(x) + p_.affine_constraint->offset;
      if (!(s > 0.0)) { out.feasible = false; return out; }
      out.phi -= std::log(s);
      out.grad -= w / s;
      out.hess += (w * w.transpose()) / (s * s);
    }
    return out;
  }

 private:
  const LseProgram& p_;
  double t_;
  LseFunction f0_;
  std::optional<LseFunction> f1_;
};

std::string dump_iterate(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << "]";
  return os.str();
}

// Damped Newton on the centering problem min t*f0 + barrier.
int newton_center(const BarrierProblem& bp, Eigen::VectorXd& x) {
  constexpr int kMaxNewton = 120;
  constexpr double kDecrementTol = 1.0e-12;
  int iters = 0;
  for (; iters < kMaxNewton; ++iters) {
    BarrierEval e = bp.eval(x);
    if (!e.feasible)
      throw NumericError("solve_lse_program: iterate left the feasible set at " +
                         dump_iterate(x));
    // Tiny Tikhonov term keeps the factorization well posed when the
    // objective is flat along some direction.
    Eigen::MatrixXd h = e.hess;
    const double reg = 1.0e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    h.diagonal().array() += reg;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd dx = ldlt.solve(-e.grad);
    const double decrement = -e.grad.dot(dx);
    if (!(decrement > 0.0) || 0.5 * decrement <= kDecrementTol) break;

    double alpha = 1.0;
    const double slope = e.grad.dot(dx);
    bool accepted = false;
    for (int ls = 0; ls < 70; ++ls) {
      const Eigen::VectorXd cand = x + alpha * dx;
      const double phi_cand = bp.phi(cand);
      if (phi_cand <= e.phi + 1.0e-4 * alpha * slope) {
        x = cand;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted)
      throw NumericError(
          "solve_lse_program: line search stagnated at iterate " +
          dump_iterate(x));
  }
  return iters;
}

}  // namespace

LseSolution solve_lse_program(const LseProgram& p, const Eigen::VectorXd& start,
                              double tol) {
  const int n = static_cast<int>(p.lower_bounds.size());
  if (start.size() != n)
    throw DomainError("solve_lse_program: start has wrong dimension");
  {
    BarrierProblem check(p, 1.0);
    if (!check.strictly_feasible(start))
      throw DomainError("solve_lse_program: start point is not strictly feasible");
  }

  const int m = n + (p.lse_constraint ? 1 : 0) + (p.affine_constraint ? 1 : 0);
  double t = 1.0;
  constexpr double kBarrierGrowth = 20.0;
  Eigen::VectorXd x = start;
  int total_newton = 0;
  while (true) {
    BarrierProblem bp(p, t);
    total_newton += newton_center(bp, x);
    if (m / t <= tol) break;
    t *= kBarrierGrowth;
  }

  LseFunction f0(p.objective);
  return {x, f0.value(x), total_newton, m / t};
}

void probe_monotone_inputs(const MonotoneProblem& p, int points_per_axis) {
  const int dim = static_cast<int>(p.box.size());
  if (points_per_axis < 2) throw DomainError("probe_monotone_inputs: need >= 2 points");

  std::vector<int> idx(dim, 0);
  auto point_at = [&](const std::vector<int>& ix) {
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a)
      x(a) = p.box(a) * ix[a] / (points_per_axis - 1);
    return x;
  };

  auto check_fn = [&](const std::function<double(const Eigen::VectorXd&)>& f,
                      const char* name) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      const Eigen::VectorXd x = point_at(idx);
      const double base = f(x);
      for (int a = 0; a < dim; ++a) {
        if (idx[a] + 1 >= points_per_axis) continue;
        auto up = idx;
        ++up[a];
        const double next = f(point_at(up));
        if (next < base - 1.0e-10 * (1.0 + std::abs(base))) {
          std::ostringstream msg;
          msg << "probe_monotone_inputs: " << name << " decreases along axis "
              << a << " near " << dump_iterate(x);
          throw DomainError(msg.str());
        }
      }
      int a = 0;
      for (; a < dim; ++a) {
        if (++idx[a] < points_per_axis) break;
        idx[a] = 0;
      }
      if (a == dim) break;
    }
  };
  check_fn(p.objective, "objective");
  check_fn(p.constraint, "constraint");
}

namespace {
struct Vertex {
  Eigen::VectorXd x;
  double value;
};
}  // namespace

PolyblockResult polyblock_maximize(const MonotoneProblem& p) {
  const int dim = static_cast<int>(p.box.size());
  if (dim < 1) throw DomainError("polyblock_maximize: empty box");
  for (int a = 0; a < dim; ++a)
    if (!(p.box(a) >= 0.0)) throw DomainError("polyblock_maximize: negative box bound");

  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(dim);
  if (p.constraint(origin) > p.limit)
    throw DomainError("polyblock_maximize: constraint infeasible at the origin");

  const double diag = p.box.norm();
  const double ray_tol = std::max(p.bisect_tol * diag,
                                  std::numeric_limits<double>::min());
  const double slack = 1.0e-12;  // dominance and split slack

  std::vector<Vertex> verts;
  verts.push_back({p.box, p.objective(p.box)});

  Eigen::VectorXd best_x = origin;
  double best_value = p.objective(origin);
  int iterations = 0;

  while (true) {
    ++iterations;
    // Current upper bound = best vertex.
    std::size_t pick = 0;
    double bound = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (verts[i].value > bound) {
        bound = verts[i].value;
        pick = i;
      }
    }
    if (verts.empty() || bound - best_value <= p.gap)
      return {best_x, best_value, verts.empty() ? best_value : bound, iterations};

    Vertex v = std::move(verts[pick]);
    verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(pick));

    if (p.constraint(v.x) <= p.limit) {
      // Best vertex is itself feasible: it maximizes the bound, done.
      return {v.x, v.value, v.value, iterations};
    }

    // Project onto the constraint boundary along the ray origin -> v.
    const double norm_v = v.x.norm();
    const double lam_tol = norm_v > 0.0 ? ray_tol / norm_v : 1.0;
    const double lam = bisect_last_below(
        [&](double l) { return p.constraint(l * v.x); }, 0.0, 1.0, p.limit,
        lam_tol);
    const Eigen::VectorXd proj = lam * v.x;
    const double proj_value = p.objective(proj);
    if (proj_value > best_value) {
      best_value = proj_value;
      best_x = proj;
    }

    // Split v at the projection; children below the incumbent-plus-gap
    // cutoff or dominated by a live vertex are dropped at birth.
    for (int a = 0; a < dim; ++a) {
      if (v.x(a) - proj(a) <= slack) continue;
      Vertex child{v.x, 0.0};
      child.x(a) = proj(a);
      child.value = p.objective(child.x);
      if (child.value <= best_value + 0.999 * p.gap) continue;
      bool dominated = false;
      for (const Vertex& w : verts) {
        if (((child.x.array() - w.x.array()) <= slack).all()) {
          dominated = true;
          break;
        }
      }
      if (!dominated) verts.push_back(std::move(child));
    }

    // Cull vertices that can no longer beat the incumbent.
    std::erase_if(verts, [&](const Vertex& w) {
      return w.value <= best_value + 0.999 * p.gap;
    });

    if (static_cast<int>(verts.size()) > p.vertex_budget) {
      double residual = -std::numeric_limits<double>::infinity();
      for (const Vertex& w : verts) residual = std::max(residual, w.value);
      throw PolyblockBudgetError(
          "polyblock_maximize: vertex budget exceeded",
          {best_x.data(), best_x.data() + best_x.size()}, best_value,
          residual - best_value);
    }
  }
}

}  // namespace relaymec

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace relaymec {

/// Scalar minimization of a unimodal objective on [lo, hi].
struct ScalarProblem {
  std::function<double(double)> objective;
  double lo = 0.0;
  double hi = 0.0;
  double tol = 1.0e-8;  // relative to the initial interval width
};

struct ScalarMinimum {
  double x;
  double value;
  int evaluations;
};

/// Golden-section search. Never evaluates outside [lo, hi]; the returned x is
/// within tol*(hi-lo) of the true minimizer when the objective is unimodal.
ScalarMinimum golden_search(const ScalarProblem& p);

/// Largest x in [lo, hi] with f(x) <= limit, f nondecreasing and
/// f(lo) <= limit. Bracket is shrunk until hi-lo <= tol.
double bisect_last_below(const std::function<double(double)>& f, double lo,
                         double hi, double limit, double tol);

/// Stable ln(sum_k w_k exp(x_k)) over (weight, exponent) pairs, weights > 0.
double log_sum_exp(std::span<const std::pair<double, double>> terms);

/// One posynomial-style term: weight * exp(<exponent, x>).
struct LseTerm {
  double weight;
  Eigen::VectorXd exponent;
};

/// f(x) = ln sum_k weight_k exp(<exponent_k, x>). Convex and smooth; value,
/// gradient and Hessian are exposed for the Newton steps and for tests.
class LseFunction {
 public:
  LseFunction() = default;
  explicit LseFunction(std::vector<LseTerm> terms);

  int dim() const { return static_cast<int>(exponents_.cols()); }
  double value(const Eigen::VectorXd& x) const;
  double value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;
  double value_grad_hess(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                         Eigen::MatrixXd& hess) const;

 private:
  Eigen::MatrixXd exponents_;  // K x n
  Eigen::VectorXd log_weights_;
};

/// Smooth convex program
///   min  ln sum a_k exp(<u_k, x>)
///   s.t. ln sum b_k exp(<v_k, x>) <= bound      (optional)
///        <w, x> + offset >= 0                   (optional)
///        x_j >= lower_bounds_j
struct LseProgram {
  std::vector<LseTerm> objective;

  struct Constraint {
    std::vector<LseTerm> terms;
    double bound;
  };
  std::optional<Constraint> lse_constraint;

  struct Affine {
    Eigen::VectorXd w;
    double offset;
  };
  std::optional<Affine> affine_constraint;

  Eigen::VectorXd lower_bounds;
};

struct LseSolution {
  Eigen::VectorXd x;
  double value;
  int newton_iterations;
  double kkt_residual;  // duality-gap bound m/t at the final center
};

/// Log-barrier interior scheme with damped Newton and backtracking line
/// search. `start` must be strictly feasible. Runs the barrier path until the
/// duality-gap bound drops below `tol`.
LseSolution solve_lse_program(const LseProgram& p, const Eigen::VectorXd& start,
                              double tol = 1.0e-9);

/// Maximize an increasing objective over the normal set
/// {x in [0, box] : constraint(x) <= limit}.
struct MonotoneProblem {
  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<double(const Eigen::VectorXd&)> constraint;
  double limit = 0.0;
  Eigen::VectorXd box;       // upper corner; lower corner is the origin
  double gap = 1.0e-5;       // absolute optimality gap
  double bisect_tol = 1.0e-10;  // relative to the box diagonal
  int vertex_budget = 200000;
};

/// Probes both functions for coordinatewise monotonicity on a coarse grid.
/// Throws DomainError on a detected decrease.
void probe_monotone_inputs(const MonotoneProblem& p, int points_per_axis = 5);

struct PolyblockResult {
  Eigen::VectorXd x;     // best feasible point
  double value;          // objective there
  double bound;          // final upper bound; bound - value <= gap
  int iterations;
};

/// Classic polyblock outer approximation: keep a vertex set whose union of
/// boxes covers the feasible region, project the best vertex onto the
/// constraint boundary along the ray from the origin, split, prune dominated
/// vertices, stop once the bound meets the incumbent within `gap`.
PolyblockResult polyblock_maximize(const MonotoneProblem& p);

}  // namespace relaymec

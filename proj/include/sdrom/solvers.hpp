#pragma once

// Per-time-step nonlinear solves: Newton for the FOM, Gauss-Newton for LSPG
// and collocated LSPG.

#include <span>
#include <string>
#include <vector>

#include "sdrom/errors.hpp"
#include "sdrom/fv_core.hpp"
#include "sdrom/rom_types.hpp"

namespace sdrom {

struct NonlinearSolveReport {
  int iterations = 0;
  double final_norm = 0.0;
  bool converged = false;
  /// Newton: residual norms (initial first). Gauss-Newton: step norms.
  std::vector<double> history;
  /// Gauss-Newton only: weighted residual norm before each step and at exit.
  std::vector<double> residual_history;
};

/// Solver failure that carries the iteration record.
class SolveFailure : public SolverError {
 public:
  SolveFailure(const std::string& what, NonlinearSolveReport report)
      : SolverError(what), report_(std::move(report)) {}
  const NonlinearSolveReport& report() const { return report_; }

 private:
  NonlinearSolveReport report_;
};

struct NewtonSettings {
  double tol_abs = 1e-12;
  double tol_rel = 1e-10;
  int max_iters = 20;
  JacobianMethod jacobian = JacobianMethod::analytic;
  /// Linear solves use sparse LU unless `iterative` is set, in which case
  /// Jacobi-preconditioned BiCGSTAB runs to `linear_tol` (relative residual)
  /// and sparse LU takes over if it stalls.
  bool iterative = false;
  double linear_tol = 1e-13;
  int linear_max_iters = 400;
};

struct GaussNewtonSettings {
  double tol = 1e-8;
  int max_iters = 20;
  JacobianMethod jacobian = JacobianMethod::analytic;
  /// keep every q iterate in the result
  bool keep_iterates = false;
};

struct NewtonResult {
  std::vector<double> state;
  NonlinearSolveReport report;
};

struct LspgResult {
  std::vector<double> qhat;
  NonlinearSolveReport report;
  /// q after each step, when requested
  std::vector<std::vector<double>> iterates;
};

NewtonResult newton_step_solve(const ResidualContext& ctx, std::span<const double> initial,
                               const NewtonSettings& settings = {});

LspgResult lspg_gauss_newton(const TrialBasis& basis, const ResidualContext& ctx, std::span<const double> qhat_init,
                             const GaussNewtonSettings& settings = {});

/// ctx.prev only needs valid values on the sampled cells.
LspgResult lspg_collocated(const TrialBasis& basis, const ResidualContext& ctx, const SampleMesh& mesh,
                           std::span<const double> qhat_init, const GaussNewtonSettings& settings = {});

/// Solve the M x M normal equations A x = b (Cholesky, eigen fallback).
std::vector<double> solve_normal_equations(std::span<const double> a, std::span<const double> b, int m);

}  // namespace sdrom

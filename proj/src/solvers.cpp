#include "sdrom/solvers.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "sdrom/kernels.hpp"

namespace sdrom {

namespace {

double norm2(std::span<const double> v) { return std::sqrt(kernels::squared_norm(v)); }

}  // namespace

NewtonResult newton_step_solve(const ResidualContext& ctx, std::span<const double> initial,
                               const NewtonSettings& settings) {
  NewtonResult out;
  out.state.assign(initial.begin(), initial.end());
  auto& rep = out.report;
  std::vector<double> r = time_residual(ctx, out.state);
  const double r0 = norm2(r);
  const double tol = settings.tol_abs + settings.tol_rel * r0;
  rep.history.push_back(r0);
  rep.final_norm = r0;
  if (r0 <= tol) {
    rep.converged = true;
    return out;
  }
  const int n_cells = ctx.sub->n_cells();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> krylov;
  krylov.setTolerance(settings.linear_tol);
  krylov.setMaxIterations(settings.linear_max_iters);
  for (int it = 0; it < settings.max_iters; ++it) {
    const auto jac = residual_jacobian(ctx, out.state, settings.jacobian).to_eigen(n_cells);
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::VectorXd dx;
    bool solved = false;
    if (settings.iterative) {
      krylov.compute(jac);
      dx = krylov.solve(rv);
      solved = krylov.info() == Eigen::Success && dx.allFinite();
    }
    if (!solved) {
      lu.compute(jac);
      if (lu.info() != Eigen::Success) {
        rep.iterations = it;
        throw SolveFailure("Newton: sparse LU factorization failed (" + lu.lastErrorMessage() + ")", rep);
      }
      dx = lu.solve(rv);
    }
    if (!dx.allFinite()) {
      rep.iterations = it;
      throw SolveFailure("Newton: linear solve produced non-finite update", rep);
    }
    for (std::size_t i = 0; i < out.state.size(); ++i) out.state[i] -= dx[static_cast<Eigen::Index>(i)];
    r = time_residual(ctx, out.state);
    const double rn = norm2(r);
    rep.history.push_back(rn);
    rep.iterations = it + 1;
    rep.final_norm = rn;
    if (rn <= tol) {
      rep.converged = true;
      return out;
    }
  }
  std::ostringstream os;
  os << "Newton did not converge in " << settings.max_iters << " iterations (residual " << rep.final_norm
     << ", tolerance " << tol << ")";
  throw SolveFailure(os.str(), rep);
}

std::vector<double> solve_normal_equations(std::span<const double> a, std::span<const double> b, int m) {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> am(a.data(), m, m);
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), m);
  Eigen::LLT<Eigen::MatrixXd> llt(am);
  Eigen::VectorXd x;
  if (llt.info() == Eigen::Success) {
    x = llt.solve(bv);
  }
  if (llt.info() != Eigen::Success || !x.allFinite()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(am);
    const auto& ev = es.eigenvalues();
    const double lmax = ev.cwiseAbs().maxCoeff();
    const double lmin = ev.minCoeff();
    if (!(lmin > std::numeric_limits<double>::epsilon() * m * lmax)) {
      std::ostringstream os;
      os << "singular normal matrix (condition estimate " << (lmin > 0.0 ? lmax / lmin : INFINITY) << ")";
      throw SolverError(os.str());
    }
    const Eigen::MatrixXd& v = es.eigenvectors();
    x = v * ((v.transpose() * bv).array() / ev.array()).matrix();
  }
  return {x.data(), x.data() + m};
}

namespace {

// Gauss-Newton on the rows of `cells`; reconstruction touches only `stencil`
// (empty = everything).
LspgResult gauss_newton(const TrialBasis& basis, const ResidualContext& ctx, std::span<const int> cells,
                        std::span<const int> stencil, std::span<const char> available,
                        std::span<const double> qhat_init, const GaussNewtonSettings& settings) {
  const int m = basis.n_modes;
  const int nv = ctx.nv();
  if (m < 1) throw ConfigError("LSPG needs a non-empty trial basis (M >= 1)");
  if (basis.n_rows != ctx.n_dofs()) {
    throw ConfigError("trial basis has " + std::to_string(basis.n_rows) + " rows, subdomain has " +
                      std::to_string(ctx.n_dofs()) + " DOFs");
  }
  if (qhat_init.size() != static_cast<std::size_t>(m)) throw ConfigError("initial coordinates do not match M");
  const auto n_rows = static_cast<std::size_t>(cells.size()) * static_cast<std::size_t>(nv);
  if (n_rows < static_cast<std::size_t>(m)) {
    throw SolverError("collocated LSPG is rank deficient: " + std::to_string(n_rows) + " sampled rows for M = " +
                      std::to_string(m) + " modes; increase N_s");
  }

  LspgResult out;
  out.qhat.assign(qhat_init.begin(), qhat_init.end());
  auto& rep = out.report;
  std::vector<double> x(static_cast<std::size_t>(basis.n_rows), 0.0);
  auto refresh = [&] {
    if (stencil.empty()) {
      x = basis.reconstruct(out.qhat);
    } else {
      basis.reconstruct_cells(out.qhat, stencil, nv, x);
    }
  };
  refresh();

  const auto mm = static_cast<std::size_t>(m);
  std::vector<double> jphi(n_rows * mm);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (int it = 0; it < settings.max_iters; ++it) {
    const auto asmb = sampled_residual_and_jacobian(ctx, x, cells, settings.jacobian, available);
    const auto& jac = asmb.jacobian;
    std::fill(jphi.begin(), jphi.end(), 0.0);
    for (int r = 0; r < jac.n_row_cells(); ++r) {
      for (int b = 0; b < SparseJacobian::slots; ++b) {
        const int c = jac.col_cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)];
        if (c < 0) continue;
        const double* blk = jac.block(r, b);
        for (int i = 0; i < nv; ++i) {
          std::span<double> dst(jphi.data() + static_cast<std::size_t>(r * nv + i) * mm, mm);
          for (int j = 0; j < nv; ++j) {
            const double v = blk[i * nv + j];
            if (v != 0.0) kernels::axpy(v, {basis.row(c * nv + j), mm}, dst);
          }
        }
      }
    }
    const Eigen::Map<const RowMat> jm(jphi.data(), static_cast<Eigen::Index>(n_rows), m);
    const Eigen::Map<const Eigen::VectorXd> rv(asmb.residual.data(), static_cast<Eigen::Index>(n_rows));
    rep.residual_history.push_back(rv.norm());
    const RowMat a = jm.transpose() * jm;
    const Eigen::VectorXd g = -(jm.transpose() * rv);
    std::vector<double> dq;
    try {
      dq = solve_normal_equations({a.data(), static_cast<std::size_t>(a.size())}, {g.data(), mm}, m);
    } catch (const SolverError& e) {
      rep.iterations = it;
      throw SolveFailure(std::string("Gauss-Newton: ") + e.what(), rep);
    }
    for (std::size_t k = 0; k < mm; ++k) out.qhat[k] += dq[k];
    if (settings.keep_iterates) out.iterates.push_back(out.qhat);
    const double step = norm2(dq);
    rep.history.push_back(step);
    rep.iterations = it + 1;
    rep.final_norm = step;
    if (!std::isfinite(step)) throw SolveFailure("Gauss-Newton: non-finite update", rep);
    refresh();
    if (step <= settings.tol) {
      rep.converged = true;
      return out;
    }
  }
  std::ostringstream os;
  os << "Gauss-Newton did not converge in " << settings.max_iters << " iterations (last step " << rep.final_norm
     << ")";
  throw SolveFailure(os.str(), rep);
}

}  // namespace

LspgResult lspg_gauss_newton(const TrialBasis& basis, const ResidualContext& ctx, std::span<const double> qhat_init,
                             const GaussNewtonSettings& settings) {
  std::vector<int> all(static_cast<std::size_t>(ctx.sub->n_cells()));
  std::iota(all.begin(), all.end(), 0);
  return gauss_newton(basis, ctx, all, {}, {}, qhat_init, settings);
}

LspgResult lspg_collocated(const TrialBasis& basis, const ResidualContext& ctx, const SampleMesh& mesh,
                           std::span<const double> qhat_init, const GaussNewtonSettings& settings) {
  const auto stencil = mesh.stencil_cells();
  std::vector<char> available(static_cast<std::size_t>(ctx.sub->n_cells()), 0);
  for (int c : stencil) available[static_cast<std::size_t>(c)] = 1;
  return gauss_newton(basis, ctx, mesh.sample_cells, stencil, available, qhat_init, settings);
}

}  // namespace sdrom

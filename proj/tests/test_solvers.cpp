#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "sdrom/errors.hpp"
#include "sdrom/rom.hpp"
#include "sdrom/solvers.hpp"

using namespace sdrom;
using test_support::Problem;

namespace {

Eigen::MatrixXd dense(const std::vector<std::vector<double>>& cols) {
  const auto n = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd j(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) j(r, c) = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  }
  return j;
}

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> stdvec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Random orthonormal basis (row-major phi), zero center unless given.
TrialBasis random_basis(int n, int m, std::mt19937_64& rng, std::span<const double> center = {}) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(n, m);
  TrialBasis b;
  b.n_rows = n;
  b.n_modes = m;
  b.center.assign(static_cast<std::size_t>(n), 0.0);
  if (!center.empty()) b.center.assign(center.begin(), center.end());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) b.phi.push_back(q(i, j));
  }
  return b;
}

// Dense Gauss-Newton with a central-difference Jacobian, restricted to rows.
Eigen::VectorXd dense_gn(const ResidualContext& ctx, const TrialBasis& b, Eigen::VectorXd q,
                         const std::vector<int>& rows) {
  Eigen::MatrixXd phi(b.n_rows, b.n_modes);
  for (int i = 0; i < b.n_rows; ++i) {
    for (int j = 0; j < b.n_modes; ++j) phi(i, j) = b.row(i)[j];
  }
  const Eigen::VectorXd c = vec(b.center);
  for (int it = 0; it < 30; ++it) {
    const auto x = stdvec(c + phi * q);
    const auto r = vec(time_residual(ctx, x));
    const auto jfull = dense(test_support::central_fd_jacobian(ctx, x));
    Eigen::MatrixXd js(static_cast<Eigen::Index>(rows.size()), b.n_modes);
    Eigen::VectorXd rs(static_cast<Eigen::Index>(rows.size()));
    const Eigen::MatrixXd jp = jfull * phi;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      js.row(static_cast<Eigen::Index>(k)) = jp.row(rows[k]);
      rs(static_cast<Eigen::Index>(k)) = r(rows[k]);
    }
    const Eigen::VectorXd dq = js.colPivHouseholderQr().solve(-rs);
    q += dq;
    if (dq.norm() < 1e-12) break;
  }
  return q;
}

std::vector<int> all_rows(int n) {
  std::vector<int> r(static_cast<std::size_t>(n));
  std::iota(r.begin(), r.end(), 0);
  return r;
}

}  // namespace

TEST_CASE("Newton step matches a dense Newton oracle") {
  for (System sys : {System::swe, System::burgers, System::euler}) {
    CAPTURE(system_name(sys));
    ParamSet p;
    p.mu = -1.0;
    p.diffusion = 5e-3;
    Problem pb(sys, 5, 4, sys == System::euler ? 0.005 : 0.05, p);
    std::mt19937_64 rng(7);
    pb.set_prev(test_support::random_state(sys, 20, rng));

    const auto res = newton_step_solve(pb.ctx, pb.prev);
    CHECK(res.report.converged);

    Eigen::VectorXd x = vec(pb.prev);
    for (int it = 0; it < 20; ++it) {
      const auto r = vec(time_residual(pb.ctx, stdvec(x)));
      if (r.norm() < 1e-13) break;
      x -= dense(test_support::central_fd_jacobian(pb.ctx, stdvec(x))).partialPivLu().solve(r);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < res.state.size(); ++i) diff = std::max(diff, std::abs(res.state[i] - x(static_cast<Eigen::Index>(i))));
    CHECK(diff <= 1e-9);
  }
}

TEST_CASE("Newton converges quadratically and reports its history") {
  Problem pb(System::swe, 8, 8, 0.05, ParamSet{-2.0, 0, 0});
  const auto res = newton_step_solve(pb.ctx, pb.prev);
  const auto& h = res.report.history;
  REQUIRE(h.size() >= 3);
  CHECK(h.size() == static_cast<std::size_t>(res.report.iterations) + 1);
  CHECK(h.back() <= 1e-12 + 1e-10 * h.front());
  // quadratic tail: r_{k+1} <= C r_k^2 with a modest C
  const std::size_t n = h.size();
  CHECK(h[n - 2] > 0.0);
  CHECK(h[n - 1] <= std::max(1e3 * h[n - 2] * h[n - 2], 1e-13));
}

TEST_CASE("Newton reports non-convergence") {
  Problem pb(System::swe, 6, 6, 0.05, ParamSet{-2.0, 0, 0});
  NewtonSettings s;
  s.max_iters = 1;
  s.tol_abs = 0.0;
  s.tol_rel = 1e-300;
  try {
    newton_step_solve(pb.ctx, pb.prev, s);
    FAIL("expected a solver failure");
  } catch (const SolveFailure& e) {
    CHECK(e.report().iterations == 1);
    CHECK(e.report().history.size() == 2);
    CHECK_FALSE(e.report().converged);
  }
}

TEST_CASE("colored FD Newton agrees with the analytic Jacobian path") {
  Problem pb(System::euler, 6, 6, 0.005, ParamSet{});
  NewtonSettings fd;
  fd.jacobian = JacobianMethod::colored_fd;
  const auto a = newton_step_solve(pb.ctx, pb.prev);
  const auto b = newton_step_solve(pb.ctx, pb.prev, fd);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.state.size(); ++i) diff = std::max(diff, std::abs(a.state[i] - b.state[i]));
  CHECK(diff <= 1e-10);
}

TEST_CASE("iterative linear solves agree with sparse LU") {
  for (System sys : {System::swe, System::burgers, System::euler}) {
    CAPTURE(system_name(sys));
    Problem pb(sys, 7, 6, default_settings(sys).dt, sys == System::euler ? ParamSet{} : ParamSet{-1.0, 2e-3, 0});
    NewtonSettings it;
    it.iterative = true;
    const auto a = newton_step_solve(pb.ctx, pb.prev);
    const auto b = newton_step_solve(pb.ctx, pb.prev, it);
    CHECK(b.report.converged);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.state.size(); ++i) diff = std::max(diff, std::abs(a.state[i] - b.state[i]));
    CHECK(diff <= 1e-10);
  }
}

TEST_CASE("identity-basis LSPG reproduces the Newton step") {
  Problem pb(System::swe, 6, 6, 0.05, ParamSet{-1.0, 0, 0});
  const auto id = TrialBasis::identity(pb.ctx.n_dofs());
  const auto fom = newton_step_solve(pb.ctx, pb.prev);
  const auto rom = lspg_gauss_newton(id, pb.ctx, pb.prev);
  double diff = 0.0;
  for (std::size_t i = 0; i < fom.state.size(); ++i) diff = std::max(diff, std::abs(fom.state[i] - rom.qhat[i]));
  CHECK(diff <= 1e-10);
}

TEST_CASE("LSPG matches a dense Gauss-Newton oracle") {
  Problem pb(System::burgers, 5, 5, 0.05, ParamSet{0, 2e-3, 0});
  std::mt19937_64 rng(21);
  const auto basis = random_basis(pb.ctx.n_dofs(), 6, rng, pb.prev);
  const auto q0 = basis.project(pb.prev);
  const auto got = lspg_gauss_newton(basis, pb.ctx, q0);
  CHECK(got.report.converged);
  const auto want = dense_gn(pb.ctx, basis, vec(q0), all_rows(pb.ctx.n_dofs()));
  for (int k = 0; k < 6; ++k) CHECK(std::abs(got.qhat[static_cast<std::size_t>(k)] - want(k)) <= 1e-8);
}

TEST_CASE("collocated LSPG minimizes the sampled residual rows") {
  Problem pb(System::swe, 6, 6, 0.05, ParamSet{-1.0, 0, 0});
  std::mt19937_64 rng(5);
  const auto basis = random_basis(pb.ctx.n_dofs(), 4, rng, pb.prev);
  SampleMeshOptions o;
  o.n_s = 9;
  o.seed = 3;
  const auto mesh = build_sample_mesh(pb.sub, o);
  const auto q0 = basis.project(pb.prev);
  const auto got = lspg_collocated(basis, pb.ctx, mesh, q0);
  std::vector<int> rows;
  for (int c : mesh.sample_cells) {
    for (int v = 0; v < 3; ++v) rows.push_back(c * 3 + v);
  }
  const auto want = dense_gn(pb.ctx, basis, vec(q0), rows);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(got.qhat[static_cast<std::size_t>(k)] - want(k)) <= 1e-8);
}

TEST_CASE("full-sample collocation is plain LSPG") {
  Problem pb(System::euler, 8, 8, 0.005, ParamSet{});
  std::mt19937_64 rng(8);
  const auto basis = random_basis(pb.ctx.n_dofs(), 10, rng, pb.prev);
  SampleMeshOptions o;
  o.n_s = 64;
  const auto mesh = build_sample_mesh(pb.sub, o);
  CHECK(mesh.closure_cells.empty());
  const auto q0 = basis.project(pb.prev);
  const auto a = lspg_gauss_newton(basis, pb.ctx, q0);
  const auto b = lspg_collocated(basis, pb.ctx, mesh, q0);
  REQUIRE(a.report.history.size() == b.report.history.size());
  CHECK(a.iterates.empty());

  GaussNewtonSettings keep;
  keep.keep_iterates = true;
  const auto ai = lspg_gauss_newton(basis, pb.ctx, q0, keep);
  const auto bi = lspg_collocated(basis, pb.ctx, mesh, q0, keep);
  REQUIRE_FALSE(ai.iterates.empty());
  REQUIRE(ai.iterates.size() == bi.iterates.size());
  CHECK(ai.iterates.back() == ai.qhat);
  for (std::size_t k = 0; k < ai.iterates.size(); ++k) {
    for (std::size_t i = 0; i < ai.qhat.size(); ++i) CHECK(std::abs(ai.iterates[k][i] - bi.iterates[k][i]) <= 1e-13);
  }
  for (std::size_t k = 0; k < a.report.history.size(); ++k) {
    CHECK(std::abs(a.report.history[k] - b.report.history[k]) <= 1e-13);
  }
  for (std::size_t k = 0; k < a.qhat.size(); ++k) CHECK(std::abs(a.qhat[k] - b.qhat[k]) <= 1e-13);
}

TEST_CASE("too few sampled rows is reported as rank deficiency") {
  Problem pb(System::swe, 6, 6, 0.05, ParamSet{-1.0, 0, 0});
  std::mt19937_64 rng(1);
  const auto basis = random_basis(pb.ctx.n_dofs(), 5, rng);
  SampleMeshOptions o;
  o.n_s = 1;
  const auto mesh = build_sample_mesh(pb.sub, o);
  const std::vector<double> q0(5, 0.0);
  try {
    lspg_collocated(basis, pb.ctx, mesh, q0);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("increase N_s") != std::string::npos);
  }
}

TEST_CASE("normal equations") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXd j(12, 5);
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 5; ++c) j(r, c) = g(rng);
  }
  const Eigen::Matrix<double, 5, 5, Eigen::RowMajor> a = j.transpose() * j;
  Eigen::VectorXd b(5);
  for (int k = 0; k < 5; ++k) b(k) = g(rng);
  const auto x = solve_normal_equations({a.data(), 25}, {b.data(), 5}, 5);
  const Eigen::VectorXd want = Eigen::MatrixXd(a).fullPivLu().solve(b);
  for (int k = 0; k < 5; ++k) CHECK(x[static_cast<std::size_t>(k)] == doctest::Approx(want(k)).epsilon(1e-10));

  const std::vector<double> rhs{4.0, 3.0};
  const std::vector<double> sing{1.0, 1.0, 1.0, 1.0};
  try {
    solve_normal_equations(sing, rhs, 2);
    FAIL("expected a singular matrix error");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("condition estimate") != std::string::npos);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rad/pcp.hpp"
#include "support.hpp"

using rad::Index;
using rad::Matrix;
using rad::PcpConfig;
using rad::PcpResult;
using rad::Vector;

namespace {

using Planted = radtest::PlantedPcp;

Planted planted_instance(unsigned seed) {
  return radtest::planted_pcp_instance(seed);
}

double nuclear_norm(const Matrix& m) {
  return rad::thin_svd(m).singular_values.sum();
}

}  // namespace

TEST_CASE("default_lambda is 1/sqrt(max dimension)") {
  CHECK(rad::default_lambda(449919, 51) ==
        doctest::Approx(0.0014908461671933777).epsilon(1e-12));
  CHECK(rad::default_lambda(4, 4) == 0.5);
  CHECK(rad::default_lambda(100, 10000) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK_THROWS_AS(rad::default_lambda(0, 5), rad::ValidationError);
}

TEST_CASE("pcp on the zero matrix converges immediately to zero parts") {
  const PcpResult result = rad::pcp_decompose(Matrix::Zero(8, 5));
  CHECK(result.converged);
  CHECK(result.iterations == 1);
  CHECK(result.low_rank.norm() == 0.0);
  CHECK(result.sparse.norm() == 0.0);
}

TEST_CASE("pcp on an exact low-rank matrix leaves nothing in the sparse part") {
  // non-spiky factors keep every |U V^T| entry below lambda, so (M, 0)
  // is the PCP optimum
  const Matrix u = radtest::bounded_matrix(20, 1, 7);
  const Matrix v = radtest::bounded_matrix(10, 1, 8);
  const Matrix m = u * v.transpose();

  const PcpResult result = rad::pcp_decompose(m);
  CHECK(result.converged);
  CHECK(result.sparse.norm() <= 1e-6 * m.norm());
  CHECK((result.low_rank - m).norm() <= 1e-6 * m.norm());
}

TEST_CASE("pcp recovers a planted rank-2 plus sparse decomposition") {
  const Planted planted = planted_instance(42);
  PcpConfig config;
  config.lambda = 1.0 / std::sqrt(200.0);
  const PcpResult result = rad::pcp_decompose(planted.m, config);

  REQUIRE(result.converged);
  const double rel_err =
      (result.low_rank - planted.low_rank).norm() / planted.low_rank.norm();
  CHECK(rel_err <= 1e-4);

  SUBCASE("feasibility at convergence") {
    const double residual =
        (planted.m - result.low_rank - result.sparse).norm();
    CHECK(residual <= config.tol * planted.m.norm());
    CHECK(result.residual_history.back() ==
          doctest::Approx(residual).epsilon(1e-9));
  }

  SUBCASE("penalty schedule is monotone and capped") {
    REQUIRE(!result.mu_history.empty());
    const double mu_max = 1e7 * result.mu_history.front();
    for (std::size_t i = 0; i + 1 < result.mu_history.size(); ++i) {
      CHECK(result.mu_history[i + 1] >= result.mu_history[i]);
    }
    for (const double mu : result.mu_history) {
      CHECK(mu <= mu_max * (1.0 + 1e-12));
    }
  }

  SUBCASE("recovered objective is no worse than the planted pair") {
    const double recovered = nuclear_norm(result.low_rank) +
                             config.lambda * result.sparse.cwiseAbs().sum();
    const double reference = nuclear_norm(planted.low_rank) +
                             config.lambda * planted.sparse.cwiseAbs().sum();
    CHECK(recovered <= reference * (1.0 + 1e-3));
  }

  SUBCASE("planted support carries the large sparse entries") {
    std::vector<bool> on_support(static_cast<std::size_t>(planted.m.size()), false);
    for (const Index cell : planted.support) {
      on_support[static_cast<std::size_t>(cell)] = true;
    }
    std::vector<double> off_magnitudes;
    for (Index i = 0; i < planted.m.rows(); ++i) {
      for (Index j = 0; j < planted.m.cols(); ++j) {
        const Index cell = i * planted.m.cols() + j;
        if (!on_support[static_cast<std::size_t>(cell)]) {
          off_magnitudes.push_back(std::abs(result.sparse(i, j)));
        }
      }
    }
    std::sort(off_magnitudes.begin(), off_magnitudes.end());
    const double off_median = off_magnitudes[off_magnitudes.size() / 2];
    const double bar = 10.0 * std::max(off_median, 1e-300);

    std::size_t above = 0;
    for (const Index cell : planted.support) {
      const Index i = cell / planted.m.cols();
      const Index j = cell % planted.m.cols();
      if (std::abs(result.sparse(i, j)) > bar) ++above;
    }
    CHECK(static_cast<double>(above) >=
          0.99 * static_cast<double>(planted.support.size()));
  }
}

TEST_CASE("pcp residual history is deterministic") {
  const Planted planted = planted_instance(9);
  const PcpResult a = rad::pcp_decompose(planted.m);
  const PcpResult b = rad::pcp_decompose(planted.m);
  REQUIRE(a.residual_history.size() == b.residual_history.size());
  for (std::size_t i = 0; i < a.residual_history.size(); ++i) {
    CHECK(a.residual_history[i] == b.residual_history[i]);
  }
}

TEST_CASE("pcp residual history has one entry per iteration") {
  const Planted planted = planted_instance(3);
  const PcpResult result = rad::pcp_decompose(planted.m);
  CHECK(result.residual_history.size() ==
        static_cast<std::size_t>(result.iterations));
  CHECK(result.mu_history.size() ==
        static_cast<std::size_t>(result.iterations));
}

TEST_CASE("pcp reports non-convergence when the budget is too small") {
  const Planted planted = planted_instance(5);
  PcpConfig config;
  config.max_iter = 3;
  const PcpResult result = rad::pcp_decompose(planted.m, config);
  CHECK(!result.converged);
  CHECK(result.iterations == 3);
}

TEST_CASE("pcp validates its configuration") {
  const Matrix m = Matrix::Identity(4, 4);
  PcpConfig bad_tol;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(rad::pcp_decompose(m, bad_tol), rad::ValidationError);

  PcpConfig bad_rho;
  bad_rho.rho = 0.5;
  CHECK_THROWS_AS(rad::pcp_decompose(m, bad_rho), rad::ValidationError);

  PcpConfig bad_mu;
  bad_mu.mu0 = 2.0;
  bad_mu.mu_max = 1.0;
  CHECK_THROWS_AS(rad::pcp_decompose(m, bad_mu), rad::ValidationError);

  PcpConfig bad_iter;
  bad_iter.max_iter = 0;
  CHECK_THROWS_AS(rad::pcp_decompose(m, bad_iter), rad::ValidationError);
}

TEST_CASE("pcp rejects non-finite input") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(rad::pcp_decompose(m), rad::InternalError);
}

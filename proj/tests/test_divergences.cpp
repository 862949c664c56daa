#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chainfactor/divergences.hpp"
#include "chainfactor/gibbs.hpp"
#include "chainfactor/interaction.hpp"
#include "oracle_helpers.hpp"

using namespace chainfactor;

namespace {

Matrix diag_state(const std::vector<double>& p) {
  Matrix m = Matrix::Zero(p.size(), p.size());
  for (size_t i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return m;
}

Vector ghz() {
  Vector v = Vector::Zero(8);
  v(0) = 1.0 / std::sqrt(2.0);
  v(7) = 1.0 / std::sqrt(2.0);
  return v;
}

Vector bell() {
  Vector v = Vector::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("commuting pairs reduce to classical divergences") {
  for (std::uint64_t seed : {100u, 101u, 102u}) {
    const std::vector<double> p = oracle::random_probabilities(seed, 5);
    const std::vector<double> q = oracle::random_probabilities(seed + 50, 5);
    const Matrix rho = diag_state(p), sigma = diag_state(q);
    const double ref = oracle::kl(p, q);
    CHECK(umegaki(rho, sigma).value == doctest::Approx(ref).epsilon(1e-10));
    CHECK(bs_entropy(rho, sigma).value == doctest::Approx(ref).epsilon(1e-10));
    CHECK(std::abs(bs_entropy(rho, sigma).value - umegaki(rho, sigma).value) <= 1e-10);
    double lam = 0.0;
    for (size_t i = 0; i < p.size(); ++i) lam = std::max(lam, p[i] / q[i]);
    CHECK(d_max(rho, sigma).value == doctest::Approx(std::log(lam)).epsilon(1e-10));
  }
}

TEST_CASE("divergence ordering and strictness off the commuting case") {
  int strict = 0;
  for (int d : {2, 3, 4}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Matrix rho = oracle::random_state(2000 + seed * 2, d);
      const Matrix sigma = oracle::random_state(2001 + seed * 2, d);
      const double u = umegaki(rho, sigma).value;
      const double b = bs_entropy(rho, sigma).value;
      const double m = d_max(rho, sigma).value;
      CHECK(u >= -1e-9);
      CHECK(b >= u - 1e-9);
      CHECK(m >= b - 1e-9);
      if (b > u + 1e-10) ++strict;
    }
  }
  CHECK(strict > 50);  // generic pairs do not commute
}

TEST_CASE("divergence from the maximally mixed state is log d minus entropy") {
  const int d = 4;
  const Matrix rho = oracle::random_state(77, d);
  const Matrix pi = Matrix::Identity(d, d) / d;
  const double expect = std::log(d) - von_neumann(rho);
  CHECK(umegaki(rho, pi).value == doctest::Approx(expect).epsilon(1e-10));
  CHECK(bs_entropy(rho, pi).value == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("kernel side conditions produce flagged infinities") {
  const Matrix full = oracle::random_state(301, 4);
  const Matrix low = oracle::random_rank_deficient_state(302, 4, 2);
  DivergenceValue v = umegaki(full, low);
  CHECK(!v.finite);
  CHECK(v.kernel_violation);
  CHECK(v.clipped() == doctest::Approx(1e6));
  CHECK(!bs_entropy(full, low).finite);
  CHECK(!d_max(full, low).finite);
  // the reverse order is fine: supp(low) is inside supp(full)
  CHECK(umegaki(low, full).finite);
  CHECK(bs_entropy(low, full).finite);
  CHECK(d_max(low, full).finite);
  // a state relative to itself
  CHECK(bs_entropy(low, low).value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("entropy closed forms") {
  CHECK(von_neumann(oracle::random_statevector(9, 6) *
                    oracle::random_statevector(9, 6).adjoint()) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(von_neumann(Matrix::Identity(4, 4) / 4.0) == doctest::Approx(std::log(4.0)));
  const Matrix a = oracle::random_state(401, 2);
  const Matrix b = oracle::random_state(402, 3);
  CHECK(von_neumann(kron(a, b)) ==
        doctest::Approx(von_neumann(a) + von_neumann(b)).epsilon(1e-10));
}

TEST_CASE("branching three-qubit state carries one bit through the middle") {
  SiteSpace s = SiteSpace::qubits(3);
  DensityMatrix rho = DensityMatrix::pure(s, ghz());
  ChainPartition p = ChainPartition::tripartite(s, 1, 1, 1);
  CHECK(cmi(rho, p).value == doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("maximally entangled pair saturates mutual information at log 4") {
  SiteSpace s = SiteSpace::qubits(2);
  DensityMatrix rho = DensityMatrix::pure(s, bell());
  ChainPartition p = ChainPartition(s, {{"A", 0, 1}, {"B", 1, 1}});
  CHECK(max_mutual_info(rho, p, {"A"}, {"B"}).value ==
        doctest::Approx(std::log(4.0)).epsilon(1e-9));
  CHECK(bs_mutual_info(rho, p, {"A"}, {"B"}).value ==
        doctest::Approx(std::log(4.0)).epsilon(1e-9));
}

TEST_CASE("conditional entropy closed forms") {
  SiteSpace s = SiteSpace::qubits(2);
  ChainPartition p = ChainPartition(s, {{"A", 0, 1}, {"B", 1, 1}});
  DensityMatrix mixed = DensityMatrix::maximally_mixed(s);
  CHECK(bs_cond_entropy(mixed, p, {"A"}, {"B"}).value ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));

  Matrix pure_a = Matrix::Zero(2, 2);
  pure_a(0, 0) = 1.0;
  DensityMatrix prod_state(s, kron(pure_a, oracle::random_state(55, 2)));
  CHECK(bs_cond_entropy(prod_state, p, {"A"}, {"B"}).value ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("conditional measures vanish on products and stay nonnegative") {
  SiteSpace s = SiteSpace::qubits(3);
  ChainPartition p = ChainPartition::tripartite(s, 1, 1, 1);

  DensityMatrix prod(s, kron(oracle::random_state(501, 2), oracle::random_state(502, 4)));
  CHECK(std::abs(bs_cmi_os(prod, p).value) <= 1e-9);
  CHECK(std::abs(bs_cmi_ts(prod, p).value) <= 1e-9);
  CHECK(std::abs(bs_cmi_rev(prod, p).value) <= 1e-9);
  CHECK(std::abs(cmi(prod, p).value) <= 1e-9);

  for (std::uint64_t seed : {601u, 602u, 603u, 604u}) {
    Matrix m = oracle::random_state(seed, 8);
    DensityMatrix rho(s, m);
    CHECK(bs_cmi_os(rho, p).value >= -1e-9);
    CHECK(bs_cmi_ts(rho, p).value >= -1e-9);
    CHECK(bs_cmi_rev(rho, p).value >= -1e-9);
    CHECK(cmi(rho, p).value >= -1e-9);
  }
}

TEST_CASE("diagonal nearest-neighbour chains have no conditional correlation") {
  GibbsInstance g = gibbs_state(classical_ising(0.9, 0.25), 5, 0.8);
  ChainPartition p = ChainPartition::tripartite(g.space, 1, 2, 2);
  CHECK(std::abs(bs_cmi_os(g.state, p).value) <= 1e-8);
  CHECK(std::abs(bs_cmi_ts(g.state, p).value) <= 1e-8);
  CHECK(std::abs(bs_cmi_rev(g.state, p).value) <= 1e-8);
}

TEST_CASE("empty outer blocks collapse every conditional measure to zero") {
  SiteSpace s = SiteSpace::qubits(2);
  ChainPartition p = ChainPartition::tripartite(s, 1, 1, 0);
  DensityMatrix rho(s, oracle::random_state(71, 4));
  CHECK(std::abs(bs_cmi_os(rho, p).value) <= 1e-12);
  CHECK(std::abs(bs_cmi_ts(rho, p).value) <= 1e-12);
  CHECK(std::abs(bs_cmi_rev(rho, p).value) <= 1e-12);
  CHECK(std::abs(cmi(rho, p).value) <= 1e-12);

  // rightmost conditioned block: roles are names, not positions
  TripartiteSplit swapped;
  swapped.a = {"B"};
  swapped.b = {"A"};
  swapped.c = {};
  CHECK(std::abs(bs_cmi_rev(rho, p, swapped).value) <= 1e-12);
  CHECK(std::abs(bs_cmi_os(rho, p, swapped).value) <= 1e-12);
}

TEST_CASE("renyi-2 ratio against hand-computed marginal purities") {
  SiteSpace s = SiteSpace::qubits(3);
  ChainPartition p = ChainPartition::tripartite(s, 1, 1, 1);

  DensityMatrix prod(s, kron(oracle::random_state(811, 2), oracle::random_state(812, 4)));
  CHECK(purity_ratio(prod, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(renyi2_cmi(prod, p)) <= 1e-12);

  DensityMatrix rho(s, oracle::random_state(813, 8));
  auto pur = [](const Matrix& m) { return oracle::frobenius(m) * oracle::frobenius(m); };
  const std::vector<int> dims{2, 2, 2};
  const double expect =
      pur(oracle::partial_trace_loops(rho.matrix(), dims, {0, 1})) *
      pur(oracle::partial_trace_loops(rho.matrix(), dims, {1, 2})) /
      (pur(rho.matrix()) * pur(oracle::partial_trace_loops(rho.matrix(), dims, {1})));
  CHECK(purity_ratio(rho, p) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(std::exp(-renyi2_cmi(rho, p)) == doctest::Approx(purity_ratio(rho, p)).epsilon(1e-12));
}

TEST_CASE("bulk windows of a uniform chain are nearly translation invariant") {
  GibbsInstance g = gibbs_state(tfim(1.0, 1.0), 8, 1.0);
  CHECK(translation_defect(g.state, 3, 2) < 0.1);
}

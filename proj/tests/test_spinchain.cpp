#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chainfactor/chain.hpp"
#include "chainfactor/decay_fit.hpp"
#include "chainfactor/density_matrix.hpp"
#include "chainfactor/factorization.hpp"
#include "chainfactor/gibbs.hpp"
#include "chainfactor/interaction.hpp"
#include "oracle_helpers.hpp"

using namespace chainfactor;

namespace {

const Matrix kI2 = Matrix::Identity(2, 2);
const Matrix kX = (Matrix(2, 2) << 0, 1, 1, 0).finished();
const Matrix kY = (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
const Matrix kZ = (Matrix(2, 2) << 1, 0, 0, -1).finished();

Matrix kron3(const Matrix& a, const Matrix& b, const Matrix& c) {
  return kron(kron(a, b), c);
}

}  // namespace

TEST_CASE("chain partition shapes and lookups") {
  SiteSpace s = SiteSpace::qubits(6);
  ChainPartition p = ChainPartition::tripartite(s, 2, 3, 1);
  CHECK(p.blocks().size() == 3);
  CHECK(p.block("A").first == 0);
  CHECK(p.block("B").first == 2);
  CHECK(p.block("C").first == 5);
  CHECK(p.sites({"A", "B"}) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(p.sites({"C"}) == std::vector<int>{5});

  ChainPartition u = ChainPartition::uniform_blocks(SiteSpace::qubits(10), 3);
  CHECK(u.blocks().size() == 3);
  CHECK(u.block("A3").size == 4);  // last block absorbs the remainder

  ChainPartition buf = ChainPartition::buffered(s, 1, 1, 2, 1, 1);
  CHECK(buf.block("A'").first == 0);
  CHECK(buf.block("C'").first == 5);
  CHECK(buf.block("B").size == 2);

  // blocks must tile the chain in order
  CHECK_THROWS_AS(ChainPartition::tripartite(s, 2, 2, 1), ArgumentError);
  CHECK_THROWS_AS(ChainPartition(s, {{"A", 0, 4}, {"B", 3, 3}}), ArgumentError);
  CHECK_THROWS_AS(p.block("Z"), ArgumentError);

  // empty blocks are allowed and carry no sites
  ChainPartition e = ChainPartition::tripartite(SiteSpace::qubits(2), 1, 1, 0);
  CHECK(e.block("C").size == 0);
  CHECK(e.sites({"C"}).empty());
}

TEST_CASE("restricting a partition renumbers sites from zero") {
  SiteSpace s = SiteSpace::qubits(7);
  ChainPartition p = ChainPartition::buffered(s, 1, 2, 1, 2, 1);
  ChainPartition q = restrict_partition(p, {"A", "B", "C"});
  CHECK(q.space().sites() == 5);
  CHECK(q.block("A").first == 0);
  CHECK(q.block("B").first == 2);
  CHECK(q.block("C").first == 3);
  // kept blocks must be consecutive in partition order
  CHECK_THROWS_AS(restrict_partition(p, {"A", "C"}), ArgumentError);
}

TEST_CASE("density matrix validation") {
  SiteSpace s = SiteSpace::qubits(1);
  CHECK_THROWS_AS(DensityMatrix(s, kX + Matrix::Identity(2, 2)), ContractViolation);  // trace 2
  Matrix nonherm = (Matrix(2, 2) << 0.5, 0.3, 0.0, 0.5).finished();
  CHECK_THROWS_AS(DensityMatrix(s, nonherm), ContractViolation);
  Matrix indefinite = (Matrix(2, 2) << 1.5, 0, 0, -0.5).finished();
  CHECK_THROWS_AS(DensityMatrix(s, indefinite), ContractViolation);

  DensityMatrix mixed = DensityMatrix::maximally_mixed(SiteSpace::qubits(2));
  CHECK(std::abs(mixed.matrix().trace().real() - 1.0) < 1e-14);
  CHECK(mixed.purity() == doctest::Approx(0.25));

  Vector psi = oracle::random_statevector(5, 4);
  DensityMatrix pure = DensityMatrix::pure(SiteSpace::qubits(2), psi);
  CHECK(pure.purity() == doctest::Approx(1.0));

  // reduce agrees with the loop oracle
  DensityMatrix red = reduce(pure, {1});
  Matrix expect = oracle::partial_trace_loops(pure.matrix(), {2, 2}, {1});
  CHECK((red.matrix() - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("transverse-field model matches a hand-built Hamiltonian") {
  const double coupling = 0.8, field = 0.6;
  Operator h = build_hamiltonian(tfim(coupling, field), 3);
  Matrix expect = -coupling * (kron3(kZ, kZ, kI2) + kron3(kI2, kZ, kZ)) -
                  field * (kron3(kX, kI2, kI2) + kron3(kI2, kX, kI2) + kron3(kI2, kI2, kX));
  CHECK((h.matrix() - expect).cwiseAbs().maxCoeff() < 1e-14);

  Interaction model = tfim(1.0, 0.5);
  CHECK(model.range() == 1);
  CHECK(model.strength() == doctest::Approx(2.5));  // 2*|J| + |g|
}

TEST_CASE("two-site coupling-only spectrum") {
  Operator h = build_hamiltonian(tfim(1.0, 0.0), 2);
  SpectralDecomposition s = herm_eig(h.matrix());
  CHECK(s.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(s.eigenvalues(1) == doctest::Approx(-1.0));
  CHECK(s.eigenvalues(2) == doctest::Approx(1.0));
  CHECK(s.eigenvalues(3) == doctest::Approx(1.0));
}

TEST_CASE("anisotropic model matches a hand-built Hamiltonian") {
  const double jxy = 0.4, jz = 0.9, field = 0.25;
  Operator h = build_hamiltonian(xxz(jxy, jz, field), 2);
  Matrix expect = jxy * (kron(kX, kX) + kron(kY, kY)) + jz * kron(kZ, kZ) -
                  field * (kron(kZ, kI2) + kron(kI2, kZ));
  CHECK((h.matrix() - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single-site thermal state in closed form") {
  // H = Z on one site at beta = 1
  GibbsInstance g = gibbs_state(classical_ising(0.0, -1.0), 1, 1.0);
  const double z = std::exp(1.0) + std::exp(-1.0);
  CHECK(std::abs(g.state.matrix()(0, 0).real() - std::exp(-1.0) / z) < 1e-14);
  CHECK(std::abs(g.state.matrix()(1, 1).real() - std::exp(1.0) / z) < 1e-14);
  CHECK(std::abs(g.state.matrix()(0, 1)) < 1e-15);
  CHECK(g.log_partition == doctest::Approx(std::log(z)));
  CHECK(exact_entropy(g) == doctest::Approx(oracle::binary_entropy(std::exp(-1.0) / z)));
}

TEST_CASE("zero Hamiltonian gives the maximally mixed state") {
  GibbsInstance g = gibbs_state(tfim(0.0, 0.0), 2, 1.7);
  CHECK((g.state.matrix() - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(exact_entropy(g) == doctest::Approx(std::log(4.0)));
  CHECK(exact_purity(g) == doctest::Approx(0.25));
  CHECK(g.log_partition == doctest::Approx(std::log(4.0)));
}

TEST_CASE("diagonal chain reproduces the classical Boltzmann distribution") {
  const int n = 5;
  const double coupling = 0.8, field = 0.3, beta = 0.7;
  GibbsInstance g = gibbs_state(classical_ising(coupling, field), n, beta);
  std::vector<double> probs = oracle::classical_ising_probs(n, coupling, field, beta);
  const Matrix& rho = g.state.matrix();
  for (long b = 0; b < 32; ++b) {
    CHECK(std::abs(rho(b, b).real() - probs[b]) < 1e-12);
  }
  CHECK(rho.cwiseAbs().sum() == doctest::Approx(rho.diagonal().cwiseAbs().sum()));

  // marginals match classical marginalization
  ChainPartition p = ChainPartition::tripartite(g.space, 1, 2, 2);
  DensityMatrix rb = marginal(g.state, p, {"B"});
  std::vector<double> mb = oracle::classical_marginal(probs, n, {1, 2});
  for (long b = 0; b < 4; ++b) CHECK(std::abs(rb.matrix()(b, b).real() - mb[b]) < 1e-12);
}

TEST_CASE("purity and entropy from the spectrum match the dense matrix") {
  GibbsInstance g = gibbs_state(tfim(1.0, 0.7), 4, 0.5);
  const double dense_purity = oracle::frobenius(g.state.matrix());
  CHECK(exact_purity(g) == doctest::Approx(dense_purity * dense_purity).epsilon(1e-10));
  CHECK(g.state.purity() == doctest::Approx(dense_purity * dense_purity).epsilon(1e-10));
}

TEST_CASE("marginal paths commute") {
  GibbsInstance g = gibbs_state(random_ti(21, 2, 2), 5, 0.6);
  ChainPartition p = ChainPartition::tripartite(g.space, 2, 2, 1);
  // direct window vs two successive reductions
  DensityMatrix ab = marginal(g.state, p, {"A", "B"});
  DensityMatrix b_direct = marginal(g.state, p, {"B"});
  DensityMatrix b_via_ab = reduce(ab, {2, 3});
  CHECK((b_direct.matrix() - b_via_ab.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  // against the loop oracle
  Matrix expect = oracle::partial_trace_loops(g.state.matrix(), {2, 2, 2, 2, 2}, {2, 3});
  CHECK((b_direct.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
  // non-contiguous unions are rejected
  CHECK_THROWS_AS(marginal(g.state, p, {"A", "C"}), ArgumentError);
}

TEST_CASE("seeded interactions are reproducible") {
  Interaction a = random_ti(7, 2, 2);
  Interaction b = random_ti(7, 2, 2);
  REQUIRE(a.terms().size() == 3);  // patterns {0}, {0,1}, {0,1,2}
  for (size_t t = 0; t < a.terms().size(); ++t) {
    CHECK((a.terms()[t].block - b.terms()[t].block).cwiseAbs().maxCoeff() == 0.0);  // bit-identical
    CHECK(operator_norm(a.terms()[t].block) == doctest::Approx(1.0).epsilon(1e-12));
  }
  Interaction c = random_ti(8, 2, 2);
  CHECK((a.terms()[1].block - c.terms()[1].block).cwiseAbs().maxCoeff() > 1e-3);

  Interaction q = random_ti(3, 1, 3);
  CHECK(q.local_dim() == 3);
  CHECK(q.terms()[1].block.rows() == 9);
  CHECK(build_hamiltonian(q, 3).matrix().rows() == 27);
}

TEST_CASE("geometrically decaying couplings have exact weights") {
  const double lambda = 0.9;
  Interaction e = exp_ising(lambda);
  for (const InteractionTerm& t : e.terms()) {
    const int k = t.offsets.back();
    CHECK(operator_norm(t.block) == doctest::Approx(std::exp(-lambda * k)).epsilon(1e-13));
  }
  // truncation bounds the longest distance kept
  const int kmax = e.terms().back().offsets.back();
  CHECK(std::exp(-lambda * kmax) >= 1e-14);
  CHECK(std::exp(-lambda * (kmax + 1)) < 1e-14);
  CHECK_THROWS_AS(exp_ising(0.0), ArgumentError);
  CHECK_THROWS_AS(exp_ising(-1.0), ArgumentError);

  // n = 4 assembly: distances 1..3 all present with the right signs
  Operator h = build_hamiltonian(exp_ising(1.0), 4);
  Matrix expect = Matrix::Zero(16, 16);
  auto zz = [&](int i, int j, double w) {
    std::vector<Matrix> f(4, kI2);
    f[i] = kZ;
    f[j] = kZ;
    expect -= w * kron(kron(f[0], f[1]), kron(f[2], f[3]));
  };
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) zz(i, j, std::exp(-(j - i)));
  CHECK((h.matrix() - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("chains above the dense cap are rejected") {
  CHECK_THROWS_AS(build_hamiltonian(tfim(1.0, 1.0), 13), ResourceError);
  CHECK_THROWS_AS(gibbs_state(random_ti(1, 1, 3), 8, 1.0), ResourceError);  // 3^8 > 4096
}

TEST_CASE("factorization defect vanishes on product states") {
  Matrix a = oracle::random_state(31, 2);
  Matrix b = oracle::random_state(32, 4);
  Matrix c = oracle::random_state(33, 2);
  SiteSpace s = SiteSpace::qubits(4);
  DensityMatrix rho(s, kron(kron(a, b), c));
  ChainPartition p = ChainPartition::tripartite(s, 1, 2, 1);
  CHECK(approx_factorization_norm(rho, p) < 1e-10);
}

TEST_CASE("diagonal nearest-neighbour chains factorize exactly") {
  // classical NN Gibbs states have zero conditional correlation beyond range 1
  GibbsInstance g = gibbs_state(classical_ising(0.9, 0.2), 6, 0.8);
  ChainPartition p = ChainPartition::tripartite(g.space, 2, 2, 2);
  CHECK(approx_factorization_norm(g.state, p) < 1e-8);
}

TEST_CASE("norm diagnostics on the maximally mixed state are all one") {
  GibbsInstance g = gibbs_state(tfim(0.0, 0.0), 3, 1.0);
  ChainPartition p = ChainPartition::tripartite(g.space, 1, 1, 1);
  GibbsNormDiagnostics d = gibbs_norm_diagnostics(g.state, p);
  CHECK(d.a_b_over_ab == doctest::Approx(1.0));
  CHECK(d.ab_over_a_b == doctest::Approx(1.0));
  CHECK(d.abc_over_b == doctest::Approx(0.25));  // = d_B / d_ABC, not normalized
  CHECK(d.b_condition == doctest::Approx(1.0));

  GibbsInstance t = gibbs_state(tfim(1.0, 0.8), 5, 1.0);
  ChainPartition q = ChainPartition::tripartite(t.space, 2, 2, 1);
  GibbsNormDiagnostics dt = gibbs_norm_diagnostics(t.state, q);
  CHECK(dt.b_condition >= 1.0);
  CHECK(dt.a_b_over_ab > 0.0);
  CHECK(dt.ab_over_a_b > 0.0);
  CHECK(dt.abc_over_b > 0.0);
}

TEST_CASE("decay fits recover slopes and classify curvature") {
  std::vector<double> x, y_exp, y_super;
  for (int i = 0; i <= 6; ++i) {
    x.push_back(i);
    y_exp.push_back(std::exp(-2.0 * i));
    y_super.push_back(std::exp(-0.25 * i * i));
  }
  DecayFitReport r = fit_exponential_decay(x, y_exp);
  CHECK(r.points_used == 7);
  CHECK(r.slope == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(r.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.strictly_decreasing);
  CHECK(r.log_concave);  // second differences ~ 0 sit on the boundary
  for (double d : r.log_second_differences) CHECK(std::abs(d) < 1e-9);

  DecayFitReport rs = fit_exponential_decay(x, y_super);
  CHECK(rs.log_concave);
  for (double d : rs.log_second_differences) CHECK(d == doctest::Approx(-0.5).epsilon(1e-6));

  // growing-then-shrinking data is not monotone
  std::vector<double> bump{1e-3, 5e-3, 1e-3, 1e-4};
  DecayFitReport rb = fit_exponential_decay({0, 1, 2, 3}, bump);
  CHECK(!rb.strictly_decreasing);
  // decay that flattens out is convex in log space
  std::vector<double> flattening{1e-2, 1e-4, 5e-5, 4.9e-5};
  DecayFitReport rc = fit_exponential_decay({0, 1, 2, 3}, flattening);
  CHECK(rc.strictly_decreasing);
  CHECK(!rc.log_concave);

  // floor points are excluded from the fit
  std::vector<double> with_floor{1e-2, 1e-4, 1e-13, 1e-15};
  DecayFitReport rf = fit_exponential_decay({0, 1, 2, 3}, with_floor);
  CHECK(rf.points_used == 2);
}

#include <gtest/gtest.h>

#include <random>

#include "gsi/error.hpp"
#include "gsi/graph_core.hpp"
#include "gsi/graph_io.hpp"
#include "test_support.hpp"

using namespace gsi;
using gsi::testing::random_graph;
using gsi::testing::random_vector;

namespace {

Graph path3() {
  Montage m({{"a", {1, 0, 0}}, {"b", {0, 1, 0}}, {"c", {0, 0, 1}}});
  Matrix w(3, 3);
  w << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  return Graph(m, w);
}

}  // namespace

TEST(GraphCore, PathLaplacianAndVariation) {
  const Graph g = path3();
  const Laplacian L = build_laplacian(g);
  Matrix expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  EXPECT_EQ(L.matrix(), expected);
  Vector s(3);
  s << 1, 2, 4;
  // (1-2)^2 + (2-4)^2
  EXPECT_DOUBLE_EQ(total_variation(L, s), 5.0);
  EXPECT_DOUBLE_EQ(total_variation_pairwise(g, s), 5.0);
  EXPECT_NEAR(total_variation_spectral(spectrum(L), s), 5.0, 1e-12);
}

TEST(GraphCore, ConstantSignalHasZeroVariation) {
  std::mt19937_64 rng(1);
  const Graph g = random_graph(12, rng);
  EXPECT_NEAR(total_variation(build_laplacian(g), Vector::Constant(12, 3.5)), 0.0, 1e-12);
}

TEST(GraphCore, ThreeFormsOfVariationAgree) {
  std::mt19937_64 rng(2);
  for (std::size_t n : {2u, 5u, 10u, 20u, 35u, 50u}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Graph g = random_graph(n, rng, 0.4);
      const Laplacian L = build_laplacian(g);
      const Vector s = random_vector(n, rng);
      const double q = total_variation(L, s);
      EXPECT_NEAR(total_variation_pairwise(g, s), q, 1e-9 * q);
      EXPECT_NEAR(total_variation_spectral(spectrum(L), s), q, 1e-9 * q);
    }
  }
}

TEST(GraphCore, GftIsOrthonormal) {
  std::mt19937_64 rng(3);
  const Graph g = random_graph(15, rng);
  const Spectrum sp = spectrum(build_laplacian(g));
  const Vector s = random_vector(15, rng);
  const Vector c = gft(sp, s);
  EXPECT_NEAR(c.norm(), s.norm(), 1e-12 * s.norm());
  EXPECT_LT((inverse_gft(sp, c) - s).norm(), 1e-12 * s.norm());
  EXPECT_NEAR(sp.eigenvalues(0), 0.0, 1e-10);
  for (Eigen::Index i = 1; i < sp.eigenvalues.size(); ++i) EXPECT_LE(sp.eigenvalues(i - 1), sp.eigenvalues(i));
}

TEST(GraphCore, EigenvectorSignConvention) {
  std::mt19937_64 rng(4);
  const Spectrum sp = spectrum(build_laplacian(random_graph(10, rng)));
  for (Eigen::Index k = 0; k < sp.eigenvectors.cols(); ++k) {
    Eigen::Index arg = 0;
    sp.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GE(sp.eigenvectors(arg, k), 0.0);
  }
}

TEST(GraphCore, VariationIsShiftInvariantAndQuadratic) {
  std::mt19937_64 rng(5);
  const Graph g = random_graph(9, rng);
  const Laplacian L = build_laplacian(g);
  const Vector s = random_vector(9, rng);
  const double q = total_variation(L, s);
  EXPECT_NEAR(total_variation(L, (s.array() + 7.0).matrix()), q, 1e-10 * q);
  EXPECT_NEAR(total_variation(L, 3.0 * s), 9.0 * q, 1e-10 * q);
  EXPECT_GE(q, 0.0);
}

TEST(GraphCore, RejectsBadWeights) {
  Montage m({{"a", {1, 0, 0}}, {"b", {0, 1, 0}}});
  Matrix asym(2, 2);
  asym << 0, 1, 0.5, 0;
  EXPECT_THROW(Graph(m, asym), invalid_input);
  Matrix neg(2, 2);
  neg << 0, -1, -1, 0;
  EXPECT_THROW(Graph(m, neg), invalid_input);
  Matrix diag(2, 2);
  diag << 1, 0, 0, 0;
  EXPECT_THROW(Graph(m, diag), invalid_input);
  EXPECT_THROW(Graph(m, Matrix::Zero(3, 3)), invalid_input);
}

TEST(GraphCore, MontageValidation) {
  EXPECT_THROW(Montage({{"a", {1, 0, 0}}, {"a", {0, 1, 0}}}), invalid_input);
  EXPECT_THROW(Montage({{"a", {2, 0, 0}}}), invalid_input);
  EXPECT_THROW(Montage({{"", {1, 0, 0}}}), invalid_input);
  const Montage m = Montage::normalized({{"a", {2, 0, 0}}});
  EXPECT_NEAR(m[0].position.norm(), 1.0, 1e-15);
}

TEST(GraphCore, ConnectedComponents) {
  Matrix w = Matrix::Zero(5, 5);
  w(0, 1) = w(1, 0) = 1;
  w(3, 4) = w(4, 3) = 1;
  const auto c = connected_components(w);
  EXPECT_EQ(c, (std::vector<std::size_t>{0, 0, 1, 2, 2}));
  EXPECT_FALSE(is_connected(w));
}

TEST(GraphCore, SubgraphKeepsInducedWeights) {
  const Graph g = path3();
  const std::vector<std::string> names{"c", "b"};
  const Graph s = g.subgraph(names);
  EXPECT_EQ(s.montage().names(), names);
  EXPECT_EQ(s.weights()(0, 1), 1.0);
}

TEST(GraphIo, JsonRoundTrip) {
  std::mt19937_64 rng(6);
  const Graph g = random_graph(7, rng);
  const Graph back = parse_graph_json(graph_to_json(g));
  EXPECT_EQ(back.montage(), g.montage());
  EXPECT_EQ(back.weights(), g.weights());
  EXPECT_EQ(graph_to_json(back), graph_to_json(g));
}

TEST(GraphIo, RejectsMalformed) {
  EXPECT_THROW(parse_graph_json("{not json"), format_error);
  EXPECT_THROW(parse_montage_json(R"({"electrodes":[{"name":"a"}]})"), format_error);
  EXPECT_THROW(parse_graph_json(R"({"electrodes":[{"name":"a","pos":[1,0,0]}],"weights":[[0,1]]})"), format_error);
}

TEST(GraphCore, SmallLaplaciansAndSpectra) {
  Matrix w2(2, 2);
  w2 << 0, 1, 1, 0;
  Matrix l2(2, 2);
  l2 << 1, -1, -1, 1;
  EXPECT_EQ(laplacian_matrix(w2), l2);
  const Spectrum s2 = spectrum(l2);
  EXPECT_NEAR(s2.eigenvalues(0), 0.0, 1e-14);
  EXPECT_NEAR(s2.eigenvalues(1), 2.0, 1e-14);

  EXPECT_EQ(laplacian_matrix(Matrix::Zero(3, 3)), Matrix::Zero(3, 3));
  const Spectrum s0 = spectrum(Matrix(Matrix::Zero(3, 3)));
  EXPECT_EQ(s0.eigenvalues, Vector::Zero(3));

  const Spectrum sp = spectrum(build_laplacian(path3()));
  EXPECT_NEAR(sp.eigenvalues(0), 0.0, 1e-14);
  EXPECT_NEAR(sp.eigenvalues(1), 1.0, 1e-14);
  EXPECT_NEAR(sp.eigenvalues(2), 3.0, 1e-14);
}

TEST(GraphCore, LaplacianInvariants) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const Laplacian L = build_laplacian(random_graph(12, rng, 0.4));
    const Matrix& m = L.matrix();
    const double scale = m.cwiseAbs().maxCoeff();
    EXPECT_LT(m.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9 * scale);
    const Spectrum sp = spectrum(L);
    EXPECT_GE(sp.eigenvalues(0), -1e-8 * sp.eigenvalues(sp.eigenvalues.size() - 1));
    const Matrix& u = sp.eigenvectors;
    EXPECT_LT((u.transpose() * u - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((u * sp.eigenvalues.asDiagonal() * u.transpose() - m).norm(), 1e-7 * m.norm());
  }
}

TEST(Gft, ConstantAndEigenvectorSignals) {
  std::mt19937_64 rng(8);
  const Spectrum sp = spectrum(build_laplacian(random_graph(9, rng)));
  const Vector c = gft(sp, Vector::Constant(9, 2.0));
  EXPECT_NEAR(std::abs(c(0)), 6.0, 1e-12);
  EXPECT_LT(c.tail(8).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index k = 0; k < 9; ++k) {
    const Vector e = gft(sp, sp.eigenvectors.col(k));
    EXPECT_LT((e - Vector::Unit(9, k)).cwiseAbs().maxCoeff(), 1e-12);
  }
  Matrix w2(2, 2);
  w2 << 0, 1, 1, 0;
  Vector s(2);
  s << 1, -1;
  const Vector h = gft(spectrum(laplacian_matrix(w2)), s).cwiseAbs();
  EXPECT_NEAR(h(0), 0.0, 1e-15);
  EXPECT_NEAR(h(1), std::sqrt(2.0), 1e-15);
}

TEST(GraphCore, TwoNodeVariation) {
  Montage m({{"a", {1, 0, 0}}, {"b", {0, 1, 0}}});
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  const Graph g(m, w);
  Vector s(2);
  s << 0, 2;
  EXPECT_DOUBLE_EQ(total_variation(build_laplacian(g), s), 4.0);
  EXPECT_DOUBLE_EQ(total_variation_pairwise(g, s), 4.0);
}

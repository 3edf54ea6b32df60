// Copyright 2026 The dprp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dprp/projections.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "dprp/rng.h"
#include "gtest/gtest.h"

namespace dprp {
namespace {

TEST(ProjectionSpecTest, ParseAndNames) {
  EXPECT_EQ(*ParseProjectionKind("gaussian"), ProjectionKind::kGaussian);
  EXPECT_EQ(*ParseProjectionKind("rademacher"), ProjectionKind::kVerySparse);
  EXPECT_EQ(*ParseProjectionKind("oporp"), ProjectionKind::kOporp);
  EXPECT_FALSE(ParseProjectionKind("hadamard").ok());
  EXPECT_EQ(ProjectionTag(ProjectionSpec::Rademacher(8, 2, 1)), "rademacher");
  ProjectionSpec sparse = ProjectionSpec::Rademacher(8, 2, 1);
  sparse.s = 3;
  EXPECT_EQ(ProjectionTag(sparse), "very_sparse");
}

TEST(ProjectionSpecTest, Validation) {
  EXPECT_FALSE(ProjectionSpec::Gaussian(0, 2, 1).Validate().ok());
  EXPECT_FALSE(ProjectionSpec::Gaussian(4, 0, 1).Validate().ok());
  EXPECT_FALSE(ProjectionSpec::Oporp(4, 5, 1).Validate().ok());
  ProjectionSpec bad = ProjectionSpec::Rademacher(4, 2, 1);
  bad.s = 0.5;
  EXPECT_FALSE(bad.Validate().ok());
  EXPECT_TRUE(ProjectionSpec::Gaussian(4, 8, 1).Validate().ok());
}

TEST(ProjectionSpecTest, DigestCoversEveryField) {
  const ProjectionSpec base = ProjectionSpec::Rademacher(100, 10, 7);
  std::set<std::string> digests = {base.Digest()};
  ProjectionSpec v = base;
  v.p = 101;
  digests.insert(v.Digest());
  v = base;
  v.k = 11;
  digests.insert(v.Digest());
  v = base;
  v.seed = 8;
  digests.insert(v.Digest());
  v = base;
  v.s = 1.0000000000000002;
  digests.insert(v.Digest());
  v = base;
  v.kind = ProjectionKind::kGaussian;
  digests.insert(v.Digest());
  EXPECT_EQ(digests.size(), 6u);
  EXPECT_EQ(base.Digest(), ProjectionSpec::Rademacher(100, 10, 7).Digest());
}

TEST(ProjectionOperatorTest, MaterializeIsReproducible) {
  for (auto spec : {ProjectionSpec::Gaussian(50, 8, 3),
                    ProjectionSpec::Rademacher(50, 8, 3)}) {
    auto a = ProjectionOperator::Materialize(spec);
    auto b = ProjectionOperator::Materialize(spec);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(a->matrix(), b->matrix());
    spec.seed = 4;
    EXPECT_NE(a->matrix(), ProjectionOperator::Materialize(spec)->matrix());
  }
}

TEST(ProjectionOperatorTest, EntryDistributions) {
  const int p = 400, k = 100;
  auto g = *ProjectionOperator::Materialize(ProjectionSpec::Gaussian(p, k, 1));
  const double n = p * k;
  EXPECT_NEAR(g.matrix().mean(), 0, 4 / std::sqrt(n));
  EXPECT_NEAR(g.matrix().squaredNorm() / n, 1, 4 * std::sqrt(2 / n));
  auto r = *ProjectionOperator::Materialize(ProjectionSpec::Rademacher(p, k, 1));
  EXPECT_TRUE((r.matrix().array().abs() == 1.0).all());
  ProjectionSpec us{ProjectionKind::kUniform, p, k, 1, 1};
  auto u = *ProjectionOperator::Materialize(us);
  EXPECT_LE(u.matrix().cwiseAbs().maxCoeff(), std::sqrt(3.0));
  EXPECT_NEAR(u.matrix().squaredNorm() / n, 1, 0.03);
  ProjectionSpec ss{ProjectionKind::kVerySparse, p, k, 4, 1};
  auto s = *ProjectionOperator::Materialize(ss);
  const double nonzero = (s.matrix().array() != 0).count() / n;
  EXPECT_NEAR(nonzero, 0.25, 4 * std::sqrt(0.25 * 0.75 / n));
  EXPECT_NEAR(s.matrix().squaredNorm() / n, 1, 0.05);
}

TEST(ProjectionOperatorTest, ColumnMaxAbs) {
  Eigen::MatrixXd w(3, 2);
  w << 1, -5, -2, 0.5, 0, 1;
  auto op = *ProjectionOperator::FromMatrix(ProjectionSpec::Gaussian(3, 2, 0), w);
  EXPECT_EQ(op.ColumnMaxAbs(0), 2);
  EXPECT_EQ(op.ColumnMaxAbs(1), 5);
  EXPECT_FALSE(ProjectionOperator::FromMatrix(ProjectionSpec::Gaussian(3, 3, 0), w)
                   .ok());
}

TEST(ProjectionOperatorTest, DenseProjectScalesBySqrtK) {
  Eigen::MatrixXd w(3, 4);
  w << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  auto op = *ProjectionOperator::FromMatrix(ProjectionSpec::Gaussian(3, 4, 0), w);
  const std::vector<double> u = {1, 0, -1};
  auto x = *op.Project(u);
  const std::vector<double> want = {-8, -8, -8, -8};
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(x[j], want[j] / 2);
  EXPECT_FALSE(op.Project(std::vector<double>{1, 2}).ok());
}

TEST(ProjectionOperatorTest, OporpWorkedExample) {
  const auto spec = ProjectionSpec::Oporp(4, 2, 0);
  auto op = *ProjectionOperator::FromOporpParts(spec, {0, 1, 2, 3},
                                                {1, -1, 1, 1});
  auto x = *op.Project(std::vector<double>{1, 1, 1, 1});
  EXPECT_EQ(x, (std::vector<double>{0, 2}));
  EXPECT_EQ(op.BinOf(1), 0);
  EXPECT_EQ(op.BinOf(2), 1);
  EXPECT_FALSE(
      ProjectionOperator::FromOporpParts(spec, {0, 0, 2, 3}, {1, 1, 1, 1}).ok());
}

TEST(ProjectionOperatorTest, OporpPermutationAndPadding) {
  const auto spec = ProjectionSpec::Oporp(10, 4, 9);
  auto op = *ProjectionOperator::Materialize(spec);
  EXPECT_EQ(op.padded_dim(), 12);
  EXPECT_EQ(op.bin_width(), 3);
  std::vector<int> pos = op.position();
  std::sort(pos.begin(), pos.end());
  std::vector<int> iota(12);
  std::iota(iota.begin(), iota.end(), 0);
  EXPECT_EQ(pos, iota);
  for (double w : op.oporp_signs()) EXPECT_EQ(std::abs(w), 1);
  // Each coordinate lands in exactly one bin.
  const Eigen::MatrixXd m = op.EffectiveMatrix();
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ((m.row(i).array() != 0).count(), 1);
  }
}

TEST(ProjectionOperatorTest, OporpPermutationIsUniform) {
  // Position of coordinate 0 over many seeds, chi-square against uniform.
  const int padded = 8, trials = 16000;
  std::vector<int> counts(padded, 0);
  for (int s = 0; s < trials; ++s) {
    ++counts[ProjectionOperator::Materialize(ProjectionSpec::Oporp(8, 2, s))
                 ->position()[0]];
  }
  double chi2 = 0;
  const double e = trials / double(padded);
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  EXPECT_LT(chi2, 24.3);  // 0.999 quantile, 7 degrees of freedom
}

TEST(ProjectionOperatorTest, EffectiveMatrixAgreesWithProject) {
  RngStream rng(5, kDataStream);
  std::vector<double> u(30);
  for (auto& v : u) v = rng.Uniform() - 0.5;
  for (auto spec : {ProjectionSpec::Gaussian(30, 7, 2),
                    ProjectionSpec::Rademacher(30, 7, 2),
                    ProjectionSpec::Oporp(30, 7, 2)}) {
    auto op = *ProjectionOperator::Materialize(spec);
    const Eigen::VectorXd want =
        op.EffectiveMatrix().transpose() *
        Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
    auto x = *op.Project(u);
    for (int j = 0; j < 7; ++j) EXPECT_NEAR(x[j], want[j], 1e-13);
  }
}

TEST(SketchTest, ProvenanceAndSigns) {
  auto op = *ProjectionOperator::FromOporpParts(ProjectionSpec::Oporp(4, 2, 0),
                                                {0, 1, 2, 3}, {1, -1, 1, 1});
  auto u = *DataVector::Create({1, 1, 1, 1}, 1);
  auto sk = *ProjectVector(op, u);
  EXPECT_FALSE(sk.provenance.is_private);
  EXPECT_EQ(sk.provenance.mechanism, "non-private");
  EXPECT_EQ(sk.provenance.projection_kind, "oporp");
  EXPECT_EQ(sk.provenance.spec_digest, op.spec().Digest());
  auto signs = *TakeSigns(sk);
  EXPECT_EQ(signs.signs, (std::vector<int8_t>{1, 1}));
  EXPECT_EQ(signs.provenance.zero_indices, std::vector<int>{0});
  EXPECT_FALSE(TakeSigns(signs).ok());
  EXPECT_EQ(SignOf(-0.0), 1);
  EXPECT_EQ(SignOf(-1e-300), -1);
}

}  // namespace
}  // namespace dprp

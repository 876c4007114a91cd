#include <gtest/gtest.h>

#include <vector>

#include "etfad/etfad.hpp"
#include "etfad/oracle.hpp"
#include "etfad/tree_eval.hpp"
#include "etfad/workloads.hpp"
#include "support/check.hpp"
#include "support/strategies.hpp"

namespace {

using etfad::Fad;
using etfad::Strategy;
using etfad::testing::compare_vectors;
using etfad::testing::rel_close;

using ET = Fad<Strategy::standard>;

ET seed(double v, std::size_t i, std::size_t n) { return etfad::make_independent<Strategy::standard>(v, i, n); }

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

TEST(BuildExpr, NoArithmeticUntilAssignment) {
  const ET a = seed(2.0, 0, 3);
  const ET b = seed(3.0, 1, 3);
  const ET c = seed(4.0, 2, 3);
  etfad::CountingScope scope;
  const auto e = sin(a * b) * c;
  EXPECT_EQ(scope.count(), 0u);
  ET d;
  d = e;
  EXPECT_GT(scope.count(), 0u);
}

TEST(BuildExpr, TwoLevelTreeHoldsLeafReferences) {
  const ET a = seed(2.0, 0, 3);
  const ET b = seed(3.0, 1, 3);
  const ET c = seed(4.0, 2, 3);
  const auto e = a * b * c;
  EXPECT_EQ(&e.second(), &c);
  EXPECT_EQ(&e.first().first(), &a);
  EXPECT_EQ(&e.first().second(), &b);
  static_assert(decltype(e)::kStaticArgs == 3);
}

TEST(BuildExpr, UnaryOverLeaf) {
  const ET x = seed(0.5, 0, 1);
  const auto e = sin(x);
  EXPECT_EQ(&e.operand(), &x);
  static_assert(decltype(e)::kStaticArgs == 1);
}

TEST(BuildExpr, RepeatedLeafIsTwoHandles) {
  const ET a = seed(5.0, 0, 1);
  const auto e = a * a;
  EXPECT_EQ(&e.first(), &a);
  EXPECT_EQ(&e.second(), &a);
  EXPECT_EQ(e.num_args(), 2u);
}

TEST(AssignStandard, TripleProduct) {
  const ET a = seed(2.0, 0, 3);
  const ET b = seed(3.0, 1, 3);
  const ET c = seed(4.0, 2, 3);
  ET d;
  d = a * b * c;
  EXPECT_EQ(d.val(), 24.0);
  EXPECT_EQ(to_vec(d.dx()), (std::vector<double>{12, 8, 6}));
}

TEST(AssignStandard, NestedSineAtZero) {
  const ET x = seed(0.0, 0, 1);
  ET y;
  y = sin(sin(x));
  EXPECT_EQ(y.val(), 0.0);
  EXPECT_EQ(to_vec(y.dx()), (std::vector<double>{1}));
}

TEST(AssignStandard, LeafCopy) {
  const ET x = seed(1.25, 1, 3);
  ET y;
  y = x;
  EXPECT_EQ(y.val(), 1.25);
  EXPECT_EQ(to_vec(y.dx()), to_vec(x.dx()));
}

TEST(AssignStandard, MatchesHandFusedLoop) {
  const ET a = seed(1.5, 0, 3);
  const ET b = seed(-0.5, 1, 3);
  const ET c = seed(2.5, 2, 3);
  ET d;
  d = a * b * c;
  for (std::size_t i = 0; i < 3; ++i) {
    const double fused = (a.val() * b.val()) * c.dx(i) + (a.val() * b.dx(i) + a.dx(i) * b.val()) * c.val();
    EXPECT_EQ(d.dx(i), fused);
  }
}

TEST(CountProfileStandard, SingleSine) {
  const ET x = seed(0.3, 0, 1);
  etfad::CountingScope scope;
  ET y;
  y = sin(x);
  EXPECT_EQ(scope.count(), 2u);
}

TEST(CountProfileStandard, BareLeafIsFree) {
  const ET x = seed(0.3, 0, 4);
  etfad::CountingScope scope;
  ET y;
  y = x;
  EXPECT_EQ(scope.count(), 0u);
}

// One value pass (M sins) plus, per component, for each level k a cos of a
// freshly recomputed depth-(k-1) chain: M + n * M(M+1)/2.
TEST(CountProfileStandard, NestedSineIsAffineInN) {
  auto count = [](std::size_t n) {
    const ET x = seed(0.3, 0, n);
    etfad::CountingScope scope;
    ET y;
    y = etfad::nested_sine<10>(x);
    return scope.count();
  };
  EXPECT_EQ(count(1), 10u + 55u);
  EXPECT_EQ(count(5), 10u + 5u * 55u);
  EXPECT_EQ(count(50), 10u + 50u * 55u);
  EXPECT_GE(count(50), 5 * count(5));
}

TEST(SizePropagation, PassiveOperandReadsZero) {
  const ET x = seed(2.0, 1, 3);
  const ET p(4.0);
  ET y;
  y = x * p + p;
  EXPECT_EQ(y.size(), 3u);
  EXPECT_EQ(to_vec(y.dx()), (std::vector<double>{0, 4, 0}));
  y = p * p;
  EXPECT_EQ(y.size(), 0u);
  EXPECT_EQ(y.val(), 16.0);
}

TEST(SizePropagation, MismatchDetectedAtAssignment) {
  const ET a = seed(1.0, 0, 2);
  const ET b = seed(1.0, 0, 3);
  const auto e = a * b;  // building is unchecked
  ET y;
  EXPECT_THROW(y = e, etfad::SizeMismatchError);
}

template <class Tag>
class LazyStrategy : public ::testing::Test {
 public:
  static constexpr Strategy S = Tag::value;
  using F = Fad<S>;
  static F seed(double v, std::size_t i, std::size_t n) { return etfad::make_independent<S>(v, i, n); }
};
TYPED_TEST_SUITE(LazyStrategy, etfad::testing::LazyStrategies, etfad::testing::StrategyName);

TYPED_TEST(LazyStrategy, SelfAssignmentIsSafe) {
  using F = typename TestFixture::F;
  const F a = TestFixture::seed(3.0, 0, 2);
  F d = TestFixture::seed(2.0, 1, 2);
  d = d * a;
  EXPECT_EQ(d.val(), 6.0);
  EXPECT_EQ(to_vec(d.dx()), (std::vector<double>{2, 3}));
  d = sin(d) * d + d;
  const double s = std::sin(6.0);
  EXPECT_TRUE(rel_close(d.val(), s * 6.0 + 6.0, 1e-15));
  const double g = std::cos(6.0) * 6.0 + s + 1.0;
  EXPECT_TRUE(rel_close(d.dx(0), g * 2.0, 1e-14));
  EXPECT_TRUE(rel_close(d.dx(1), g * 3.0, 1e-14));
}

TYPED_TEST(LazyStrategy, ConstructFromExpression) {
  using F = typename TestFixture::F;
  const F a = TestFixture::seed(2.0, 0, 2);
  const F b = TestFixture::seed(3.0, 1, 2);
  const F y = a * b + 2.0 * a - b / 3.0;
  EXPECT_DOUBLE_EQ(y.val(), 6.0 + 4.0 - 1.0);
  EXPECT_DOUBLE_EQ(y.dx(0), 3.0 + 2.0);
  EXPECT_DOUBLE_EQ(y.dx(1), 2.0 - 1.0 / 3.0);
}

TYPED_TEST(LazyStrategy, HelperReturnedTreeIsSafe) {
  using F = typename TestFixture::F;
  const F x = TestFixture::seed(0.7, 0, 1);
  F y;
  y = etfad::nested_sine<5>(x);
  const auto [v, d] = etfad::oracle::analytic_gradient_nested(0.7, 5);
  EXPECT_TRUE(rel_close(y.val(), v, 1e-15));
  EXPECT_TRUE(rel_close(y.dx(0), d, 1e-14));
}

TYPED_TEST(LazyStrategy, FixedStorageMatchesDynamic) {
  constexpr Strategy S = TestFixture::S;
  using Fixed = Fad<S, etfad::FixedStorage<4>>;
  const Fixed a = Fixed::independent(1.2, 0, 3);
  const Fixed b = Fixed::independent(0.4, 2, 3);
  Fixed y;
  y = exp(a) * cos(b) - a / b;
  using F = typename TestFixture::F;
  const F ad = TestFixture::seed(1.2, 0, 3);
  const F bd = TestFixture::seed(0.4, 2, 3);
  F yd;
  yd = exp(ad) * cos(bd) - ad / bd;
  EXPECT_EQ(y.val(), yd.val());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(y.dx(i), yd.dx(i));
}

// Lazy results on random trees against the eager strategy.
TYPED_TEST(LazyStrategy, RandomTreesMatchEager) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    etfad::oracle::RandomTreeSpec spec;
    spec.max_depth = 1 + static_cast<int>(s % 8);
    spec.n_components = std::array<std::size_t, 3>{1, 5, 50}[s % 3];
    spec.rng_seed = 1000 + s;
    const auto tree = etfad::oracle::generate_tree(spec);
    const auto lazy = etfad::oracle::evaluate(tree, TestFixture::S);
    const auto eager = etfad::oracle::evaluate(tree, Strategy::eager);
    EXPECT_TRUE(rel_close(lazy.value, eager.value, 1e-13)) << "seed " << s;
    EXPECT_EQ(compare_vectors(lazy.gradient, eager.gradient, 1e-13), "") << "seed " << s;
  }
}

}  // namespace

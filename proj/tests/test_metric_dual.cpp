#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "fvx/metric_dual.hpp"
#include "fvx/random.hpp"

using namespace fvx;

namespace {

MetricConfig metric(std::array<long, 4> g, Rational xi, Rational sigma = 1, int eta = 1) {
  MetricConfig cfg;
  for (int a = 0; a < 4; ++a) cfg.g[a] = g[a];
  cfg.xi = xi;
  cfg.sigma = sigma;
  cfg.eta = eta;
  return cfg;
}

int inversion_sign(const std::vector<int>& v) {
  int n = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) ++n;
  return n % 2 ? -1 : 1;
}

// delta^{A1..Am}_{B1..Bm} as the signed sum over permutations of products of Kronecker deltas.
int delta_leibniz(const std::vector<int>& upper, const std::vector<int>& lower) {
  std::vector<int> p(upper.size());
  std::iota(p.begin(), p.end(), 0);
  int sum = 0;
  do {
    int prod = 1;
    for (std::size_t i = 0; i < p.size() && prod; ++i)
      if (upper[i] != lower[static_cast<std::size_t>(p[i])]) prod = 0;
    sum += prod * inversion_sign(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return sum;
}

std::vector<std::vector<int>> all_tuples(int m) {
  std::vector<std::vector<int>> out;
  int count = 1;
  for (int i = 0; i < m; ++i) count *= 5;
  for (int c = 0; c < count; ++c) {
    std::vector<int> t(static_cast<std::size_t>(m));
    int v = c;
    for (int s = m - 1; s >= 0; --s) {
      t[static_cast<std::size_t>(s)] = kAllIndices[v % 5];
      v /= 5;
    }
    out.push_back(t);
  }
  return out;
}

// Four-vector dual of a 2-form, (*S)_{cd} = 1/2 sum_{a,b} S^{ab} eps_{abcd}, eps_0123 = eta |g|^{1/2}.
FourForm hodge_oracle(const FourForm& s, const MetricConfig& cfg) {
  const Rational top = Rational(cfg.eta) * exact_sqrt(abs(cfg.det_g()));
  FourForm r(2);
  for (int c = 0; c < 4; ++c)
    for (int d = c + 1; d < 4; ++d) {
      Poly acc;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          std::vector<int> labels = {a, b, c, d};
          std::vector<int> sorted = labels;
          std::sort(sorted.begin(), sorted.end());
          if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
          const Rational sign = a < b ? Rational(1) : Rational(-1);
          const Poly& sab = s[IndexSubset::of({std::min(a, b), std::max(a, b)})];
          acc += sab * Rational(sign * top * inversion_sign(labels) / (cfg.g[a] * cfg.g[b]) / 2);
        }
      r.set(IndexSubset::of({c, d}), acc);
    }
  return r;
}

}  // namespace

TEST(Metric, Validation) {
  EXPECT_NO_THROW(MetricConfig{}.validate());
  EXPECT_THROW(metric({0, -1, -1, -1}, -1).validate(), std::invalid_argument);
  EXPECT_THROW(metric({1, -1, -1, -1}, 0).validate(), std::invalid_argument);
  EXPECT_THROW(metric({1, -1, -1, -1}, -1, -1).validate(), std::invalid_argument);
  EXPECT_THROW(metric({1, -1, -1, -1}, -1, 1, 2).validate(), std::invalid_argument);
  try {
    metric({2, -1, -1, -1}, -1).validate();
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_STREQ(e.what(), "non-rational normalization");
  }
  EXPECT_THROW(metric({1, -1, -1, -1}, 3).validate(), std::domain_error);
}

TEST(Epsilon, OrthonormalAndAntisymmetric) {
  const EpsilonTensor e = epsilon_lower(MetricConfig{});
  EXPECT_EQ(e.at({0, 1, 2, 3, 5}), 1);
  EXPECT_EQ(e.at({1, 0, 2, 3, 5}), -1);
  EXPECT_EQ(e.at({5, 0, 1, 2, 3}), 1);
  EXPECT_EQ(e.at({0, 0, 2, 3, 5}), 0);
  EXPECT_EQ(epsilon_lower(metric({1, -1, -1, -1}, -1, 1, -1)).top(), -1);
}

TEST(Epsilon, ScaledMetricNormalization) {
  // |g| = 36, |xi| = 4, sigma = 2: eps_01235 = sqrt(36) sqrt(4) / 2 = 6; eps^01235 = 6 / det h.
  const MetricConfig cfg = metric({4, -1, -9, -1}, -4, 2);
  EXPECT_EQ(epsilon_lower(cfg).top(), 6);
  EXPECT_EQ(cfg.det_h(), Rational(36));
  EXPECT_EQ(epsilon_upper(cfg).top(), Rational(1, 6));
  EXPECT_EQ(cfg.kappa(), 2);
  EXPECT_EQ(cfg.varpi(), 1);
}

TEST(Epsilon, FullContraction) {
  for (int xi : {1, -1}) {
    const MetricConfig cfg = metric({1, -1, -1, -1}, xi);
    const EpsilonTensor lo = epsilon_lower(cfg), up = epsilon_upper(cfg);
    Rational sum = 0;
    for (const auto& t : all_tuples(5)) sum += lo.at(t) * up.at(t);
    EXPECT_EQ(sum, Rational(-120 * xi));
  }
}

TEST(PermutationDelta, MatchesLeibnizSum) {
  for (int m = 1; m <= 3; ++m)
    for (const auto& a : all_tuples(m))
      for (const auto& b : all_tuples(m)) ASSERT_EQ(permutation_delta(a, b), delta_leibniz(a, b));
  std::vector<int> a = {0, 1, 2, 3, 5}, b = {5, 3, 2, 1, 0};
  EXPECT_EQ(permutation_delta(a, b), delta_leibniz(a, b));
  EXPECT_THROW(permutation_delta(std::vector<int>{0}, std::vector<int>{0, 1}), std::invalid_argument);
}

TEST(Contraction, AllFreeIndexCountsBothSigns) {
  for (int xi : {1, -1})
    for (int m = 0; m <= 5; ++m) EXPECT_TRUE(epsilon_contraction_check(m, metric({1, -1, -1, -1}, xi))) << m << " " << xi;
  Rng rng(41);
  for (int trial = 0; trial < 6; ++trial) EXPECT_TRUE(epsilon_contraction_check(trial, random_metric(rng)));
}

TEST(Contraction, FiveFreeIndicesDirect) {
  // m = 5: eps^{A..} eps_{B..} = -sign(xi) delta^{A..}_{B..}, checked entrywise on a sample of tuples.
  for (int xi : {1, -1}) {
    const MetricConfig cfg = metric({1, -1, -1, -1}, xi);
    const EpsilonTensor lo = epsilon_lower(cfg), up = epsilon_upper(cfg);
    const auto tuples = all_tuples(5);
    for (std::size_t i = 0; i < tuples.size(); i += 37)
      for (std::size_t j = 0; j < tuples.size(); j += 41)
        EXPECT_EQ(up.at(tuples[i]) * lo.at(tuples[j]), Rational(-xi * delta_leibniz(tuples[i], tuples[j])));
  }
}

TEST(Contraction, SignFollowsDeterminant) {
  EXPECT_EQ(contraction_sign(metric({1, -1, -1, -1}, -1)), 1);
  EXPECT_EQ(contraction_sign(metric({1, -1, -1, -1}, 1)), -1);
  EXPECT_EQ(contraction_sign(metric({1, 1, 1, 1}, 1)), 1);
}

TEST(Theta, Examples) {
  const MetricConfig cfg;
  EXPECT_EQ(theta_epsilon(MultiVector::scalar(Poly(1)), cfg), epsilon_form(cfg));
  const MultiVector top = MultiVector::basis(IndexSubset::from_mask(0b11111));
  EXPECT_EQ(theta_epsilon(top, cfg), FiveForm::scalar(Poly(epsilon_lower(cfg).top())));
  EXPECT_EQ(theta_h(basis_vector(0), cfg), basis_form(0));
  EXPECT_EQ(theta_h(basis_vector(5), cfg), jhat() * cfg.xi);
  EXPECT_EQ(theta_h(basis_vector(5), metric({1, -1, -1, -1}, -4, 2)), -jhat());
  Rng rng(42);
  for (int rank = 0; rank <= 5; ++rank) {
    const MultiVector w = random_multivector(rng, rank, {});
    const MetricConfig c = random_metric(rng);
    EXPECT_EQ(theta_h_inverse(theta_h(w, c), c), w);
  }
}

TEST(Dual, DoubleDual) {
  for (int xi : {1, -1}) {
    const MetricConfig cfg = metric({1, -1, -1, -1}, xi);
    EXPECT_EQ(dual(dual(basis_form(0), cfg), cfg), basis_form(0) * Rational(-xi));
  }
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const MetricConfig cfg = random_metric(rng);
    const FiveForm w = random_five_form(rng, trial % 6, {});
    EXPECT_EQ(dual(dual(w, cfg), cfg), w * Rational(-sgn(cfg.xi)));
  }
}

TEST(Dual, WedgeWithDualIsInnerProductTimesEpsilon) {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const MetricConfig cfg = random_metric(rng);
    const int m = trial % 6;
    const FiveForm s = random_five_form(rng, m, {}), t = random_five_form(rng, m, {});
    const FiveForm rhs = epsilon_form(cfg) * inner_product(s, t, cfg);
    EXPECT_EQ(wedge(s, dual(t, cfg)), rhs);
    EXPECT_EQ(wedge(dual(s, cfg), t), rhs);
  }
  EXPECT_EQ(inner_product(basis_form(1), basis_form(1), MetricConfig{}), Poly(-1));
}

TEST(Dual, JhatHasZOnlyDual) {
  const FiveForm d = dual(jhat(), MetricConfig{});
  EXPECT_EQ(d.rank(), 4);
  EXPECT_EQ(d, z_part(d));
  EXPECT_FALSE(d.is_zero());
}

TEST(Dual2, MatchesFourVectorHodgeOnBasis) {
  for (const MetricConfig& cfg : {MetricConfig{}, metric({1, -4, -1, -9}, 4, 2, -1), metric({1, 1, 1, 1}, 1)})
    for (IndexSubset k : subsets_of_size(4, 2)) {
      const FiveForm w = FiveForm::basis(k);
      EXPECT_EQ(dual2_zfree(w, cfg), lift(hodge_oracle(project(w), cfg))) << k.to_string();
    }
}

TEST(Dual2, RandomAndInvolution) {
  Rng rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    const MetricConfig cfg = random_metric(rng);
    const FiveForm w = random_z_form(rng, 2, {});
    const FiveForm d = dual2_zfree(w, cfg);
    EXPECT_EQ(d, lift(hodge_oracle(project(w), cfg)));
    EXPECT_EQ(dual2_zfree(d, cfg), w * Rational(-1));  // Lorentzian g
  }
  const MetricConfig euclid = metric({1, 1, 1, 1}, 1);
  const FiveForm w = random_z_form(rng, 2, {});
  EXPECT_EQ(dual2_zfree(dual2_zfree(w, euclid), euclid), w);
}

TEST(Dual2, Preconditions) {
  EXPECT_THROW(dual2_zfree(wedge(basis_form(0), jhat()), MetricConfig{}), std::invalid_argument);
  EXPECT_THROW(dual2_zfree(basis_form(0), MetricConfig{}), std::invalid_argument);
}

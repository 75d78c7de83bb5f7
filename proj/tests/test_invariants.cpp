#include <doctest.h>

#include "properties.hpp"

namespace {

void require_all(const props::Outcome& o)
{
    CHECK(o.trials >= 100);
    CHECK(o.failures == 0);
    MESSAGE("trials " << o.trials << ", worst deviation " << o.worst);
}

} // namespace

TEST_CASE("affine transforms flip the sign with the slope and change nothing else")
{
    std::mt19937_64 rng(101);
    require_all(props::affine_invariance(rng, 100));
}

TEST_CASE("rescaling all weights leaves coefficients and effective n unchanged")
{
    std::mt19937_64 rng(102);
    require_all(props::weight_scale_invariance(rng, 200));
}

TEST_CASE("spearman is invariant under strictly increasing transforms")
{
    std::mt19937_64 rng(103);
    require_all(props::spearman_monotone_invariance(rng, 100));
}

TEST_CASE("spearman equals pearson on ranks")
{
    std::mt19937_64 rng(104);
    require_all(props::spearman_is_pearson_on_ranks(rng, 100));
}

TEST_CASE("surfaces are symmetric in the focal pair")
{
    std::mt19937_64 rng(105);
    require_all(props::pair_symmetry(rng, 100));
}

TEST_CASE("coefficients and p-values stay in range")
{
    std::mt19937_64 rng(106);
    require_all(props::value_ranges(rng, 100));
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose conditions")
{
    std::mt19937_64 rng(107);
    require_all(props::moore_penrose_conditions(rng, 500));
}

TEST_CASE("Moore-Penrose conditions on Gram matrices, relative to operand norms")
{
    // Square Gaussian Gram matrices reach condition numbers beyond 1e8, where
    // even a correctly rounded inverse leaves ||A P A - A|| / ||A|| near eps * cond.
    std::mt19937_64 rng(109);
    require_all(props::moore_penrose_gram_ratio(rng, 500));
}

TEST_CASE("pseudo-inverse of an invertible matrix is its inverse")
{
    std::mt19937_64 rng(110);
    std::uniform_int_distribution<int> m_dist(2, 6);
    props::Outcome out;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = m_dist(rng);
        const auto a = props::random_psd(rng, m, m, 10.0, 4.0);
        oracle::Matrix am(m, std::vector<double>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) am[i][j] = a(i, j);
        const auto inv = oracle::invert(am);
        Eigen::MatrixXd ref(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) ref(i, j) = inv[i][j];
        const double rel = (gwpcor::moore_penrose_pinv(a) - ref).norm() / ref.norm();
        out.record(rel <= 1e-8, rel);
    }
    require_all(out);
}

TEST_CASE("uniform window reproduces the global coefficient and t-test")
{
    std::mt19937_64 rng(108);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = props::uniform_case(rng, 60);
        const auto gap = props::uniform_reduction_gap(c);
        CHECK(gap.coef <= 1e-9);
        CHECK(gap.pval <= 1e-9);
    }
}

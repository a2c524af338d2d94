#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "spindle/encoding.hpp"
#include "support/dense.hpp"

using namespace spindle;
namespace st = spindle::testing;

TEST(GrayCode, Examples) {
    EXPECT_EQ(gray_code(0, 2), "00");
    EXPECT_EQ(gray_code(1, 2), "01");
    EXPECT_EQ(gray_code(2, 2), "11");
    EXPECT_EQ(gray_code(3, 2), "10");
    EXPECT_EQ(gray_code(5, 3), "111");
    EXPECT_THROW(gray_code(4, 2), std::out_of_range);
}

TEST(GrayCode, ConsecutiveLevelsDifferInOneBit) {
    auto map = CodeMap::gray(8);
    for (int k = 0; k + 1 < 8; ++k) {
        int diff = 0;
        for (int b = 0; b < 3; ++b)
            if (map.level_to_bits[size_t(k)][size_t(b)] != map.level_to_bits[size_t(k) + 1][size_t(b)])
                ++diff;
        EXPECT_EQ(diff, 1);
    }
}

TEST(Spin1, DiagonalAndAlgebra) {
    auto s = spin1_operators();
    EXPECT_NEAR(s.sz.matrix(0, 0).real(), -1.0, 1e-15);
    EXPECT_NEAR(s.sz.matrix(1, 1).real(), 0.0, 1e-15);
    EXPECT_NEAR(s.sz.matrix(2, 2).real(), 1.0, 1e-15);

    Matrix total = s.sx.matrix * s.sx.matrix + s.sy.matrix * s.sy.matrix + s.sz.matrix * s.sz.matrix;
    EXPECT_LT((total - 2.0 * Matrix::Identity(3, 3)).norm(), 1e-14);

    Matrix comm = s.sx.matrix * s.sy.matrix - s.sy.matrix * s.sx.matrix;
    EXPECT_LT((comm - complexd(0, 1) * s.sz.matrix).norm(), 1e-14);
    EXPECT_TRUE(s.sx.is_hermitian());
    EXPECT_TRUE(s.sy.is_hermitian());
}

TEST(Boson, LadderOperators) {
    auto two = boson_operators(2);
    EXPECT_NEAR(two.b.matrix(0, 1).real(), 1.0, 1e-15);
    EXPECT_NEAR(two.b.matrix(1, 0).real(), 0.0, 1e-15);

    for (int dim : {2, 5, 8}) {
        auto ops = boson_operators(dim);
        for (int k = 0; k < dim; ++k) EXPECT_NEAR(ops.number.matrix(k, k).real(), k, 1e-15);
        Matrix ladder = ops.b_dag.matrix * ops.b.matrix;
        EXPECT_LT((ladder - ops.number.matrix).norm(), 1e-14);
    }
    EXPECT_THROW(boson_operators(1), std::invalid_argument);
}

TEST(Encode, SzTwoQubit) {
    auto s = spin1_operators();
    auto sum = encode(s.sz, CodeMap::gray(3));
    ASSERT_EQ(sum.size(), 2u);
    EXPECT_EQ(sum.terms()[0].word.str(), "IZ");
    EXPECT_NEAR(sum.terms()[0].coeff.real(), -0.5, 1e-14);
    EXPECT_EQ(sum.terms()[1].word.str(), "ZI");
    EXPECT_NEAR(sum.terms()[1].coeff.real(), -0.5, 1e-14);
}

TEST(Encode, IdentityDimFour) {
    auto sum = encode(QuditOperator::identity(4), CodeMap::gray(4));
    ASSERT_EQ(sum.size(), 1u);
    EXPECT_TRUE(sum.terms()[0].word.is_identity());
    EXPECT_NEAR(std::abs(sum.terms()[0].coeff - complexd(1, 0)), 0.0, 1e-14);
}

TEST(Encode, NumberOperatorDimEight) {
    auto sum = encode(boson_operators(8).number, CodeMap::gray(8));
    EXPECT_NEAR(one_norm(sum), 3.5, 1e-12);
    EXPECT_NEAR(sum.identity_coefficient().real(), 3.5, 1e-12);
    // Exact decomposition under the Gray permutation.
    for (const auto& t : sum.terms()) {
        const std::string w = t.word.str();
        if (w == "III") EXPECT_NEAR(t.coeff.real(), 3.5, 1e-12);
        else if (w == "ZII") EXPECT_NEAR(t.coeff.real(), -2.0, 1e-12);
        else if (w == "ZZI") EXPECT_NEAR(t.coeff.real(), -1.0, 1e-12);
        else if (w == "ZZZ") EXPECT_NEAR(t.coeff.real(), -0.5, 1e-12);
        else FAIL() << "unexpected word " << w;
    }
}

TEST(Encode, RoundTripRestrictedToCodeSubspace) {
    for (auto [dim, seed] : std::vector<std::pair<int, uint64_t>>{{3, 1}, {3, 2}, {8, 3}, {8, 4}}) {
        Matrix m = st::random_hermitian(dim, seed);
        auto map = CodeMap::gray(dim);
        auto sum = encode({dim, m}, map);
        Matrix dense = dense_matrix(sum);
        auto used = map.used_indices();
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c)
                EXPECT_LT(std::abs(dense(Eigen::Index(used[size_t(r)]), Eigen::Index(used[size_t(c)])) -
                                   m(r, c)),
                          1e-12);
        // Zero everywhere a row or column leaves the code subspace.
        std::vector<char> in_code(dense.rows(), 0);
        for (auto u : used) in_code[size_t(u)] = 1;
        for (Eigen::Index r = 0; r < dense.rows(); ++r)
            for (Eigen::Index c = 0; c < dense.cols(); ++c)
                if (!in_code[size_t(r)] || !in_code[size_t(c)])
                    EXPECT_LT(std::abs(dense(r, c)), 1e-12);
    }
}

TEST(Encode, HermiticityGivesRealCoefficients) {
    auto sum = encode({3, st::random_hermitian(3, 9)}, CodeMap::gray(3));
    EXPECT_TRUE(sum.is_hermitian(1e-12));
}

TEST(Encode, Linearity) {
    Matrix a = st::random_hermitian(3, 10), b = st::random_hermitian(3, 11);
    const double alpha = 0.37, beta = -1.21;
    auto map = CodeMap::gray(3);
    auto lhs = encode({3, Matrix(alpha * a + beta * b)}, map);
    auto rhs = encode({3, a}, map).scaled(alpha);
    rhs += encode({3, b}, map).scaled(beta);
    rhs.simplify();
    EXPECT_LT((dense_matrix(lhs) - dense_matrix(rhs)).norm(), 1e-12);
}

TEST(Encode, UnusedBitstringIsDarkState) {
    auto sum = encode({3, st::random_hermitian(3, 12)}, CodeMap::gray(3));
    Matrix dense = dense_matrix(sum);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(4);
    u(2) = 1.0;  // "10" is the unused codeword of the dim-3 Gray map
    EXPECT_LT((dense * u).norm(), 1e-12);
}

TEST(EncodeBitstringState, Examples) {
    auto spin = CodeMap::gray(3);
    EXPECT_EQ(encode_bitstring_state({0}, {spin}), "00");
    EXPECT_EQ(encode_bitstring_state({2}, {spin}), "11");
    EXPECT_EQ(encode_bitstring_state({0, 2}, {spin, spin}), "0011");
    EXPECT_THROW(encode_bitstring_state({3}, {spin}), std::out_of_range);
}

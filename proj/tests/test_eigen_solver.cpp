#include "lsmrl/eigen_solver.hpp"

#include "lsmrl/rng.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

using namespace lsmrl;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, rng_t& rng, double density = 1.0)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (uniform01(rng) < density) m(i, j) = uniform(rng, -1.0, 1.0);
    return m;
}

// Characteristic polynomial by Faddeev-LeVerrier; c[k] multiplies x^(n-k).
std::vector<double> char_poly(const Eigen::MatrixXd& a)
{
    const auto n = a.rows();
    std::vector<double> c(static_cast<std::size_t>(n + 1));
    c[0] = 1.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<std::size_t>(k - 1)] * id;
        c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
    }
    return c;
}

// Roots of a monic polynomial by Durand-Kerner iteration.
std::vector<cd> poly_roots(const std::vector<double>& c)
{
    const std::size_t n = c.size() - 1;
    std::vector<cd> z(n);
    const cd seed(0.4, 0.9);
    for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<double>(i));
    auto eval = [&](cd x) {
        cd v = 0;
        for (double k : c) v = v * x + k;
        return v;
    };
    for (int it = 0; it < 5000; ++it)
        for (std::size_t i = 0; i < n; ++i) {
            cd den = 1;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            z[i] -= eval(z[i]) / den;
        }
    return z;
}

// Largest distance between two multisets of eigenvalues after greedy matching.
double match_error(std::vector<cd> a, std::vector<cd> b)
{
    if (a.size() != b.size()) return 1e300;
    double worst = 0;
    for (const auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](cd p, cd q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

}  // namespace

TEST(EigenSolver, SmallMatricesMatchCharacteristicPolynomialRoots)
{
    rng_t rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        const auto m = random_matrix(4, rng);
        EXPECT_LT(match_error(eigen_spectrum(m), poly_roots(char_poly(m))), 1e-8) << m;
    }
}

TEST(EigenSolver, KnownSpectra)
{
    Eigen::MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    EXPECT_LT(match_error(eigen_spectrum(rot), {cd(0, 1), cd(0, -1)}), 1e-14);

    Eigen::MatrixXd tri(3, 3);
    tri << 2, 5, 7, 0, -1, 3, 0, 0, 0.5;
    EXPECT_LT(match_error(eigen_spectrum(tri), {2.0, -1.0, 0.5}), 1e-12);

    const Eigen::MatrixXd diag = Eigen::VectorXd::LinSpaced(6, -3, 2).asDiagonal();
    EXPECT_LT(match_error(eigen_spectrum(diag), {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0}), 1e-14);

    const auto zero = eigen_spectrum(Eigen::MatrixXd::Zero(5, 5));
    for (const auto& l : zero) EXPECT_EQ(std::abs(l), 0.0);
    EXPECT_TRUE(eigen_spectrum(Eigen::MatrixXd(0, 0)).empty());
    EXPECT_EQ(eigen_spectrum(Eigen::MatrixXd::Constant(1, 1, 3.5))[0], cd(3.5));
}

TEST(EigenSolver, TraceAndTransposeInvariants)
{
    rng_t rng(2);
    for (int n : {5, 17, 60}) {
        const auto m = random_matrix(n, rng, 0.3);
        const auto eig = eigen_spectrum(m);
        cd sum = 0;
        for (const auto& l : eig) sum += l;
        EXPECT_NEAR(sum.real(), m.trace(), 1e-9 * n);
        EXPECT_NEAR(sum.imag(), 0.0, 1e-9 * n);
        EXPECT_LT(match_error(eig, eigen_spectrum(m.transpose())), 1e-7);
    }
}

TEST(EigenSolver, AgreesWithEigenLibrary)
{
    rng_t rng(3);
    for (int n : {10, 50, 200}) {
        const auto m = random_matrix(n, rng, 0.5);
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        std::vector<cd> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
        EXPECT_LT(match_error(eigen_spectrum(m), ref), 1e-7) << n;
    }
}

TEST(EigenSolver, SparseMatricesAgreeOnSpectralRadius)
{
    // Very sparse matrices carry clustered zero eigenvalues that are only
    // determined to about sqrt(eps); the extreme ones are well conditioned.
    rng_t rng(4);
    for (int n : {50, 200, 500}) {
        const auto m = random_matrix(n, rng, 0.02);
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        double ours = 0;
        for (const auto& l : eigen_spectrum(m)) ours = std::max(ours, std::abs(l));
        EXPECT_NEAR(ours, es.eigenvalues().cwiseAbs().maxCoeff(), 1e-9) << n;
    }
}

TEST(EigenSolver, BadlyScaledMatrixIsBalanced)
{
    Eigen::MatrixXd m(3, 3);
    m << 1, 1e6, 0, 1e-6, 2, 1e6, 0, 1e-6, 3;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<cd> ref(es.eigenvalues().data(), es.eigenvalues().data() + 3);
    EXPECT_LT(match_error(eigen_spectrum(m), ref), 1e-9);
}

TEST(EigenSolver, RejectsInvalidInput)
{
    EXPECT_THROW(eigen_spectrum(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
    Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(2, 2);
    nan(0, 1) = std::nan("");
    EXPECT_THROW(eigen_spectrum(nan), std::invalid_argument);
    EXPECT_THROW(eigen_spectrum(Eigen::MatrixXd::Zero(10, 10), {5, 60}), std::invalid_argument);
}

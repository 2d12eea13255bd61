#include "lsmrl/readout.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace lsmrl;

namespace {

std::vector<double> random_vector(std::size_t n, rng_t& rng)
{
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, -1.0, 1.0);
    return v;
}

readout_params random_params(Eigen::Index in, Eigen::Index hid, Eigen::Index out, rng_t& rng)
{
    auto p = init_readout(in, hid, out, rng);
    for (Eigen::Index k = 0; k < p.b1.size(); ++k) p.b1(k) = uniform(rng, -0.3, 0.3);
    for (Eigen::Index k = 0; k < p.b2.size(); ++k) p.b2(k) = uniform(rng, -0.3, 0.3);
    return p;
}

// Plain loops, no Eigen arithmetic.
std::vector<double> naive_forward(const readout_params& p, const std::vector<double>& x)
{
    std::vector<double> h(static_cast<std::size_t>(p.hidden()));
    for (Eigen::Index j = 0; j < p.hidden(); ++j) {
        double s = p.b1(j);
        for (Eigen::Index i = 0; i < p.inputs(); ++i) s += p.w1(j, i) * x[static_cast<std::size_t>(i)];
        h[static_cast<std::size_t>(j)] = s > 0 ? s : 0;
    }
    std::vector<double> q(static_cast<std::size_t>(p.actions()));
    for (Eigen::Index a = 0; a < p.actions(); ++a) {
        double s = p.b2(a);
        for (Eigen::Index j = 0; j < p.hidden(); ++j) s += p.w2(a, j) * h[static_cast<std::size_t>(j)];
        q[static_cast<std::size_t>(a)] = s;
    }
    return q;
}

double loss(const readout_params& p, const std::vector<double>& x, Eigen::Index a, double y)
{
    const double d = y - naive_forward(p, x)[static_cast<std::size_t>(a)];
    return 0.5 * d * d;
}

}  // namespace

TEST(Readout, ForwardMatchesNaiveLoops)
{
    rng_t rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        const auto p = random_params(17, 9, 4, rng);
        const auto x = random_vector(17, rng);
        const auto q = forward(p, x);
        const auto ref = naive_forward(p, x);
        for (std::size_t a = 0; a < ref.size(); ++a) EXPECT_NEAR(q(static_cast<Eigen::Index>(a)), ref[a], 1e-12);
    }
}

TEST(Readout, BatchForwardAgreesWithSingle)
{
    rng_t rng(2);
    const auto p = random_params(6, 5, 3, rng);
    Eigen::MatrixXd x(6, 4);
    for (Eigen::Index c = 0; c < 4; ++c) {
        const auto v = random_vector(6, rng);
        for (Eigen::Index r = 0; r < 6; ++r) x(r, c) = v[static_cast<std::size_t>(r)];
    }
    const auto q = forward_batch(p, x);
    for (Eigen::Index c = 0; c < 4; ++c) {
        const Eigen::VectorXd col = x.col(c);
        EXPECT_TRUE(q.col(c).isApprox(forward(p, {col.data(), 6}), 1e-14));
    }
}

TEST(Readout, BackwardMatchesCentralDifferences)
{
    rng_t rng(3);
    const double h = 1e-6;
    int checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        auto p = random_params(8, 6, 3, rng);
        const auto x = random_vector(8, rng);
        const auto a = static_cast<Eigen::Index>(uniform_index(rng, 3));
        const double y = uniform(rng, -2.0, 2.0);
        forward_cache cache;
        const auto q = forward(p, x, &cache);
        const auto g = backward(p, cache, a, y - q(a));

        auto check = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& grad) {
            for (Eigen::Index k = 0; k < param.size(); ++k) {
                const double keep = param.data()[k];
                param.data()[k] = keep + h;
                const double up = loss(p, x, a, y);
                param.data()[k] = keep - h;
                const double down = loss(p, x, a, y);
                param.data()[k] = keep;
                const double fd = (up - down) / (2 * h);
                const double an = grad.data()[k];
                const double rel = std::abs(fd - an) / std::max(1.0, std::max(std::abs(fd), std::abs(an)));
                ASSERT_LT(rel, 1e-5) << "instance " << inst;
                ++checked;
            }
        };
        Eigen::MatrixXd b1 = p.b1, b2 = p.b2;
        check(p.w1, g.w1);
        check(p.w2, g.w2);
        p.b1 = b1;
        {
            Eigen::MatrixXd m = p.b1;
            for (Eigen::Index k = 0; k < m.size(); ++k) {
                const double keep = p.b1(k);
                p.b1(k) = keep + h;
                const double up = loss(p, x, a, y);
                p.b1(k) = keep - h;
                const double down = loss(p, x, a, y);
                p.b1(k) = keep;
                EXPECT_NEAR((up - down) / (2 * h), g.b1(k), 1e-5);
            }
            for (Eigen::Index k = 0; k < b2.size(); ++k) {
                const double keep = p.b2(k);
                p.b2(k) = keep + h;
                const double up = loss(p, x, a, y);
                p.b2(k) = keep - h;
                const double down = loss(p, x, a, y);
                p.b2(k) = keep;
                EXPECT_NEAR((up - down) / (2 * h), g.b2(k), 1e-5);
            }
        }
    }
    EXPECT_EQ(checked, 100 * (8 * 6 + 6 * 3));
}

TEST(Readout, BatchGradientIsMeanOfSingles)
{
    rng_t rng(4);
    const auto p = random_params(5, 7, 2, rng);
    const int batch = 6;
    Eigen::MatrixXd x(5, batch);
    std::vector<Eigen::Index> actions(batch);
    std::vector<double> targets(batch);
    auto sum = readout_params::zeros(5, 7, 2);
    double loss_sum = 0;
    for (int b = 0; b < batch; ++b) {
        const auto v = random_vector(5, rng);
        for (int r = 0; r < 5; ++r) x(r, b) = v[static_cast<std::size_t>(r)];
        actions[static_cast<std::size_t>(b)] = static_cast<Eigen::Index>(uniform_index(rng, 2));
        targets[static_cast<std::size_t>(b)] = uniform(rng, -1, 1);
        forward_cache c;
        const auto q = forward(p, v, &c);
        const double td = targets[static_cast<std::size_t>(b)] - q(actions[static_cast<std::size_t>(b)]);
        loss_sum += 0.5 * td * td;
        const auto g = backward(p, c, actions[static_cast<std::size_t>(b)], td);
        sum.w1 += g.w1;
        sum.b1 += g.b1;
        sum.w2 += g.w2;
        sum.b2 += g.b2;
    }
    double l = 0;
    const auto g = batch_gradient(p, x, actions, targets, &l);
    EXPECT_NEAR(l, loss_sum / batch, 1e-12);
    EXPECT_TRUE(g.w1.isApprox(sum.w1 / batch, 1e-12));
    EXPECT_TRUE(g.b1.isApprox(sum.b1 / batch, 1e-12));
    EXPECT_TRUE(g.w2.isApprox(sum.w2 / batch, 1e-12));
    EXPECT_TRUE(g.b2.isApprox(sum.b2 / batch, 1e-12));
}

TEST(Readout, GradientTouchesOnlyTakenAction)
{
    rng_t rng(5);
    const auto p = random_params(4, 3, 3, rng);
    forward_cache c;
    const auto x = random_vector(4, rng);
    forward(p, x, &c);
    const auto g = backward(p, c, 1, 0.7);
    EXPECT_EQ(g.w2.row(0).norm(), 0.0);
    EXPECT_EQ(g.w2.row(2).norm(), 0.0);
    EXPECT_EQ(g.b2(0), 0.0);
    EXPECT_DOUBLE_EQ(g.b2(1), -0.7);
    EXPECT_THROW(backward(p, c, 3, 0.1), std::out_of_range);
}

TEST(RmsProp, FirstStepByHand)
{
    auto p = readout_params::zeros(1, 1, 1);
    auto opt = rmsprop_state::for_params(p);
    auto g = readout_params::zeros(1, 1, 1);
    g.w1(0, 0) = 1.0;
    g.b2(0) = -0.5;
    rmsprop_update(p, opt, g);
    // sq = 0.01 g^2, step = lr g / (0.1 |g| + eps)
    EXPECT_NEAR(opt.sq_avg.w1(0, 0), 0.01, 1e-15);
    EXPECT_NEAR(p.w1(0, 0), -2e-4 / (0.1 + 1e-6), 1e-15);
    EXPECT_NEAR(p.w1(0, 0), -1.99998e-3, 1e-8);
    EXPECT_NEAR(p.b2(0), 2e-4 * 0.5 / (0.05 + 1e-6), 1e-15);
    EXPECT_EQ(p.w2(0, 0), 0.0);

    rmsprop_update(p, opt, g);
    const double sq = 0.99 * 0.01 + 0.01;
    EXPECT_NEAR(opt.sq_avg.w1(0, 0), sq, 1e-15);
    EXPECT_NEAR(p.w1(0, 0), -2e-4 / (0.1 + 1e-6) - 2e-4 / (std::sqrt(sq) + 1e-6), 1e-15);
}

TEST(RmsProp, WeightDecayAddsToGradient)
{
    auto p = readout_params::zeros(1, 1, 1);
    p.w1(0, 0) = 2.0;
    auto opt = rmsprop_state::for_params(p, {0.1, 0.5, 0.0, 0.25});
    rmsprop_update(p, opt, readout_params::zeros(1, 1, 1));
    // g = 0.5, sq = 0.125, step = 0.1 * 0.5 / sqrt(0.125)
    EXPECT_NEAR(p.w1(0, 0), 2.0 - 0.05 / std::sqrt(0.125), 1e-15);
}

TEST(Init, GlorotBoundsAndZeroBiases)
{
    rng_t rng(6);
    const auto p = init_readout(500, 128, 4, rng);
    const double b1 = std::sqrt(6.0 / 628.0), b2 = std::sqrt(6.0 / 132.0);
    EXPECT_NEAR(b1, 0.0977, 1e-4);
    EXPECT_LE(p.w1.cwiseAbs().maxCoeff(), b1);
    EXPECT_GT(p.w1.cwiseAbs().maxCoeff(), 0.95 * b1);
    EXPECT_LE(p.w2.cwiseAbs().maxCoeff(), b2);
    EXPECT_EQ(p.b1.norm(), 0.0);
    EXPECT_EQ(p.b2.norm(), 0.0);
    EXPECT_NEAR(p.w1.mean(), 0.0, 0.005);
    EXPECT_THROW(init_readout(500, 0, 4, rng), std::invalid_argument);
}

TEST(Readout, RejectsWrongInputLength)
{
    rng_t rng(7);
    const auto p = init_readout(3, 2, 2, rng);
    const std::vector<double> x(4, 0.0);
    EXPECT_THROW(forward(p, x), std::invalid_argument);
}

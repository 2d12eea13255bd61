#include "lsmrl/reservoir.hpp"

#include "support/hand_topology.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace lsmrl;
using lsmrl::testing::hand_topology;

namespace {

topology_config small_config(std::uint64_t seed)
{
    topology_config c;
    c.n_input = 40;
    c.n_exc = 120;
    c.n_inh = 30;
    c.k_in = 3;
    c.c_rec = 3;
    c.seed = seed;
    return c;
}

double mean(const std::vector<std::size_t>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST(Topology, ShapesAndWeightBounds)
{
    const auto t = build_topology(small_config(1));
    EXPECT_EQ(t.w_pe.rows(), 40u);
    EXPECT_EQ(t.w_pe.cols(), 120u);
    EXPECT_EQ(t.w_ee.rows(), 120u);
    EXPECT_EQ(t.w_ei.cols(), 30u);
    EXPECT_EQ(t.w_ie.rows(), 30u);
    EXPECT_EQ(t.w_ii.cols(), 30u);
    auto check = [](const sparse_matrix& m, double bound) {
        for (const auto& e : m.triplets()) {
            EXPECT_GT(e.value, 0.0);
            EXPECT_LE(e.value, bound);
        }
    };
    check(t.w_pe, 0.6);
    check(t.w_ee, 0.05);
    check(t.w_ei, 0.25);
    check(t.w_ie, 0.3);
    check(t.w_ii, 0.01);
}

TEST(Topology, RecurrentSupportFollowsTwoHopPaths)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto t = build_topology(small_config(seed));
        // E->E only where some inhibitory neuron links both ends; I->I likewise.
        for (const auto& e : t.w_ee.triplets()) {
            EXPECT_NE(e.row, e.col);
            bool path = false;
            for (auto k : t.w_ei.row_cols(e.row)) path = path || t.w_ie.at(k, e.col) != 0.0;
            EXPECT_TRUE(path) << e.row << "->" << e.col;
        }
        for (const auto& e : t.w_ii.triplets()) {
            bool path = false;
            for (auto k : t.w_ie.row_cols(e.row)) path = path || t.w_ei.at(k, e.col) != 0.0;
            EXPECT_TRUE(path) << e.row << "->" << e.col;
        }
    }
}

TEST(Topology, MeanFanInMatchesConnectivity)
{
    double in = 0, ei = 0, ie = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        topology_config c;
        c.n_input = 200;
        c.n_exc = 1000;
        c.n_inh = 250;
        c.k_in = 4;
        c.c_rec = 4;
        c.seed = static_cast<std::uint64_t>(s);
        const auto t = build_topology(c);
        in += mean(t.w_pe.col_counts());
        ei += mean(t.w_ei.col_counts());
        ie += mean(t.w_ie.col_counts());
    }
    EXPECT_NEAR(in / seeds, 4.0, 0.8);
    EXPECT_NEAR(ei / seeds, 4.0, 0.8);
    EXPECT_NEAR(ie / seeds, 4.0, 0.8);
}

TEST(Topology, SameSeedSameLiquid)
{
    EXPECT_EQ(build_topology(small_config(3)), build_topology(small_config(3)));
    EXPECT_FALSE(build_topology(small_config(3)) == build_topology(small_config(4)));
}

TEST(Topology, RejectsImpossibleProbabilities)
{
    auto c = small_config(1);
    c.k_in = 41;
    EXPECT_THROW(build_topology(c), std::invalid_argument);
    c = small_config(1);
    c.c_rec = 31;
    EXPECT_THROW(build_topology(c), std::invalid_argument);
    c = small_config(1);
    c.beta_ee = 0;
    EXPECT_THROW(build_topology(c), std::invalid_argument);
}

TEST(Topology, NoRecurrenceWhenCrecIsZero)
{
    auto c = small_config(1);
    c.c_rec = 0;
    const auto t = build_topology(c);
    EXPECT_EQ(t.w_ee.nnz() + t.w_ei.nnz() + t.w_ie.nnz() + t.w_ii.nnz(), 0u);
}

TEST(SignedMatrix, AgreesWithEntryLookups)
{
    const auto t = build_topology(small_config(2));
    const auto m = signed_matrix(t);
    const std::size_t ne = t.n_exc(), ni = t.n_inh();
    ASSERT_EQ(m.rows(), static_cast<Eigen::Index>(ne + ni));
    for (std::size_t post = 0; post < ne + ni; ++post)
        for (std::size_t pre = 0; pre < ne + ni; ++pre) {
            double expect = 0.0;
            if (pre < ne && post < ne) expect = t.w_ee.at(pre, post);
            if (pre < ne && post >= ne) expect = t.w_ei.at(pre, post - ne);
            if (pre >= ne && post < ne) expect = -t.w_ie.at(pre - ne, post);
            if (pre >= ne && post >= ne) expect = -t.w_ii.at(pre - ne, post - ne);
            ASSERT_EQ(m(static_cast<Eigen::Index>(post), static_cast<Eigen::Index>(pre)), expect);
        }
}

TEST(Step, SuprathresholdInputSpikesAndResets)
{
    const auto t = hand_topology(1, 1, 1, {{0, 0, 0.6}}, {}, {}, {}, {});
    const liquid_params p;
    auto s = liquid_state::at_rest(t, p);
    const std::vector<char> on{1}, off{0};
    step(t, p, s, on);
    EXPECT_EQ(s.spikes_exc[0], 1);
    EXPECT_DOUBLE_EQ(s.v[0], 0.0);
    EXPECT_EQ(s.refrac_remaining[0], 1);
    // refractory: the next input is discarded
    step(t, p, s, on);
    EXPECT_EQ(s.spikes_exc[0], 0);
    EXPECT_DOUBLE_EQ(s.v[0], 0.0);
    step(t, p, s, on);
    EXPECT_EQ(s.spikes_exc[0], 1);
    EXPECT_EQ(s.exc_spike_counts[0], 2u);
}

TEST(Step, SubthresholdPotentialLeaks)
{
    const auto t = hand_topology(1, 1, 1, {{0, 0, 0.4}}, {}, {}, {}, {});
    const liquid_params p;
    auto s = liquid_state::at_rest(t, p);
    step(t, p, s, std::vector<char>{1});
    EXPECT_DOUBLE_EQ(s.v[0], 0.4);
    step(t, p, s, std::vector<char>{0});
    EXPECT_NEAR(s.v[0], 0.38, 1e-15);
    step(t, p, s, std::vector<char>{0});
    EXPECT_NEAR(s.v[0], 0.361, 1e-15);
}

TEST(Step, RecurrentSpikesArriveOneStepLaterWithSign)
{
    // input -> e0; e0 -> i0 (0.7); i0 -> e1 (0.2); e0 -> e1 (0.1)
    const auto t = hand_topology(1, 2, 1, {{0, 0, 0.6}}, {{0, 1, 0.1}}, {{0, 0, 0.7}}, {{0, 1, 0.2}}, {});
    const liquid_params p;
    auto s = liquid_state::at_rest(t, p);
    step(t, p, s, std::vector<char>{1});
    EXPECT_EQ(s.spikes_exc[0], 1);
    EXPECT_EQ(s.spikes_inh[0], 0);
    EXPECT_DOUBLE_EQ(s.v[1], 0.0);
    step(t, p, s, std::vector<char>{0});
    EXPECT_EQ(s.spikes_inh[0], 1);
    EXPECT_DOUBLE_EQ(s.v[1], 0.1);
    step(t, p, s, std::vector<char>{0});
    EXPECT_NEAR(s.v[1], 0.1 * 0.95 - 0.2, 1e-15);
}

TEST(Step, MatchesDenseReferenceSimulation)
{
    auto c = small_config(8);
    c.c_rec = 3;
    const auto t = build_topology(c);
    const liquid_params p;
    const auto w = signed_matrix(t);
    const auto n = static_cast<Eigen::Index>(t.n_neurons());
    const auto ne = static_cast<Eigen::Index>(t.n_exc());
    Eigen::MatrixXd win = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(t.n_input()));
    for (const auto& e : t.w_pe.triplets()) win(e.col, e.row) = e.value;

    auto s = liquid_state::at_rest(t, p);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n), spk = Eigen::VectorXd::Zero(n);
    Eigen::VectorXi refr = Eigen::VectorXi::Zero(n);
    const rate_vector rates{std::vector<double>(t.n_input(), 300.0), 300.0};
    rng_t rng(5);
    long total = 0;
    for (int k = 0; k < 300; ++k) {
        const auto in = poisson_step(rates, rng);
        Eigen::VectorXd x(static_cast<Eigen::Index>(in.size()));
        for (std::size_t i = 0; i < in.size(); ++i) x(static_cast<Eigen::Index>(i)) = in[i];
        const Eigen::VectorXd cur = win * x + w * spk;
        for (Eigen::Index i = 0; i < n; ++i) {
            spk(i) = 0;
            if (refr(i) > 0) {
                --refr(i);
                continue;
            }
            v(i) = v(i) + (0.0 - v(i)) / 20.0 + cur(i);
            if (v(i) >= 0.5) {
                spk(i) = 1;
                v(i) = 0;
                refr(i) = 1;
            }
        }
        step(t, p, s, in);
        for (Eigen::Index i = 0; i < n; ++i) {
            const char fired = i < ne ? s.spikes_exc[i] : s.spikes_inh[i - ne];
            ASSERT_EQ(fired, spk(i) != 0) << "step " << k << " neuron " << i;
            ASSERT_NEAR(s.v[i], v(i), 1e-12);
            total += fired;
        }
    }
    EXPECT_GT(total, 0);
}

TEST(Window, ActivationIsNormalizedAndReproducible)
{
    const auto t = build_topology(small_config(6));
    const liquid lsm{t, liquid_params{}, 100.0};
    const rate_vector rates{std::vector<double>(t.n_input(), 100.0), 100.0};
    rng_t a(1), b(1);
    auto sa = lsm.rest_state();
    auto sb = lsm.rest_state();
    for (int w = 0; w < 3; ++w) {
        const auto x = lsm.window(sa, rates, a);
        const auto y = lsm.window(sb, rates, b);
        EXPECT_EQ(x, y);
        ASSERT_EQ(x.size(), t.n_exc());
        for (double v : x.values) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Window, WithRefractoryStepBoundIsHalf)
{
    // A neuron can fire at most every other step with a 1 ms refractory period.
    const auto t = hand_topology(1, 1, 1, {{0, 0, 5.0}}, {}, {}, {}, {});
    liquid_state s = liquid_state::at_rest(t, liquid_params{});
    rng_t rng(1);
    const auto a = run_window(t, liquid_params{}, s, rate_vector{{1000.0}, 1000.0}, 100.0, rng);
    EXPECT_DOUBLE_EQ(a.values[0], 0.5);
}

TEST(Window, SilentInputKeepsRestingLiquidSilent)
{
    const auto t = build_topology(small_config(2));
    auto s = liquid_state::at_rest(t, liquid_params{});
    rng_t rng(1);
    const auto a = run_window(t, liquid_params{}, s, rate_vector{std::vector<double>(t.n_input(), 0.0), 100.0}, 100.0,
                              rng);
    for (double v : a.values) EXPECT_EQ(v, 0.0);
}

TEST(Window, RejectsBadLengths)
{
    const auto t = build_topology(small_config(2));
    auto s = liquid_state::at_rest(t, liquid_params{});
    rng_t rng(1);
    const rate_vector rates{std::vector<double>(t.n_input(), 0.0), 100.0};
    EXPECT_THROW(run_window(t, liquid_params{}, s, rates, 0.0, rng), std::invalid_argument);
    EXPECT_THROW(run_window(t, liquid_params{}, s, rates, 10.5, rng), std::invalid_argument);
    EXPECT_THROW(run_window(t, liquid_params{}, s, rate_vector{{1.0}, 100.0}, 100.0, rng), std::invalid_argument);
}

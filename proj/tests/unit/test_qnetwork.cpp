#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fran/qnetwork.hpp"
#include "support.hpp"

using namespace fran;

namespace {

double batch_loss(const QNetwork& net, const Eigen::MatrixXd& X, const std::vector<int>& a, const Eigen::VectorXd& y)
{
    double sum = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double r = net.forward(X.col(j))(a[j]) - y(j);
        sum += r * r;
    }
    return sum / static_cast<double>(X.cols());
}

struct Batch {
    Eigen::MatrixXd X;
    std::vector<int> actions;
    Eigen::VectorXd targets;
};

Batch random_batch(const QNetwork& net, int n, Rng& rng)
{
    std::normal_distribution<double> n01;
    Batch b;
    b.X = Eigen::MatrixXd::NullaryExpr(net.input_size(), n, [&] { return n01(rng); });
    for (int i = 0; i < n; ++i) b.actions.push_back(std::uniform_int_distribution<int>(0, net.output_size() - 1)(rng));
    b.targets = Eigen::VectorXd::NullaryExpr(n, [&] { return n01(rng); });
    return b;
}

} // namespace

TEST(QNetwork, ZeroNetworkOutputsZero)
{
    const QNetwork net({14, 24, 24, 96});
    EXPECT_EQ(net.forward(Eigen::VectorXd::Ones(14)), Eigen::VectorXd::Zero(96));
    EXPECT_THROW(net.forward(Eigen::VectorXd::Ones(13)), std::invalid_argument);
}

TEST(QNetwork, PositivePathComposesLinearMaps)
{
    QNetwork net({2, 2, 1});
    net.layers()[0].W << 1.0, 2.0, 0.5, 1.0;
    net.layers()[0].b << 0.1, 0.2;
    net.layers()[1].W << 3.0, -1.0;
    net.layers()[1].b << 0.5;
    const Eigen::Vector2d x(1.0, 2.0);
    // hidden = (5.1, 2.7), output = 15.3 - 2.7 + 0.5
    EXPECT_NEAR(net.forward(x)(0), 13.1, 1e-12);
    EXPECT_EQ(net.forward(x), net.forward(x));
}

TEST(QNetwork, InitialisationRangeAndDeterminism)
{
    Rng r1(3), r2(3);
    const QNetwork a = QNetwork::random({14, 24, 24, 96}, r1), b = QNetwork::random({14, 24, 24, 96}, r2);
    for (std::size_t l = 0; l < a.layers().size(); ++l) {
        const auto& W = a.layers()[l].W;
        const double bound = std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
        EXPECT_LE(W.cwiseAbs().maxCoeff(), bound);
        EXPECT_EQ(a.layers()[l].b, Eigen::VectorXd::Zero(W.rows()));
        EXPECT_EQ(W, b.layers()[l].W);
    }
}

TEST(QNetwork, BatchForwardMatchesColumns)
{
    Rng rng(8);
    const QNetwork net = QNetwork::random({5, 7, 3}, rng);
    const Batch b = random_batch(net, 4, rng);
    const Eigen::MatrixXd Q = net.forward_batch(b.X);
    for (int j = 0; j < 4; ++j) EXPECT_TRUE(Q.col(j).isApprox(net.forward(b.X.col(j)), 1e-14));
}

TEST(Gradients, MatchCentralFiniteDifferences)
{
    Rng rng(21);
    const double h = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        QNetwork net = QNetwork::random({6, 8, 8, 5}, rng);
        for (auto& L : net.layers()) L.b.setRandom();
        const Batch b = random_batch(net, 7, rng);
        const LossAndGradients g = gradients(net, b.X, b.actions, b.targets);
        EXPECT_NEAR(g.loss, batch_loss(net, b.X, b.actions, b.targets), 1e-12);
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            auto check = [&](double& param, double analytic) {
                const double keep = param;
                param = keep + h;
                const double up = batch_loss(net, b.X, b.actions, b.targets);
                param = keep - h;
                const double down = batch_loss(net, b.X, b.actions, b.targets);
                param = keep;
                const double numeric = (up - down) / (2 * h);
                const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
                EXPECT_LT(std::abs(analytic - numeric) / scale, 1e-4);
            };
            auto& L = net.layers()[l];
            for (Eigen::Index i = 0; i < L.W.size(); ++i) check(L.W.data()[i], g.grads[l].W.data()[i]);
            for (Eigen::Index i = 0; i < L.b.size(); ++i) check(L.b(i), g.grads[l].b(i));
        }
    }
}

TEST(Gradients, ZeroWhenTargetsEqualPredictions)
{
    Rng rng(2);
    const QNetwork net = QNetwork::random({4, 6, 3}, rng);
    Batch b = random_batch(net, 5, rng);
    for (int j = 0; j < 5; ++j) b.targets(j) = net.forward(b.X.col(j))(b.actions[j]);
    const LossAndGradients g = gradients(net, b.X, b.actions, b.targets);
    EXPECT_EQ(g.loss, 0.0);
    for (const auto& L : g.grads) {
        EXPECT_EQ(L.W.cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(L.b.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Gradients, ScaleLinearlyWithResiduals)
{
    Rng rng(12);
    const QNetwork net = QNetwork::random({4, 6, 3}, rng, Activation::identity);
    const Batch b = random_batch(net, 5, rng);
    Eigen::VectorXd pred(5);
    for (int j = 0; j < 5; ++j) pred(j) = net.forward(b.X.col(j))(b.actions[j]);
    const Eigen::VectorXd y3 = pred + 3.0 * (b.targets - pred);
    const LossAndGradients g1 = gradients(net, b.X, b.actions, b.targets);
    const LossAndGradients g3 = gradients(net, b.X, b.actions, y3);
    for (std::size_t l = 0; l < g1.grads.size(); ++l) {
        EXPECT_TRUE(g3.grads[l].W.isApprox(3.0 * g1.grads[l].W, 1e-12));
        EXPECT_TRUE(g3.grads[l].b.isApprox(3.0 * g1.grads[l].b, 1e-12));
    }
}

TEST(Adam, ZeroGradientLeavesParameters)
{
    Rng rng(1);
    QNetwork net = QNetwork::random({3, 4, 2}, rng);
    const QNetwork before = net;
    AdamState opt = make_adam(net, 1e-4);
    adam_step(net, zero_gradients(net), opt);
    EXPECT_EQ(opt.step_count, 1);
    for (std::size_t l = 0; l < net.layers().size(); ++l) EXPECT_EQ(net.layers()[l].W, before.layers()[l].W);
}

TEST(Adam, FirstStepMovesBySignTimesRate)
{
    Rng rng(1);
    QNetwork net = QNetwork::random({3, 4, 2}, rng);
    const QNetwork before = net;
    Gradients g = zero_gradients(net);
    std::normal_distribution<double> n01;
    for (auto& L : g) {
        L.W = L.W.unaryExpr([&](double) { return n01(rng); });
        L.b = L.b.unaryExpr([&](double) { return n01(rng); });
    }
    AdamState opt = make_adam(net, 1e-4);
    adam_step(net, g, opt);
    for (std::size_t l = 0; l < g.size(); ++l)
        for (Eigen::Index i = 0; i < g[l].W.size(); ++i) {
            const double moved = net.layers()[l].W.data()[i] - before.layers()[l].W.data()[i];
            EXPECT_NEAR(moved, -1e-4 * (g[l].W.data()[i] > 0 ? 1.0 : -1.0), 1e-6);
        }
}

TEST(Adam, TwoStepsMatchScalarRecurrence)
{
    QNetwork net({1, 1});
    net.layers()[0].W(0, 0) = 0.5;
    AdamState opt = make_adam(net, 1e-3);
    const double grads[2] = {0.3, -1.2};
    double w = 0.5, m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
        Gradients g = zero_gradients(net);
        g[0].W(0, 0) = grads[t - 1];
        adam_step(net, g, opt);
        m = 0.9 * m + 0.1 * grads[t - 1];
        v = 0.999 * v + 0.001 * grads[t - 1] * grads[t - 1];
        const double mhat = m / (1 - std::pow(0.9, t)), vhat = v / (1 - std::pow(0.999, t));
        w -= 1e-3 * mhat / (std::sqrt(vhat) + 1e-8);
    }
    EXPECT_NEAR(net.layers()[0].W(0, 0), w, 1e-15);
    EXPECT_EQ(opt.step_count, 2);
}

TEST(Checkpoint, RoundTripIsBitExact)
{
    Rng rng(5);
    QNetwork net = QNetwork::random({14, 24, 24, 96}, rng);
    for (auto& L : net.layers()) L.b.setRandom();
    AdamState opt = make_adam(net);
    Gradients g = zero_gradients(net);
    g[0].W.setConstant(0.25);
    adam_step(net, g, opt);
    const std::string path = fran::testing::scratch_dir("ckpt") + "/net.json";
    save_checkpoint(path, {net, opt, "abc", "full"});
    const Checkpoint back = load_checkpoint(path);
    EXPECT_EQ(back.fingerprint, "abc");
    EXPECT_EQ(back.action_space, "full");
    ASSERT_TRUE(back.adam.has_value());
    EXPECT_EQ(back.adam->step_count, 1);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 100; ++i) {
        const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(14, [&] { return n01(rng); });
        EXPECT_EQ(net.forward(x), back.net.forward(x));
    }
}

TEST(Checkpoint, TruncatedOrWrongVersionFails)
{
    Rng rng(5);
    const QNetwork net = QNetwork::random({4, 3, 2}, rng);
    const std::string dir = fran::testing::scratch_dir("ckpt_bad");
    save_checkpoint(dir + "/net.json", {net, std::nullopt, "x", "full"});
    const std::string text = read_text_file(dir + "/net.json");
    std::ofstream(dir + "/cut.json") << text.substr(0, text.size() / 2);
    EXPECT_THROW(load_checkpoint(dir + "/cut.json"), std::runtime_error);
    std::string other = text;
    other.replace(other.find("\"version\":1"), 11, "\"version\":9");
    std::ofstream(dir + "/v9.json") << other;
    EXPECT_THROW(load_checkpoint(dir + "/v9.json"), std::runtime_error);
    EXPECT_THROW(load_checkpoint(dir + "/missing.json"), std::runtime_error);
}

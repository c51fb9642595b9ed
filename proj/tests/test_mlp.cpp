#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "mlp.hpp"
#include "oracles.hpp"

using namespace purelab;

namespace {

// scalar l2^2 loss of the batch output against a fixed target
double loss_of(const Mlp& net, const Mat& X, const Mat& target) {
    Mat Y;
    net.forward(X, Y);
    double s = 0.0;
    for (std::size_t i = 0; i < Y.a.size(); ++i) {
        const double d = Y.a[i] - target.a[i];
        s += d * d;
    }
    return s;
}

}  // namespace

TEST_CASE("single linear layer gradient has the hand-derived closed form") {
    Rng rng(3);
    Mlp net = Mlp::random({1, 1}, Activation::Tanh, rng);  // one layer, no hidden activation
    const double w = net.params()[0];
    const double b = net.params()[1];
    const double x = 0.7, y = -0.4;

    Mat X(1, 1);
    X.at(0, 0) = x;
    Mlp::Cache cache;
    Mat Y;
    net.forward(X, Y, &cache);
    Mat dY(1, 1);
    dY.at(0, 0) = 2.0 * (Y.at(0, 0) - y);  // d/dout of (out - y)^2
    std::vector<double> grads;
    net.backward(cache, dY, grads);

    CHECK(grads[0] == doctest::Approx(2.0 * (w * x + b - y) * x).epsilon(1e-14));
    CHECK(grads[1] == doctest::Approx(2.0 * (w * x + b - y)).epsilon(1e-14));
}

TEST_CASE("zero output cotangent gives zero parameter gradients") {
    Rng rng(5);
    Mlp net = Mlp::random({3, 16, 2}, Activation::Tanh, rng);
    Mat X(4, 3);
    for (auto& v : X.a) v = rng.next_gaussian();
    Mlp::Cache cache;
    Mat Y;
    net.forward(X, Y, &cache);
    Mat dY(4, 2);
    std::vector<double> grads;
    net.backward(cache, dY, grads);
    for (double g : grads) CHECK(g == 0.0);
}

TEST_CASE("backward on 100 random coordinates matches finite differences") {
    for (Activation act : {Activation::Tanh, Activation::Relu}) {
        Rng rng(11);
        Mlp net = Mlp::random({4, 32, 32, 3}, act, rng);
        Mat X(8, 4);
        Mat target(8, 3);
        for (auto& v : X.a) v = rng.next_gaussian();
        for (auto& v : target.a) v = rng.next_gaussian();

        Mlp::Cache cache;
        Mat Y;
        net.forward(X, Y, &cache);
        Mat dY(8, 3);
        for (std::size_t i = 0; i < Y.a.size(); ++i) dY.a[i] = 2.0 * (Y.a[i] - target.a[i]);
        std::vector<double> grads;
        net.backward(cache, dY, grads);

        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t idx = rng.next_below(net.param_count());
            Mlp probe = net;
            auto p = probe.mutable_params();
            const double h = 1e-6 * std::max(1.0, std::abs(p[idx]));
            const double orig = p[idx];
            p[idx] = orig + h;
            const double up = loss_of(probe, X, target);
            p[idx] = orig - h;
            const double dn = loss_of(probe, X, target);
            const double fd = (up - dn) / (2.0 * h);
            const double denom = std::max({std::abs(fd), std::abs(grads[idx]), 1e-6});
            CHECK(std::abs(fd - grads[idx]) / denom <= 1e-5);
        }
    }
}

TEST_CASE("stale cache is rejected") {
    Rng rng(13);
    Mlp net = Mlp::random({2, 8, 1}, Activation::Tanh, rng);
    Mat X(1, 2);
    X.at(0, 0) = 0.3;
    X.at(0, 1) = -0.2;
    Mlp::Cache cache;
    Mat Y;
    net.forward(X, Y, &cache);
    net.mutable_params()[0] += 0.1;  // invalidates the cache
    Mat dY(1, 1);
    dY.at(0, 0) = 1.0;
    std::vector<double> grads;
    CHECK_THROWS_AS(net.backward(cache, dY, grads), Error);
}

TEST_CASE("forward is deterministic") {
    Rng rng(17);
    Mlp net = Mlp::random({3, 24, 2}, Activation::Tanh, rng);
    Vec x = {0.2, -1.0, 0.5}, y1(2), y2(2);
    net.forward_one(x, y1);
    net.forward_one(x, y2);
    CHECK(y1[0] == y2[0]);
    CHECK(y1[1] == y2[1]);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
    Rng rng(19);
    Mlp net = Mlp::random({2, 4, 1}, Activation::Tanh, rng);
    const std::vector<double> before(net.params().begin(), net.params().end());
    AdamState adam(net.param_count(), 0.01);
    std::vector<double> zeros(net.param_count(), 0.0);
    adam.apply(net.mutable_params(), zeros);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(net.params()[i] == before[i]);
}

TEST_CASE("adam: first step moves by about lr in the gradient sign") {
    std::vector<double> p = {1.0};
    AdamState adam(1, 0.05);
    adam.apply(p, std::vector<double>{3.7});
    CHECK(p[0] == doctest::Approx(1.0 - 0.05).epsilon(1e-4));
    std::vector<double> q = {1.0};
    AdamState adam2(1, 0.05);
    adam2.apply(q, std::vector<double>{-0.002});
    CHECK(q[0] == doctest::Approx(1.0 + 0.05).epsilon(1e-3));
}

TEST_CASE("adam: drives a convex quadratic to the optimum") {
    // f(x) = sum a_i (x_i - c_i)^2 in 10 dims
    Rng rng(23);
    std::vector<double> a(10), c(10), x(10, 0.0);
    for (int i = 0; i < 10; ++i) {
        a[i] = 0.5 + rng.next_double();
        c[i] = 2.0 * rng.next_gaussian();
    }
    AdamState adam(10, 0.05);
    std::vector<double> g(10);
    for (int it = 0; it < 2000; ++it) {
        for (int i = 0; i < 10; ++i) g[i] = 2.0 * a[i] * (x[i] - c[i]);
        adam.apply(x, g);
    }
    double f = 0.0;
    for (int i = 0; i < 10; ++i) f += a[i] * (x[i] - c[i]) * (x[i] - c[i]);
    CHECK(f <= 1e-6);
}

TEST_CASE("adam: non-finite gradient raises and skips the update") {
    std::vector<double> p = {1.0, 2.0};
    AdamState adam(2, 0.1);
    std::vector<double> g = {0.5, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(adam.apply(p, g), Error);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 2.0);
    CHECK(adam.step == 0);
}

TEST_CASE("ema shadow tracks the live parameters") {
    EmaShadow ema(0.9, std::vector<double>{1.0});
    ema.update(std::vector<double>{2.0});
    CHECK(ema.params[0] == doctest::Approx(1.1).epsilon(1e-15));
    ema.update(std::vector<double>{2.0});
    CHECK(ema.params[0] == doctest::Approx(1.19).epsilon(1e-12));
}

#include <cmath>
#include <cstdio>
#include <fstream>

#include "consistency_net.hpp"
#include "doctest.h"
#include "error.hpp"
#include "oracles.hpp"

using namespace purelab;

namespace {

ConsistencyNet default_net(std::uint64_t seed = 2) {
    Rng rng(seed);
    return ConsistencyNet::create(1, 3, 128, Activation::Tanh, 0.5, 0.002, rng);
}

}  // namespace

TEST_CASE("boundary identity D(x, t_min) = x is exact for arbitrary parameters") {
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        ConsistencyNet net = default_net(seed);
        Rng rng(seed + 100);
        for (int rep = 0; rep < 50; ++rep) {
            const double x = 5.0 * rng.next_gaussian();
            CHECK(net.forward({&x, 1}, 0.002)[0] == x);
        }
    }
}

TEST_CASE("zero final layer reduces to c_skip(t) * x") {
    ConsistencyNet net = default_net();
    auto params = net.mlp().mutable_params();
    const auto& last = net.mlp().layers().back();
    for (std::size_t i = last.w_off; i < net.mlp().param_count(); ++i) params[i] = 0.0;
    const double x = 1.3;
    for (double t : {0.01, 0.5, 2.0, 40.0}) {
        CHECK(net.forward({&x, 1}, t)[0] ==
              doctest::Approx(net.c_skip(t) * x).epsilon(1e-15));
    }
}

TEST_CASE("skip coefficients behave at the boundary") {
    ConsistencyNet net = default_net();
    CHECK(net.c_skip(0.002) == 1.0);
    CHECK(net.c_out(0.002) == 0.0);
    CHECK(net.c_skip(1.0) < 1.0);
    CHECK(net.c_out(1.0) > 0.0);
}

TEST_CASE("forward is deterministic and finite") {
    ConsistencyNet net = default_net();
    const double x = 0.37;
    const double a = net.forward({&x, 1}, 0.8)[0];
    const double b = net.forward({&x, 1}, 0.8)[0];
    CHECK(a == b);
    CHECK(std::isfinite(a));
}

TEST_CASE("forward validates inputs") {
    ConsistencyNet net = default_net();
    const Vec bad = {0.1, 0.2};
    CHECK_THROWS_AS(net.forward(bad, 0.5), Error);
    const double x = 0.1;
    CHECK_THROWS_AS(net.forward({&x, 1}, 1e-4), Error);  // below t_min
}

TEST_CASE("checkpoint round trip is bit-exact, including the file bytes") {
    ConsistencyNet net = default_net(7);
    const std::string path = "ckpt_roundtrip.bin";
    net.save(path);
    ConsistencyNet loaded = ConsistencyNet::load(path);
    CHECK(loaded.param_hash() == net.param_hash());
    CHECK(loaded.data_dim() == net.data_dim());
    CHECK(loaded.t_min() == net.t_min());
    CHECK(loaded.sigma_data() == net.sigma_data());

    const std::string path2 = "ckpt_roundtrip2.bin";
    loaded.save(path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    CHECK(!b1.empty());
    std::remove(path.c_str());
    std::remove(path2.c_str());

    const double x = -0.83;
    CHECK(net.forward({&x, 1}, 0.73)[0] == loaded.forward({&x, 1}, 0.73)[0]);
}

TEST_CASE("loading a non-checkpoint fails cleanly") {
    const std::string path = "not_a_ckpt.bin";
    std::ofstream(path) << "hello";
    CHECK_THROWS_AS(ConsistencyNet::load(path), Error);
    std::remove(path.c_str());
}

#include <cmath>
#include <memory>

#include "doctest.h"
#include "error.hpp"
#include "oracles.hpp"
#include "smoothing.hpp"
#include "stats.hpp"

using namespace purelab;

namespace {

const KarrasGrid kGrid = build_grid(0.002, 80.0, 7.0, 18);

std::shared_ptr<const MixtureDistribution> two_dirac() {
    return std::make_shared<const MixtureDistribution>(MixtureDistribution::two_dirac());
}

Classifier two_dirac_classifier() {
    return Classifier::nearest_centroid({{-1.0}, {1.0}}, {0, 1});
}

}  // namespace

TEST_CASE("classifiers are deterministic and tie-break to the lower label") {
    const auto nc = Classifier::nearest_centroid({{-1.0}, {1.0}}, {0, 1});
    const Vec mid = {0.0};
    CHECK(nc.classify(mid) == 0);
    const Vec right = {0.2};
    CHECK(nc.classify(right) == 1);

    const auto lg = Classifier::logistic({2.0}, -1.0, 3, 7);
    const Vec a = {0.0};
    CHECK(lg.classify(a) == 3);
    const Vec b = {1.0};
    CHECK(lg.classify(b) == 7);

    Rng rng(5);
    auto mlp = std::make_shared<const Mlp>(Mlp::random({2, 8, 3}, Activation::Tanh, rng));
    const auto mc = Classifier::mlp_argmax(mlp, {0, 1, 2});
    const Vec x = {0.3, -0.4};
    CHECK(mc.classify(x) == mc.classify(x));
}

TEST_CASE("predict: clean point certifies to its own label") {
    const auto dist = two_dirac();
    const auto purifier = Purifier::consistency_oracle(dist);
    const auto clf = two_dirac_classifier();
    const Vec x = {1.0};
    const int label = predict(purifier, clf, x, 0.25, 100, 0.001, kGrid, 1234);
    CHECK(label == 1);
}

TEST_CASE("predict: constant classifier always wins") {
    const auto dist = two_dirac();
    const auto purifier = Purifier::onestep_posterior_mean(dist);
    const auto clf = Classifier::nearest_centroid({{0.0}}, {9});
    const Vec x = {-1.0};
    CHECK(predict(purifier, clf, x, 0.5, 50, 0.001, kGrid, 7) == 9);
}

TEST_CASE("predict: symmetric point abstains almost always") {
    const auto dist = two_dirac();
    const auto purifier = Purifier::consistency_oracle(dist);
    const auto clf = two_dirac_classifier();
    const Vec x = {0.0};
    int abstained = 0;
    for (int s = 0; s < 20; ++s) {
        if (predict(purifier, clf, x, 0.5, 100, 0.001, kGrid, 1000 + s) == kAbstain) ++abstained;
    }
    CHECK(abstained >= 18);
}

TEST_CASE("certified radius composes sigma with the normal quantile") {
    SUBCASE("all votes for the top label") {
        std::map<int, std::int64_t> counts0{{1, 90}, {0, 10}};
        std::map<int, std::int64_t> counts{{1, 10000}};
        const auto out = certify_from_counts(counts0, counts, 10000, 0.5, 0.001);
        CHECK(out.prediction == 1);
        const double expected =
            0.5 * inverse_normal_cdf(clopper_pearson_lower(10000, 10000, 0.001));
        CHECK(out.radius == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("injected p_a_lower = Phi(1) gives radius sigma") {
        const double p = oracle::normal_cdf(1.0);
        CHECK(std::abs(certified_radius(0.5, p) - 0.5) <= 1e-6);
        CHECK(std::abs(certified_radius(2.0, p) - 2.0) <= 1e-6);
    }
    SUBCASE("radius is monotone in p and linear in sigma") {
        double prev = 0.0;
        for (double p : {0.55, 0.7, 0.9, 0.99}) {
            const double r = certified_radius(1.0, p);
            CHECK(r > prev);
            CHECK(certified_radius(0.25, p) == doctest::Approx(0.25 * r).epsilon(1e-12));
            prev = r;
        }
    }
}

TEST_CASE("certify: split counts abstain") {
    std::map<int, std::int64_t> counts0{{0, 60}, {1, 40}};
    std::map<int, std::int64_t> counts{{0, 5000}, {1, 5000}};
    const auto out = certify_from_counts(counts0, counts, 10000, 0.5, 0.001);
    CHECK(out.prediction == kAbstain);
    CHECK(out.radius == 0.0);
    CHECK(out.p_a_lower <= 0.5);
}

TEST_CASE("certify: end-to-end on a clean two-dirac point") {
    const auto dist = two_dirac();
    const auto purifier = Purifier::consistency_oracle(dist);
    const auto clf = two_dirac_classifier();
    const Vec x = {1.0};
    const auto out = certify(purifier, clf, x, 0.25, 100, 1000, 0.001, kGrid, 99);
    CHECK(out.prediction == 1);
    CHECK(out.radius > 0.25);
    std::int64_t total = 0;
    for (const auto& [label, c] : out.counts) total += c;
    CHECK(total == 1000);
    std::int64_t total0 = 0;
    for (const auto& [label, c] : out.counts0) total0 += c;
    CHECK(total0 == 100);
}

TEST_CASE("certify is bit-identical across worker counts") {
    const auto dist = two_dirac();
    const auto purifier = Purifier::reverse_sde(dist, 60);  // stochastic kind included
    const auto clf = two_dirac_classifier();
    const Vec x = {1.0};
    const auto a = certify(purifier, clf, x, 0.5, 50, 400, 0.001, kGrid, 4242, 1);
    const auto b = certify(purifier, clf, x, 0.5, 50, 400, 0.001, kGrid, 4242, 8);
    CHECK(a.prediction == b.prediction);
    CHECK(a.radius == b.radius);
    CHECK(a.p_a_lower == b.p_a_lower);
    CHECK(a.counts0 == b.counts0);
    CHECK(a.counts == b.counts);
}

TEST_CASE("certified accuracy curve") {
    SUBCASE("all correct with radius 1") {
        std::vector<CertifyOutcome> outs(3);
        for (auto& o : outs) {
            o.prediction = 1;
            o.radius = 1.0;
        }
        const std::vector<int> labels = {1, 1, 1};
        const std::vector<double> eps = {0.0, 0.5, 1.0};
        const auto acc = certified_accuracy_curve(outs, labels, eps);
        CHECK(acc == std::vector<double>{1.0, 1.0, 1.0});
    }
    SUBCASE("all abstain") {
        std::vector<CertifyOutcome> outs(4);
        const std::vector<int> labels = {0, 1, 0, 1};
        const std::vector<double> eps = {0.0, 0.5};
        const auto acc = certified_accuracy_curve(outs, labels, eps);
        CHECK(acc == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("mixed hand-computed table") {
        std::vector<CertifyOutcome> outs(4);
        outs[0].prediction = 1;
        outs[0].radius = 1.0;  // correct, big radius
        outs[1].prediction = 0;
        outs[1].radius = 0.4;  // correct, small radius
        outs[2].prediction = 1;
        outs[2].radius = 2.0;  // wrong label
        outs[3].prediction = kAbstain;
        outs[3].radius = 0.0;  // abstain
        const std::vector<int> labels = {1, 0, 0, 1};
        const std::vector<double> eps = {0.0, 0.5, 1.5};
        const auto acc = certified_accuracy_curve(outs, labels, eps);
        CHECK(acc[0] == doctest::Approx(0.5));   // outcomes 0 and 1
        CHECK(acc[1] == doctest::Approx(0.25));  // only outcome 0
        CHECK(acc[2] == doctest::Approx(0.0));
    }
    SUBCASE("empty input is a domain error") {
        const std::vector<CertifyOutcome> outs;
        const std::vector<int> labels;
        const std::vector<double> eps = {0.0};
        CHECK_THROWS_AS(certified_accuracy_curve(outs, labels, eps), Error);
    }
}

TEST_CASE("best over sigma takes the pointwise max") {
    const std::vector<std::vector<double>> curves = {{0.9, 0.5, 0.1}, {0.8, 0.6, 0.0}};
    CHECK(best_over_sigma(curves) == std::vector<double>{0.9, 0.6, 0.1});
}

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mlp.hpp"
#include "vecmath.hpp"

namespace purelab {

// Deterministic base classifiers for the smoothed pipeline. Ties resolve to
// the candidate with the lower label id.
class Classifier {
public:
    static Classifier nearest_centroid(std::vector<Vec> centers, std::vector<int> labels);
    static Classifier logistic(Vec weights, double bias, int label_neg, int label_pos);
    // argmax over logits of a small plain MLP; logit index i maps to labels[i]
    static Classifier mlp_argmax(std::shared_ptr<const Mlp> net, std::vector<int> labels);

    int classify(std::span<const double> x) const;
    const std::vector<int>& labels() const { return labels_; }

private:
    enum class Kind { NearestCentroid, Logistic, MlpArgmax };
    Kind kind_ = Kind::NearestCentroid;
    std::vector<Vec> centers_;
    std::vector<int> labels_;
    Vec weights_;
    double bias_ = 0.0;
    std::shared_ptr<const Mlp> net_;
};

}  // namespace purelab

#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "mlp.hpp"
#include "vecmath.hpp"

namespace purelab {

enum class LossKind { L1, L2, Feature };

// Fixed random 2-layer embedding, frozen at creation (hash recorded); the
// feature-space l2 distance stands in for a learned perceptual metric on
// low-dimensional data.
class FeatureMap {
public:
    static FeatureMap create(int in_dim, int hidden, int out_dim, std::uint64_t seed);

    int in_dim() const { return net_.in_dim(); }
    int out_dim() const { return net_.out_dim(); }
    std::uint64_t param_hash() const { return frozen_hash_; }

    Vec forward(std::span<const double> x) const;
    // J_phi(x)^T u for upstream cotangent u
    Vec input_vjp(std::span<const double> x, std::span<const double> u) const;

private:
    Mlp net_;
    std::uint64_t frozen_hash_ = 0;
};

// Distance used by training and by the perceptual-distance operation.
// kind == Feature requires a feature map whose in_dim matches the points.
class Loss {
public:
    explicit Loss(LossKind kind, std::shared_ptr<const FeatureMap> fmap = nullptr);

    LossKind kind() const { return kind_; }
    const FeatureMap* feature_map() const { return fmap_.get(); }

    double distance(std::span<const double> a, std::span<const double> b) const;
    // d distance(a, b) / d a
    Vec grad_a(std::span<const double> a, std::span<const double> b) const;

private:
    LossKind kind_;
    std::shared_ptr<const FeatureMap> fmap_;
};

double perceptual_distance(std::span<const double> a, std::span<const double> b, const Loss& loss);

}  // namespace purelab

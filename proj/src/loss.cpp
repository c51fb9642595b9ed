#include "loss.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace purelab {

FeatureMap FeatureMap::create(int in_dim, int hidden, int out_dim, std::uint64_t seed) {
    if (out_dim < 1) throw_invalid("feature map output dimension must be >= 1");
    FeatureMap fm;
    Rng rng(Rng::mix(seed ^ 0xfea79a3ull));
    fm.net_ = Mlp::random({in_dim, hidden, out_dim}, Activation::Tanh, rng);
    fm.frozen_hash_ = fm.net_.param_hash();
    return fm;
}

Vec FeatureMap::forward(std::span<const double> x) const {
    Vec out(net_.out_dim());
    net_.forward_one(x, out);
    return out;
}

Vec FeatureMap::input_vjp(std::span<const double> x, std::span<const double> u) const {
    Mat X(1, net_.in_dim());
    for (int i = 0; i < net_.in_dim(); ++i) X.at(0, i) = x[i];
    Mlp::Cache cache;
    Mat Y;
    net_.forward(X, Y, &cache);
    Mat dY(1, net_.out_dim());
    for (int i = 0; i < net_.out_dim(); ++i) dY.at(0, i) = u[i];
    std::vector<double> grads;
    Mat dX;
    net_.backward(cache, dY, grads, &dX);
    return Vec(dX.row(0), dX.row(0) + net_.in_dim());
}

Loss::Loss(LossKind kind, std::shared_ptr<const FeatureMap> fmap)
    : kind_(kind), fmap_(std::move(fmap)) {
    if (kind_ == LossKind::Feature && !fmap_)
        throw_invalid("feature loss requires a feature map");
}

double Loss::distance(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != b.size()) throw_domain("perceptual distance: dimension mismatch");
    switch (kind_) {
        case LossKind::L1: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
            return s;
        }
        case LossKind::L2:
            return euclidean_distance(a, b);
        case LossKind::Feature: {
            if (static_cast<int>(a.size()) != fmap_->in_dim())
                throw_domain("feature loss: dimension mismatch with feature map");
            const Vec fa = fmap_->forward(a);
            const Vec fb = fmap_->forward(b);
            return euclidean_distance(fa, fb);
        }
    }
    throw_invalid("unknown loss kind");
}

Vec Loss::grad_a(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != b.size()) throw_domain("perceptual distance: dimension mismatch");
    const std::size_t d = a.size();
    Vec g(d, 0.0);
    switch (kind_) {
        case LossKind::L1:
            for (std::size_t i = 0; i < d; ++i)
                g[i] = a[i] > b[i] ? 1.0 : (a[i] < b[i] ? -1.0 : 0.0);
            return g;
        case LossKind::L2: {
            const double dist = euclidean_distance(a, b);
            if (dist < 1e-300) return g;
            for (std::size_t i = 0; i < d; ++i) g[i] = (a[i] - b[i]) / dist;
            return g;
        }
        case LossKind::Feature: {
            const Vec fa = fmap_->forward(a);
            const Vec fb = fmap_->forward(b);
            const double dist = euclidean_distance(fa, fb);
            if (dist < 1e-300) return g;
            Vec u(fa.size());
            for (std::size_t i = 0; i < fa.size(); ++i) u[i] = (fa[i] - fb[i]) / dist;
            return fmap_->input_vjp(a, u);
        }
    }
    throw_invalid("unknown loss kind");
}

double perceptual_distance(std::span<const double> a, std::span<const double> b, const Loss& loss) {
    return loss.distance(a, b);
}

}  // namespace purelab

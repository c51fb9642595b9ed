#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rng.hpp"
#include "vecmath.hpp"

namespace purelab {

enum class Activation { Tanh, Relu };

// Plain fully-connected network in f64. Parameters live in one flat vector
// (weights row-major, then bias, layer by layer) so the optimizer, EMA copy,
// finite-difference checks and hashing all work on a single span. Hidden
// layers carry the activation; the output layer is linear.
class Mlp {
public:
    struct LayerShape {
        int out = 0;
        int in = 0;
        std::size_t w_off = 0;
        std::size_t b_off = 0;
    };

    Mlp() = default;
    static Mlp random(const std::vector<int>& layer_sizes, Activation act, Rng& rng);
    static Mlp zeros(const std::vector<int>& layer_sizes, Activation act);

    int in_dim() const { return layers_.front().in; }
    int out_dim() const { return layers_.back().out; }
    const std::vector<LayerShape>& layers() const { return layers_; }
    Activation activation() const { return act_; }

    std::span<const double> params() const { return theta_; }
    std::span<double> mutable_params() {
        ++version_;
        return theta_;
    }
    void set_params(std::span<const double> p);
    std::size_t param_count() const { return theta_.size(); }
    std::uint64_t version() const { return version_; }
    std::uint64_t param_hash() const { return hash_doubles(theta_); }

    // X: batch x in_dim. Fills Y (batch x out_dim). cache, if given, keeps
    // what backward() needs and is tied to the current parameter version.
    struct Cache {
        std::uint64_t version = 0;
        Mat X;
        std::vector<Mat> Z;  // pre-activations per layer
        std::vector<Mat> A;  // activations per hidden layer
    };
    void forward(const Mat& X, Mat& Y, Cache* cache = nullptr) const;

    // parameter gradients of a scalar loss given dL/dY; layout matches
    // params(). dX, if non-null, receives dL/dX.
    void backward(const Cache& cache, const Mat& dY, std::vector<double>& grads,
                  Mat* dX = nullptr) const;

    void forward_one(std::span<const double> x, std::span<double> y) const;

private:
    std::vector<LayerShape> layers_;
    std::vector<double> theta_;
    Activation act_ = Activation::Tanh;
    std::uint64_t version_ = 1;

    void init_shapes(const std::vector<int>& layer_sizes);
};

// bias-corrected adaptive-moment optimizer over a flat parameter vector
struct AdamState {
    std::int64_t step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_num = 1e-8;
    std::vector<double> m;
    std::vector<double> v;

    explicit AdamState(std::size_t n_params, double lr_ = 1e-3)
        : lr(lr_), m(n_params, 0.0), v(n_params, 0.0) {}

    // throws Errc::numeric on non-finite gradients; parameters are untouched
    void apply(std::span<double> params, std::span<const double> grads);
};

// exponential moving average of a flat parameter vector
struct EmaShadow {
    double decay = 0.999;
    std::vector<double> params;

    EmaShadow(double decay_, std::span<const double> init)
        : decay(decay_), params(init.begin(), init.end()) {}

    void update(std::span<const double> live);
};

}  // namespace purelab

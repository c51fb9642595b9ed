#include "mlp.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace purelab {

void Mlp::init_shapes(const std::vector<int>& layer_sizes) {
    if (layer_sizes.size() < 2) throw_invalid("mlp needs at least input and output sizes");
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        LayerShape s;
        s.in = layer_sizes[l];
        s.out = layer_sizes[l + 1];
        if (s.in <= 0 || s.out <= 0) throw_invalid("mlp layer sizes must be positive");
        s.w_off = off;
        off += static_cast<std::size_t>(s.out) * s.in;
        s.b_off = off;
        off += static_cast<std::size_t>(s.out);
        layers_.push_back(s);
    }
    theta_.assign(off, 0.0);
}

Mlp Mlp::random(const std::vector<int>& layer_sizes, Activation act, Rng& rng) {
    Mlp net;
    net.act_ = act;
    net.init_shapes(layer_sizes);
    for (const auto& s : net.layers_) {
        const double std_w = std::sqrt(1.0 / s.in);
        for (int i = 0; i < s.out * s.in; ++i)
            net.theta_[s.w_off + i] = std_w * rng.next_gaussian();
        // biases start at zero
    }
    return net;
}

Mlp Mlp::zeros(const std::vector<int>& layer_sizes, Activation act) {
    Mlp net;
    net.act_ = act;
    net.init_shapes(layer_sizes);
    return net;
}

void Mlp::set_params(std::span<const double> p) {
    if (p.size() != theta_.size()) throw_invalid("parameter vector size mismatch");
    theta_.assign(p.begin(), p.end());
    ++version_;
}

namespace {

inline double act_fwd(Activation a, double z) {
    return a == Activation::Tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

inline double act_bwd(Activation a, double z, double h) {
    // derivative expressed from pre-activation z and activation h
    return a == Activation::Tanh ? 1.0 - h * h : (z > 0.0 ? 1.0 : 0.0);
}

}  // namespace

void Mlp::forward(const Mat& X, Mat& Y, Cache* cache) const {
    if (X.cols != in_dim()) throw_domain("mlp forward: input dimension mismatch");
    const std::size_t n_layers = layers_.size();
    if (cache) {
        cache->version = version_;
        cache->X = X;
        cache->Z.assign(n_layers, Mat());
        cache->A.assign(n_layers, Mat());
    }
    Mat cur = X;
    Mat Wv, Z;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto& s = layers_[l];
        Wv.rows = s.out;
        Wv.cols = s.in;
        Wv.a.assign(theta_.begin() + s.w_off, theta_.begin() + s.w_off + std::size_t(s.out) * s.in);
        gemm_nt(cur, Wv, Z);
        const double* b = theta_.data() + s.b_off;
        for (int r = 0; r < Z.rows; ++r) {
            double* zr = Z.row(r);
            for (int j = 0; j < s.out; ++j) zr[j] += b[j];
        }
        if (cache) cache->Z[l] = Z;
        if (l + 1 < n_layers) {
            Mat A = Z;
            for (double& v : A.a) v = act_fwd(act_, v);
            if (cache) cache->A[l] = A;
            cur = std::move(A);
        } else {
            cur = Z;
        }
    }
    Y = std::move(cur);
}

void Mlp::backward(const Cache& cache, const Mat& dY, std::vector<double>& grads, Mat* dX) const {
    if (cache.version != version_)
        throw Error(Errc::contract, "mlp backward: cache is stale (parameters changed)");
    const std::size_t n_layers = layers_.size();
    grads.assign(theta_.size(), 0.0);

    Mat dZ = dY;
    Mat gW, dA, Wv;
    for (std::size_t li = n_layers; li-- > 0;) {
        const auto& s = layers_[li];
        if (li + 1 < n_layers) {
            // dZ currently holds dA of this layer's activations
            const Mat& Z = cache.Z[li];
            const Mat& A = cache.A[li];
            for (std::size_t i = 0; i < dZ.a.size(); ++i)
                dZ.a[i] *= act_bwd(act_, Z.a[i], A.a[i]);
        }
        const Mat& A_prev = (li == 0) ? cache.X : cache.A[li - 1];
        gemm_tn(dZ, A_prev, gW);  // out x in
        double* gw = grads.data() + s.w_off;
        for (std::size_t i = 0; i < gW.a.size(); ++i) gw[i] = gW.a[i];
        double* gb = grads.data() + s.b_off;
        for (int r = 0; r < dZ.rows; ++r) {
            const double* dr = dZ.row(r);
            for (int j = 0; j < s.out; ++j) gb[j] += dr[j];
        }
        if (li > 0 || dX) {
            Wv.rows = s.out;
            Wv.cols = s.in;
            Wv.a.assign(theta_.begin() + s.w_off,
                        theta_.begin() + s.w_off + std::size_t(s.out) * s.in);
            gemm_nn(dZ, Wv, dA);  // batch x in
            if (li > 0)
                dZ = std::move(dA);
            else if (dX)
                *dX = std::move(dA);
        }
    }
}

void Mlp::forward_one(std::span<const double> x, std::span<double> y) const {
    Mat X(1, in_dim());
    for (int i = 0; i < in_dim(); ++i) X.at(0, i) = x[i];
    Mat Y;
    forward(X, Y);
    for (int i = 0; i < out_dim(); ++i) y[i] = Y.at(0, i);
}

void AdamState::apply(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m.size() || grads.size() != m.size())
        throw_invalid("adam: size mismatch");
    for (double g : grads) {
        if (!std::isfinite(g))
            throw Error(Errc::numeric, "adam: non-finite gradient, update skipped");
    }
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps_num);
    }
}

void EmaShadow::update(std::span<const double> live) {
    if (live.size() != params.size()) throw_invalid("ema: size mismatch");
    for (std::size_t i = 0; i < params.size(); ++i)
        params[i] = decay * params[i] + (1.0 - decay) * live[i];
}

}  // namespace purelab

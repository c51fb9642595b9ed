#include "consistency_net.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "error.hpp"

namespace purelab {

void TimeEmbed::embed(double t, double* out) const {
    const double u = std::log(t);
    for (int k = 0; k < n_freq; ++k) {
        const double f =
            n_freq == 1 ? f_lo : f_lo * std::pow(f_hi / f_lo, static_cast<double>(k) / (n_freq - 1));
        out[2 * k] = std::sin(f * u);
        out[2 * k + 1] = std::cos(f * u);
    }
}

ConsistencyNet ConsistencyNet::create(int data_dim, int hidden_layers, int hidden_units,
                                      Activation act, double sigma_data, double t_min, Rng& rng) {
    if (data_dim < 1) throw_invalid("data_dim must be positive");
    if (hidden_layers < 1 || hidden_units < 1) throw_invalid("hidden sizes must be positive");
    if (!(sigma_data > 0.0)) throw_invalid("sigma_data must be positive");
    if (!(t_min > 0.0)) throw_invalid("t_min must be positive");
    ConsistencyNet net;
    net.data_dim_ = data_dim;
    net.hidden_layers_ = hidden_layers;
    net.hidden_units_ = hidden_units;
    net.sigma_data_ = sigma_data;
    net.t_min_ = t_min;
    std::vector<int> sizes;
    sizes.push_back(data_dim + net.embed_.dim());
    for (int l = 0; l < hidden_layers; ++l) sizes.push_back(hidden_units);
    sizes.push_back(data_dim);
    net.mlp_ = Mlp::random(sizes, act, rng);
    return net;
}

double ConsistencyNet::c_skip(double t) const {
    const double d = t - t_min_;
    const double s2 = sigma_data_ * sigma_data_;
    return s2 / (d * d + s2);
}

double ConsistencyNet::c_out(double t) const {
    const double d = t - t_min_;
    return sigma_data_ * d / std::sqrt(t * t + sigma_data_ * sigma_data_);
}

void ConsistencyNet::forward_into(std::span<const double> x, double t, std::span<double> out) const {
    if (static_cast<int>(x.size()) != data_dim_)
        throw_domain("consistency net: input dimension mismatch");
    if (t < t_min_) throw_domain("consistency net requires t >= t_min");
    Vec in(data_dim_ + embed_.dim());
    for (int i = 0; i < data_dim_; ++i) in[i] = x[i];
    embed_.embed(t, in.data() + data_dim_);
    Vec f(data_dim_);
    mlp_.forward_one(in, f);
    const double cs = c_skip(t);
    const double co = c_out(t);
    for (int i = 0; i < data_dim_; ++i) out[i] = cs * x[i] + co * f[i];
}

Vec ConsistencyNet::forward(std::span<const double> x, double t) const {
    Vec out(data_dim_);
    forward_into(x, t, out);
    return out;
}

Mat ConsistencyNet::assemble_input(const Mat& X, std::span<const double> ts) const {
    if (X.cols != data_dim_ || static_cast<std::size_t>(X.rows) != ts.size())
        throw_domain("assemble_input: shape mismatch");
    Mat in(X.rows, data_dim_ + embed_.dim());
    for (int r = 0; r < X.rows; ++r) {
        double* row = in.row(r);
        std::memcpy(row, X.row(r), sizeof(double) * data_dim_);
        embed_.embed(ts[r], row + data_dim_);
    }
    return in;
}

namespace {

constexpr char kMagic[8] = {'P', 'L', 'C', 'K', 'P', 'T', '0', '1'};

struct FileCloser {
    std::FILE* f;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

void write_u32(std::FILE* f, std::uint32_t v) { std::fwrite(&v, sizeof(v), 1, f); }
void write_f64(std::FILE* f, double v) { std::fwrite(&v, sizeof(v), 1, f); }

std::uint32_t read_u32(std::FILE* f) {
    std::uint32_t v = 0;
    if (std::fread(&v, sizeof(v), 1, f) != 1) throw Error(Errc::io, "checkpoint truncated");
    return v;
}

double read_f64(std::FILE* f) {
    double v = 0;
    if (std::fread(&v, sizeof(v), 1, f) != 1) throw Error(Errc::io, "checkpoint truncated");
    return v;
}

}  // namespace

void ConsistencyNet::save(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error(Errc::io, "cannot open checkpoint for writing: " + path);
    FileCloser closer{f};
    std::fwrite(kMagic, 1, sizeof(kMagic), f);
    write_u32(f, static_cast<std::uint32_t>(data_dim_));
    write_u32(f, static_cast<std::uint32_t>(hidden_layers_));
    write_u32(f, static_cast<std::uint32_t>(hidden_units_));
    write_u32(f, mlp_.activation() == Activation::Tanh ? 0u : 1u);
    write_u32(f, static_cast<std::uint32_t>(embed_.n_freq));
    write_f64(f, embed_.f_lo);
    write_f64(f, embed_.f_hi);
    write_f64(f, sigma_data_);
    write_f64(f, t_min_);
    const auto params = mlp_.params();
    write_u32(f, static_cast<std::uint32_t>(params.size()));
    if (std::fwrite(params.data(), sizeof(double), params.size(), f) != params.size())
        throw Error(Errc::io, "checkpoint write failed: " + path);
}

ConsistencyNet ConsistencyNet::load(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw Error(Errc::io, "cannot open checkpoint: " + path);
    FileCloser closer{f};
    char magic[8];
    if (std::fread(magic, 1, sizeof(magic), f) != sizeof(magic) ||
        std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error(Errc::io, "not a checkpoint file: " + path);
    ConsistencyNet net;
    net.data_dim_ = static_cast<int>(read_u32(f));
    net.hidden_layers_ = static_cast<int>(read_u32(f));
    net.hidden_units_ = static_cast<int>(read_u32(f));
    const Activation act = read_u32(f) == 0 ? Activation::Tanh : Activation::Relu;
    net.embed_.n_freq = static_cast<int>(read_u32(f));
    net.embed_.f_lo = read_f64(f);
    net.embed_.f_hi = read_f64(f);
    net.sigma_data_ = read_f64(f);
    net.t_min_ = read_f64(f);
    std::vector<int> sizes;
    sizes.push_back(net.data_dim_ + net.embed_.dim());
    for (int l = 0; l < net.hidden_layers_; ++l) sizes.push_back(net.hidden_units_);
    sizes.push_back(net.data_dim_);
    net.mlp_ = Mlp::zeros(sizes, act);
    const std::uint32_t count = read_u32(f);
    if (count != net.mlp_.param_count())
        throw Error(Errc::io, "checkpoint parameter count mismatch");
    std::vector<double> params(count);
    if (std::fread(params.data(), sizeof(double), count, f) != count)
        throw Error(Errc::io, "checkpoint truncated");
    net.mlp_.set_params(params);
    return net;
}

}  // namespace purelab

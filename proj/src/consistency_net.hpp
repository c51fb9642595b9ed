#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlp.hpp"
#include "rng.hpp"
#include "vecmath.hpp"

namespace purelab {

// sinusoidal conditioning on log t; frequencies geometric between f_lo and f_hi
struct TimeEmbed {
    int n_freq = 8;
    double f_lo = 1.0;
    double f_hi = 1000.0;

    int dim() const { return 2 * n_freq; }
    void embed(double t, double* out) const;
};

// Time-conditioned denoiser D(x, t) = c_skip(t) * x + c_out(t) * F(x, emb(t))
// with c_skip(t) = sd^2 / ((t - t_min)^2 + sd^2) and
// c_out(t) = sd * (t - t_min) / sqrt(t^2 + sd^2), so D(x, t_min) = x holds
// exactly for arbitrary parameters.
class ConsistencyNet {
public:
    ConsistencyNet() = default;
    static ConsistencyNet create(int data_dim, int hidden_layers, int hidden_units,
                                 Activation act, double sigma_data, double t_min, Rng& rng);

    int data_dim() const { return data_dim_; }
    double sigma_data() const { return sigma_data_; }
    double t_min() const { return t_min_; }
    const TimeEmbed& time_embed() const { return embed_; }
    Mlp& mlp() { return mlp_; }
    const Mlp& mlp() const { return mlp_; }

    double c_skip(double t) const;
    double c_out(double t) const;

    Vec forward(std::span<const double> x, double t) const;
    void forward_into(std::span<const double> x, double t, std::span<double> out) const;

    // batched helpers used by training: builds the MLP input rows [x | emb(t)]
    Mat assemble_input(const Mat& X, std::span<const double> ts) const;

    std::uint64_t param_hash() const { return mlp_.param_hash(); }

    // versioned binary checkpoint, byte-stable for identical parameters
    void save(const std::string& path) const;
    static ConsistencyNet load(const std::string& path);

private:
    Mlp mlp_;
    TimeEmbed embed_;
    int data_dim_ = 0;
    int hidden_layers_ = 0;
    int hidden_units_ = 0;
    double sigma_data_ = 0.5;
    double t_min_ = 0.002;
};

}  // namespace purelab

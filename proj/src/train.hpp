#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "consistency_net.hpp"
#include "loss.hpp"
#include "mixture.hpp"
#include "time_grid.hpp"

namespace purelab {

struct TrainLogRecord {
    std::int64_t iter = 0;
    double loss = 0.0;
    // one entry per eval sigma when eval_n > 0, else empty
    std::vector<double> transport;
};

using TrainLogFn = std::function<void(const TrainLogRecord&)>;

struct DistillConfig {
    std::int64_t iters = 4000;
    int batch = 256;
    double ema_decay = 0.999;
    double lr = 1e-3;
    LossKind loss = LossKind::L2;
    std::uint64_t seed = 0;
    std::int64_t log_interval = 200;
    // when eval_n > 0, log records carry transport estimates at eval_sigmas
    std::int64_t eval_n = 0;
    std::vector<double> eval_sigmas = {0.25, 0.5, 1.0};
};

struct FinetuneConfig {
    std::vector<double> sigmas = {0.25, 0.5, 1.0};
    bool continuous = false;  // sigma ~ U[cont_lo, cont_hi] instead of U{sigmas}
    double cont_lo = 0.0;
    double cont_hi = 1.0;
    std::int64_t iters = 2000;
    int batch = 256;
    double lr = 1e-4;
    LossKind loss = LossKind::Feature;
    std::uint64_t seed = 1;
    std::int64_t log_interval = 200;
    std::int64_t eval_n = 0;
};

struct FinetuneReport {
    // draws per configured sigma (discrete schedule); audits the sampler
    std::vector<std::int64_t> sigma_draw_counts;
};

// Consistency distillation against the exact-score PF-ODE teacher: adjacent
// grid times (t_i, t_{i+1}), one Heun step links them, the EMA target
// provides the regression target. Returns the EMA parameters.
ConsistencyNet distill(const MixtureDistribution& dist, ConsistencyNet net, const KarrasGrid& grid,
                       const DistillConfig& cfg, const TrainLogFn& log = {});

// Fine-tuning at the randomized-smoothing noise levels: minimizes the
// configured distance between clean samples and purifications of their
// noised versions at t* = select_timestep(sigma).
ConsistencyNet finetune(const MixtureDistribution& dist, ConsistencyNet net,
                        const KarrasGrid& grid, const FinetuneConfig& cfg,
                        FinetuneReport* report = nullptr, const TrainLogFn& log = {});

// builds the loss object (creates a frozen feature map for the feature kind)
Loss make_loss(LossKind kind, int data_dim, std::uint64_t seed);

// serial per-sigma transport of the net purifier, used for training logs
std::vector<double> eval_net_transport(const MixtureDistribution& dist, const ConsistencyNet& net,
                                       const KarrasGrid& grid, const std::vector<double>& sigmas,
                                       std::int64_t n, std::uint64_t seed);

}  // namespace purelab

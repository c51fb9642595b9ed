#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cli_common.hpp"

namespace cli {

struct CertifyOpts {
    CommonOpts common;
    std::vector<double> sigmas = {0.25, 0.5, 1.0};
    std::int64_t n0 = 100;
    std::int64_t n_cert = 10000;
    double alpha = 0.001;
    int num_points = 100;
    std::vector<double> eps_grid = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
};
int run_certify(const CertifyOpts& opts, const RunMeta& meta);

struct TrainOpts {
    CommonOpts common;
    int net_layers = 3;
    int net_units = 128;
    std::string activation = "tanh";
    double sigma_data = 0.5;
    std::int64_t iters = 4000;
    int batch = 256;
    double lr = 1e-3;
    double ema_decay = 0.999;
    std::string loss = "l2";
    std::vector<double> sigmas = {0.25, 0.5, 1.0};
    std::string schedule = "discrete";
    std::vector<double> sigma_range = {0.002, 1.0};
    std::string out_ckpt;
    std::string log_path;
    std::int64_t log_interval = 200;
    std::int64_t eval_n = 2000;
    std::int64_t agree_n = 10000;
};
int run_distill(const TrainOpts& opts, const RunMeta& meta);
int run_finetune(const TrainOpts& opts, const RunMeta& meta);

struct TransportOpts {
    CommonOpts common;
    std::vector<std::string> purifiers = {"onestep", "pfode", "sde", "cm-oracle"};
    std::vector<double> sigmas = {0.25, 0.5, 0.75, 1.0};
    std::int64_t n = 100000;
    std::vector<double> r_grid = {0.1, 0.25, 0.5, 1.0, 2.0};
};
int run_transport(const TransportOpts& opts, const RunMeta& meta);

struct OdeDemoOpts {
    CommonOpts common;
    double t_start = 1.0;
    int steps = 400;
    double t_end = 2e-4;
    int trajectories = 16;
    double x_range = 3.0;
};
int run_ode_demo(const OdeDemoOpts& opts, const RunMeta& meta);

struct ReportOpts {
    CommonOpts common;
};
int run_report(const ReportOpts& opts, const RunMeta& meta);

}  // namespace cli

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "commands.hpp"

namespace cli {

namespace {

int32_t loss_code(const std::string& name) {
    if (name == "l1") return 0;
    if (name == "l2") return 1;
    if (name == "feature") return 2;
    die_usage("unknown loss '" + name + "' (expected l1, l2 or feature)");
}

struct LogSink {
    std::ofstream out;
    const RunMeta* meta = nullptr;
    const std::vector<double>* sigmas = nullptr;
    double last_loss = 0.0;
    std::int64_t last_iter = 0;
};

void write_log_record(LogSink& sink, std::int64_t iter, double loss, const double* transport,
                      int32_t n_transport) {
    sink.last_loss = loss;
    sink.last_iter = iter;
    sink.out << "{\"iter\":" << iter << ",\"loss\":" << fmt_g17(loss);
    if (transport && n_transport > 0) {
        sink.out << ",\"transport\":{";
        for (int32_t i = 0; i < n_transport; ++i) {
            if (i) sink.out << ",";
            sink.out << "\"" << format_sigma((*sink.sigmas)[i]) << "\":" << fmt_g17(transport[i]);
        }
        sink.out << "}";
    }
    sink.out << ",\"seed\":" << sink.meta->seed << ",\"config_hash\":\"" << sink.meta->config_hash
             << "\",\"version\":\"" << sink.meta->version << "\"}\n";
}

void log_trampoline(void* user, int64_t iter, double loss, const double* transport,
                    int32_t n_transport) {
    write_log_record(*static_cast<LogSink*>(user), iter, loss, transport, n_transport);
}

// fraction of noisy draws whose purified output lands on the same data point
// for the net and for the ODE oracle (Dirac mixtures only)
double oracle_agreement(const pl_dist* dist, const pl_grid* grid, const pl_purifier* net_pur,
                        const pl_purifier* oracle_pur, double sigma, std::int64_t n,
                        std::uint64_t seed) {
    const int dim = pl_dist_dim(dist);
    std::vector<double> x(dim), noisy(dim), out_net(dim), out_oracle(dim), nearest(dim);
    std::int64_t agree = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        check(pl_dist_sample(dist, derive_seed(seed, 0xa9, static_cast<std::uint64_t>(i)), 1,
                             x.data(), nullptr),
              "sampling for agreement");
        check(pl_perturb(x.data(), dim, sigma, derive_seed(seed, 0xb3, i), noisy.data()),
              "perturbing for agreement");
        check(pl_purify(net_pur, grid, noisy.data(), dim, sigma, derive_seed(seed, 0xc1, i),
                        out_net.data()),
              "net purification");
        check(pl_purify(oracle_pur, grid, noisy.data(), dim, sigma, derive_seed(seed, 0xc2, i),
                        out_oracle.data()),
              "oracle purification");
        int32_t label_net = 0, label_oracle = 0;
        check(pl_dist_nearest(dist, out_net.data(), nearest.data(), &label_net), "nearest");
        check(pl_dist_nearest(dist, out_oracle.data(), nearest.data(), &label_oracle), "nearest");
        if (label_net == label_oracle) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(n);
}

std::vector<double> net_transport(const pl_dist* dist, const pl_grid* grid, const pl_net* net,
                                  const std::vector<double>& sigmas, std::int64_t n,
                                  std::uint64_t seed, int workers) {
    pl_purifier* raw = nullptr;
    check(pl_purifier_create(PL_PURIFIER_CONSISTENCY_NET, nullptr, net, nullptr, &raw),
          "creating net purifier");
    const PurifierPtr pur(raw);
    const double r = 1.0;  // exceedance radii are irrelevant here
    std::vector<double> means;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        pl_transport_result res;
        double exc = 0.0;
        check(pl_estimate_transport(dist, pur.get(), grid, sigmas[si], n, &r, 1,
                                    derive_seed(seed, 0xbef0, si), derive_seed(seed, 0xbef1, si),
                                    workers, &res, &exc),
              "transport evaluation");
        means.push_back(res.mean_dist);
    }
    return means;
}

}  // namespace

int run_distill(const TrainOpts& opts, const RunMeta& meta) {
    const DistData data = load_dist_data(opts.common.dist_spec);
    const DistPtr dist = make_dist(data);
    const GridPtr grid = make_grid(opts.common);
    ensure_out_dir(opts.common.out_dir);

    const std::string ckpt_path = opts.out_ckpt.empty()
                                      ? join_path(opts.common.out_dir, "distilled.ckpt")
                                      : opts.out_ckpt;
    const std::string log_path = opts.log_path.empty()
                                     ? join_path(opts.common.out_dir, "distill_log.jsonl")
                                     : opts.log_path;

    pl_net* raw_net = nullptr;
    const int32_t act = opts.activation == "relu" ? 1 : 0;
    check(pl_net_create(data.dim, opts.net_layers, opts.net_units, act, opts.sigma_data,
                        opts.common.t_eps, derive_seed(opts.common.seed, 0x11e7), &raw_net),
          "creating net");
    NetPtr net(raw_net);

    pl_distill_config cfg;
    pl_distill_config_default(&cfg);
    cfg.iters = opts.iters;
    cfg.batch = opts.batch;
    cfg.ema_decay = opts.ema_decay;
    cfg.lr = opts.lr;
    cfg.loss = loss_code(opts.loss);
    cfg.seed = derive_seed(opts.common.seed, 0xd157);
    cfg.log_interval = opts.log_interval;
    cfg.eval_n = opts.eval_n;
    cfg.eval_sigmas = opts.sigmas.data();
    cfg.n_eval_sigmas = static_cast<int32_t>(opts.sigmas.size());

    LogSink sink;
    sink.out.open(log_path);
    if (!sink.out) die_usage("cannot write training log " + log_path);
    sink.meta = &meta;
    sink.sigmas = &opts.sigmas;

    const pl_status st = pl_distill(dist.get(), net.get(), grid.get(), &cfg, log_trampoline,
                                    &sink);
    if (st == PL_ERR_TRAINING) {
        std::cerr << "error: " << pl_last_error() << " (last finite loss " << sink.last_loss
                  << " at iteration " << sink.last_iter << ")\n";
        return kExitTraining;
    }
    check(st, "distillation");

    check(pl_net_save(net.get(), ckpt_path.c_str()), "saving checkpoint");

    // final record: agreement with the ODE oracle at each evaluation sigma
    if (opts.agree_n > 0 && data.dim >= 1) {
        pl_purifier* net_pur_raw = nullptr;
        check(pl_purifier_create(PL_PURIFIER_CONSISTENCY_NET, nullptr, net.get(), nullptr,
                                 &net_pur_raw),
              "creating net purifier");
        const PurifierPtr net_pur(net_pur_raw);
        pl_purifier* oracle_raw = nullptr;
        check(pl_purifier_create(PL_PURIFIER_CONSISTENCY_ORACLE, dist.get(), nullptr, nullptr,
                                 &oracle_raw),
              "creating oracle purifier");
        const PurifierPtr oracle_pur(oracle_raw);

        sink.out << "{\"iter\":" << opts.iters << ",\"loss\":" << fmt_g17(sink.last_loss)
                 << ",\"oracle_agreement\":{";
        bool first = true;
        double min_agree = 1.0;
        for (std::size_t si = 0; si < opts.sigmas.size(); ++si) {
            const double a = oracle_agreement(dist.get(), grid.get(), net_pur.get(),
                                              oracle_pur.get(), opts.sigmas[si], opts.agree_n,
                                              derive_seed(opts.common.seed, 0xa54e, si));
            min_agree = std::min(min_agree, a);
            if (!first) sink.out << ",";
            first = false;
            sink.out << "\"" << format_sigma(opts.sigmas[si]) << "\":" << fmt_g17(a);
        }
        sink.out << "},\"seed\":" << meta.seed << ",\"config_hash\":\"" << meta.config_hash
                 << "\",\"version\":\"" << meta.version << "\"}\n";
        std::cout << "distilled " << ckpt_path << " (min oracle agreement " << min_agree << ")\n";
    } else {
        std::cout << "distilled " << ckpt_path << "\n";
    }
    return 0;
}

int run_finetune(const TrainOpts& opts, const RunMeta& meta) {
    const DistData data = load_dist_data(opts.common.dist_spec);
    const DistPtr dist = make_dist(data);
    const GridPtr grid = make_grid(opts.common);
    ensure_out_dir(opts.common.out_dir);

    const std::string ckpt_path = opts.out_ckpt.empty()
                                      ? join_path(opts.common.out_dir, "finetuned.ckpt")
                                      : opts.out_ckpt;
    const std::string log_path = opts.log_path.empty()
                                     ? join_path(opts.common.out_dir, "finetune_log.jsonl")
                                     : opts.log_path;

    pl_net* raw_net = nullptr;
    check(pl_net_load(opts.common.checkpoint.c_str(), &raw_net), "loading checkpoint");
    NetPtr net(raw_net);
    if (pl_net_data_dim(net.get()) != data.dim)
        die_usage("checkpoint dimension does not match the distribution");

    LogSink sink;
    sink.out.open(log_path);
    if (!sink.out) die_usage("cannot write training log " + log_path);
    sink.meta = &meta;
    sink.sigmas = &opts.sigmas;

    const auto emit_transport = [&](const char* phase, const std::vector<double>& means) {
        sink.out << "{\"event\":\"transport\",\"phase\":\"" << phase << "\",\"transport\":{";
        for (std::size_t i = 0; i < means.size(); ++i) {
            if (i) sink.out << ",";
            sink.out << "\"" << format_sigma(opts.sigmas[i]) << "\":" << fmt_g17(means[i]);
        }
        sink.out << "},\"seed\":" << meta.seed << ",\"config_hash\":\"" << meta.config_hash
                 << "\",\"version\":\"" << meta.version << "\"}\n";
    };

    if (opts.eval_n > 0)
        emit_transport("before", net_transport(dist.get(), grid.get(), net.get(), opts.sigmas,
                                               opts.eval_n, opts.common.seed,
                                               opts.common.workers));

    pl_finetune_config cfg;
    pl_finetune_config_default(&cfg);
    cfg.sigmas = opts.sigmas.data();
    cfg.n_sigmas = static_cast<int32_t>(opts.sigmas.size());
    if (opts.schedule == "continuous") {
        if (opts.sigma_range.size() != 2) die_usage("--sigma-range needs exactly lo,hi");
        cfg.continuous = 1;
        cfg.cont_lo = opts.sigma_range[0];
        cfg.cont_hi = opts.sigma_range[1];
    } else if (opts.schedule != "discrete") {
        die_usage("unknown schedule '" + opts.schedule + "'");
    }
    cfg.iters = opts.iters;
    cfg.batch = opts.batch;
    cfg.lr = opts.lr;
    cfg.loss = loss_code(opts.loss);
    cfg.seed = derive_seed(opts.common.seed, 0xf17e);
    cfg.log_interval = opts.log_interval;
    cfg.eval_n = 0;  // per-sigma transport is logged before/after instead

    const pl_status st =
        pl_finetune(dist.get(), net.get(), grid.get(), &cfg, log_trampoline, &sink, nullptr);
    if (st == PL_ERR_TRAINING) {
        std::cerr << "error: " << pl_last_error() << " (last finite loss " << sink.last_loss
                  << " at iteration " << sink.last_iter << ")\n";
        return kExitTraining;
    }
    check(st, "fine-tuning");

    if (opts.eval_n > 0)
        emit_transport("after", net_transport(dist.get(), grid.get(), net.get(), opts.sigmas,
                                              opts.eval_n, opts.common.seed,
                                              opts.common.workers));

    check(pl_net_save(net.get(), ckpt_path.c_str()), "saving checkpoint");
    std::cout << "fine-tuned " << ckpt_path << "\n";
    return 0;
}

}  // namespace cli

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"purelab: diffusion purification, certification and transport experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pl_version());
    app.set_config("--config", "",
                   "key=value config file; keys live under a [subcommand] section");

    const auto prep = [](CLI::App* sub) {
        sub->fallthrough();
        sub->option_defaults()->always_capture_default(true);
        return sub;
    };

    cli::CertifyOpts certify_opts;
    auto* certify = prep(app.add_subcommand(
        "certify", "randomized-smoothing certification over a test set"));
    cli::add_common_options(*certify, certify_opts.common);
    cli::add_purifier_options(*certify, certify_opts.common);
    certify->add_option("--sigmas", certify_opts.sigmas, "smoothing noise levels")->delimiter(',');
    certify->add_option("--n0", certify_opts.n0, "selection votes");
    certify->add_option("--n-cert", certify_opts.n_cert, "certification votes");
    certify->add_option("--alpha", certify_opts.alpha, "confidence level");
    certify->add_option("--num-points", certify_opts.num_points, "test points");
    certify->add_option("--eps-grid", certify_opts.eps_grid, "radii for the accuracy curve")->delimiter(',');

    cli::TrainOpts distill_opts;
    auto* distill = prep(app.add_subcommand("distill", "consistency distillation from the exact score"));
    cli::add_common_options(*distill, distill_opts.common);
    distill->add_option("--net-layers", distill_opts.net_layers, "hidden layers");
    distill->add_option("--net-units", distill_opts.net_units, "hidden units per layer");
    distill->add_option("--activation", distill_opts.activation, "tanh or relu");
    distill->add_option("--sigma-data", distill_opts.sigma_data, "skip-parameterization scale");
    distill->add_option("--iters", distill_opts.iters, "training iterations");
    distill->add_option("--batch", distill_opts.batch, "batch size");
    distill->add_option("--lr", distill_opts.lr, "learning rate");
    distill->add_option("--ema-decay", distill_opts.ema_decay, "EMA decay of the target copy");
    distill->add_option("--loss", distill_opts.loss, "l1, l2 or feature");
    distill->add_option("--eval-sigmas", distill_opts.sigmas, "noise levels for evaluation")->delimiter(',');
    distill->add_option("--out", distill_opts.out_ckpt, "checkpoint output path");
    distill->add_option("--log", distill_opts.log_path, "training log (JSON lines)");
    distill->add_option("--log-interval", distill_opts.log_interval, "iterations between logs");
    distill->add_option("--eval-n", distill_opts.eval_n, "draws per transport evaluation");
    distill->add_option("--agree-n", distill_opts.agree_n, "draws for the final oracle agreement");

    cli::TrainOpts finetune_opts;
    finetune_opts.iters = 2000;
    finetune_opts.lr = 1e-4;
    finetune_opts.loss = "feature";
    auto* finetune = prep(app.add_subcommand(
        "finetune", "fine-tune a distilled net at the smoothing noise levels"));
    cli::add_common_options(*finetune, finetune_opts.common);
    finetune->add_option("--checkpoint", finetune_opts.common.checkpoint, "input checkpoint")
        ->required();
    finetune->add_option("--sigmas", finetune_opts.sigmas, "fine-tuning noise levels")->delimiter(',');
    finetune->add_option("--schedule", finetune_opts.schedule, "discrete or continuous");
    finetune->add_option("--sigma-range", finetune_opts.sigma_range,
                         "lo,hi for the continuous schedule")
        ->delimiter(',');
    finetune->add_option("--iters", finetune_opts.iters, "training iterations");
    finetune->add_option("--batch", finetune_opts.batch, "batch size");
    finetune->add_option("--lr", finetune_opts.lr, "learning rate");
    finetune->add_option("--loss", finetune_opts.loss, "l1, l2 or feature");
    finetune->add_option("--out", finetune_opts.out_ckpt, "checkpoint output path");
    finetune->add_option("--log", finetune_opts.log_path, "training log (JSON lines)");
    finetune->add_option("--log-interval", finetune_opts.log_interval, "iterations between logs");
    finetune->add_option("--eval-n", finetune_opts.eval_n, "draws per transport evaluation");

    cli::TransportOpts transport_opts;
    auto* transport = prep(app.add_subcommand(
        "transport", "transport estimates and the exceedance-bound report"));
    cli::add_common_options(*transport, transport_opts.common);
    cli::add_purifier_options(*transport, transport_opts.common);
    transport->add_option("--purifiers", transport_opts.purifiers, "purifier kinds to compare")->delimiter(',');
    transport->add_option("--sigmas", transport_opts.sigmas, "noise levels")->delimiter(',');
    transport->add_option("--n", transport_opts.n, "Monte Carlo draws per estimate");
    transport->add_option("--r-grid", transport_opts.r_grid, "radii for exceedance probabilities")->delimiter(',');

    cli::OdeDemoOpts ode_opts;
    auto* ode = prep(app.add_subcommand(
        "ode-demo", "emit PF-ODE trajectories, posterior-mean and score data (1D)"));
    cli::add_common_options(*ode, ode_opts.common);
    ode->add_option("--t-start", ode_opts.t_start, "integration start time");
    ode->add_option("--steps", ode_opts.steps, "Heun steps");
    ode->add_option("--t-end", ode_opts.t_end, "integration stop time");
    ode->add_option("--trajectories", ode_opts.trajectories, "trajectory count");
    ode->add_option("--x-range", ode_opts.x_range, "largest |x| start");

    cli::ReportOpts report_opts;
    auto* report = prep(app.add_subcommand("report", "aggregate result files into one summary"));
    cli::add_common_options(*report, report_opts.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitUsage;
    }

    if (certify->parsed())
        return cli::run_certify(certify_opts, cli::make_meta(*certify, certify_opts.common.seed));
    if (distill->parsed())
        return cli::run_distill(distill_opts, cli::make_meta(*distill, distill_opts.common.seed));
    if (finetune->parsed())
        return cli::run_finetune(finetune_opts,
                                 cli::make_meta(*finetune, finetune_opts.common.seed));
    if (transport->parsed())
        return cli::run_transport(transport_opts,
                                  cli::make_meta(*transport, transport_opts.common.seed));
    if (ode->parsed()) return cli::run_ode_demo(ode_opts, cli::make_meta(*ode, ode_opts.common.seed));
    if (report->parsed())
        return cli::run_report(report_opts, cli::make_meta(*report, report_opts.common.seed));
    std::cerr << "error: no subcommand\n";
    return cli::kExitUsage;
}

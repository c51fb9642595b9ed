#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "commands.hpp"

namespace cli {

namespace {

std::string counts_json(const std::vector<std::int64_t>& counts) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) os << ",";
        os << "\"" << i << "\":" << counts[i];
    }
    os << "}";
    return os.str();
}

}  // namespace

int run_certify(const CertifyOpts& opts, const RunMeta& meta) {
    const DistData data = load_dist_data(opts.common.dist_spec);
    const DistPtr dist = make_dist(data);
    const GridPtr grid = make_grid(opts.common);
    NetPtr net;
    const PurifierPtr purifier = make_purifier(opts.common, opts.common.purifier, dist.get(), net);
    const ClassifierPtr classifier = make_centroid_classifier(data);
    ensure_out_dir(opts.common.out_dir);

    int32_t max_label = 0;
    for (int32_t l : data.labels) max_label = std::max(max_label, l);
    const int32_t counts_len = max_label + 1;

    // test points are draws from the data distribution itself
    std::vector<double> points(static_cast<std::size_t>(opts.num_points) * data.dim);
    std::vector<int32_t> labels(static_cast<std::size_t>(opts.num_points));
    check(pl_dist_sample(dist.get(), derive_seed(opts.common.seed, 0x7e57), opts.num_points,
                         points.data(), labels.data()),
          "sampling test points");

    const std::string tag = opts.common.purifier;
    std::ofstream jsonl(join_path(opts.common.out_dir, "certify_" + tag + ".jsonl"));
    if (!jsonl) die_usage("cannot write into " + opts.common.out_dir);

    std::vector<std::vector<double>> curves;
    for (std::size_t si = 0; si < opts.sigmas.size(); ++si) {
        const double sigma = opts.sigmas[si];
        std::vector<int32_t> predictions(labels.size());
        std::vector<double> radii(labels.size());
        for (int i = 0; i < opts.num_points; ++i) {
            const double* x = points.data() + static_cast<std::size_t>(i) * data.dim;
            pl_certify_result res;
            std::vector<std::int64_t> counts0(counts_len), counts(counts_len);
            const auto t0 = std::chrono::steady_clock::now();
            check(pl_certify(purifier.get(), classifier.get(), grid.get(), x, data.dim, sigma,
                             opts.n0, opts.n_cert, opts.alpha,
                             derive_seed(opts.common.seed, si, static_cast<std::uint64_t>(i)),
                             opts.common.workers, &res, counts0.data(), counts.data(),
                             counts_len),
                  "certifying point " + std::to_string(i));
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            predictions[i] = res.prediction;
            radii[i] = res.radius;
            jsonl << "{\"id\":" << i << ",\"sigma\":" << fmt_g17(sigma)
                  << ",\"true_label\":" << labels[i] << ",\"prediction\":" << res.prediction
                  << ",\"p_a_lower\":" << fmt_g17(res.p_a_lower)
                  << ",\"radius\":" << fmt_g17(res.radius) << ",\"counts0\":"
                  << counts_json(counts0) << ",\"counts\":" << counts_json(counts)
                  << ",\"wall_time_s\":" << fmt_g17(wall) << ",\"seed\":" << meta.seed
                  << ",\"config_hash\":\"" << meta.config_hash << "\",\"version\":\""
                  << meta.version << "\"}\n";
        }
        std::vector<double> acc(opts.eps_grid.size());
        check(pl_certified_accuracy_curve(predictions.data(), radii.data(), labels.data(),
                                          opts.num_points, opts.eps_grid.data(),
                                          static_cast<int32_t>(opts.eps_grid.size()), acc.data()),
              "building accuracy curve");
        curves.push_back(std::move(acc));
    }

    std::ofstream csv(join_path(opts.common.out_dir, "curve_" + tag + ".csv"));
    csv << csv_preamble(meta);
    csv << "# purifier=" << tag << "\n";
    csv << "eps";
    for (double s : opts.sigmas) csv << ",acc_sigma_" << format_sigma(s);
    csv << ",best\n";
    for (std::size_t e = 0; e < opts.eps_grid.size(); ++e) {
        csv << fmt_g17(opts.eps_grid[e]);
        double best = 0.0;
        for (const auto& c : curves) best = std::max(best, c[e]);
        for (const auto& c : curves) csv << "," << fmt_g17(c[e]);
        csv << "," << fmt_g17(best) << "\n";
    }

    std::cout << "certified accuracy (" << tag << ", " << opts.num_points << " points, n_cert="
              << opts.n_cert << ")\n";
    std::cout << "  eps";
    for (double s : opts.sigmas) std::cout << "  sigma=" << format_sigma(s);
    std::cout << "  best\n";
    for (std::size_t e = 0; e < opts.eps_grid.size(); ++e) {
        std::cout << "  " << opts.eps_grid[e];
        double best = 0.0;
        for (const auto& c : curves) {
            best = std::max(best, c[e]);
            std::cout << "  " << c[e];
        }
        std::cout << "  " << best << "\n";
    }
    return 0;
}

}  // namespace cli

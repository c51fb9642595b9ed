#include "cli_common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace cli {

namespace {

int status_exit_code(pl_status st) {
    switch (st) {
        case PL_OK: return 0;
        case PL_ERR_TRAINING: return kExitTraining;
        case PL_ERR_INVALID_ARGUMENT:
        case PL_ERR_DOMAIN:
        case PL_ERR_IO:
        case PL_ERR_UNSUPPORTED: return kExitUsage;
        default: return 1;
    }
}

}  // namespace

void die_on_status(pl_status st, const std::string& context) {
    std::cerr << "error: " << context << ": " << pl_last_error() << "\n";
    std::exit(status_exit_code(st));
}

void check(pl_status st, const std::string& context) {
    if (st != PL_OK) die_on_status(st, context);
}

void die_usage(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(kExitUsage);
}

void add_common_options(CLI::App& cmd, CommonOpts& opts) {
    cmd.add_option("--dist", opts.dist_spec,
                   "distribution: two-dirac, four-dirac, or a definition file path");
    cmd.add_option("--t-eps", opts.t_eps, "grid minimum time");
    cmd.add_option("--t-max", opts.t_max, "grid maximum time");
    cmd.add_option("--rho", opts.rho, "grid warping exponent");
    cmd.add_option("--grid-n", opts.grid_n, "grid size");
    cmd.add_option("--seed", opts.seed, "master seed");
    cmd.add_option("--workers", opts.workers, "worker threads (outputs do not depend on this)");
    cmd.add_option("--out-dir", opts.out_dir, "output directory");
}

void add_purifier_options(CLI::App& cmd, CommonOpts& opts) {
    cmd.add_option("--purifier", opts.purifier,
                   "purifier: onestep, pfode, sde, cm-oracle, cm-net, debug-shift");
    cmd.add_option("--solver", opts.solver, "ODE method for pfode: euler or heun");
    cmd.add_option("--ode-steps", opts.ode_steps, "ODE steps for the pfode purifier");
    cmd.add_option("--sde-steps", opts.sde_steps, "reverse-SDE steps");
    cmd.add_option("--checkpoint", opts.checkpoint, "consistency-net checkpoint (for cm-net)");
    cmd.add_option("--shift-offset", opts.shift_offset,
                   "offset of the debug-shift diagnostic purifier");
}

namespace {

DistData preset_two_dirac() {
    DistData d;
    d.dim = 1;
    d.centers = {-1.0, 1.0};
    d.scales = {0.0, 0.0};
    d.weights = {0.5, 0.5};
    d.labels = {0, 1};
    return d;
}

DistData preset_four_dirac() {
    DistData d;
    d.dim = 2;
    d.centers = {-2.0, -2.0, -2.0, 2.0, 2.0, -2.0, 2.0, 2.0};
    d.scales = {0.0, 0.0, 0.0, 0.0};
    d.weights = {0.25, 0.25, 0.25, 0.25};
    d.labels = {0, 1, 2, 3};
    return d;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            die_usage("cannot parse number '" + item + "' in " + what);
        }
    }
    return out;
}

DistData parse_dist_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) die_usage("distribution file not found: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            die_usage("bad line in distribution file " + path + ": " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    if (!kv.count("dim")) die_usage("distribution file " + path + " is missing 'dim'");
    DistData d;
    d.dim = std::atoi(kv["dim"].c_str());
    for (int k = 0;; ++k) {
        const std::string prefix = "component." + std::to_string(k) + ".";
        if (!kv.count(prefix + "center")) break;
        for (const char* field : {"scale", "weight", "label"}) {
            if (!kv.count(prefix + field))
                die_usage("distribution file " + path + " is missing " + prefix + field);
        }
        const auto center = parse_doubles(kv[prefix + "center"], prefix + "center");
        if (static_cast<int>(center.size()) != d.dim)
            die_usage("component " + std::to_string(k) + " center length does not match dim in " +
                      path);
        d.centers.insert(d.centers.end(), center.begin(), center.end());
        d.scales.push_back(std::atof(kv[prefix + "scale"].c_str()));
        d.weights.push_back(std::atof(kv[prefix + "weight"].c_str()));
        d.labels.push_back(std::atoi(kv[prefix + "label"].c_str()));
    }
    if (d.scales.empty()) die_usage("distribution file " + path + " defines no components");
    return d;
}

}  // namespace

DistData load_dist_data(const std::string& spec) {
    if (spec == "two-dirac") return preset_two_dirac();
    if (spec == "four-dirac") return preset_four_dirac();
    return parse_dist_file(spec);
}

DistPtr make_dist(const DistData& data) {
    pl_dist* d = nullptr;
    check(pl_dist_create(data.centers.data(), data.scales.data(), data.weights.data(),
                         data.labels.data(), static_cast<int32_t>(data.scales.size()), data.dim,
                         &d),
          "creating distribution");
    return DistPtr(d);
}

GridPtr make_grid(const CommonOpts& opts) {
    pl_grid* g = nullptr;
    check(pl_grid_create(opts.t_eps, opts.t_max, opts.rho, opts.grid_n, &g), "building time grid");
    return GridPtr(g);
}

PurifierPtr make_purifier(const CommonOpts& opts, const std::string& kind, const pl_dist* dist,
                          NetPtr& net_out) {
    pl_purifier_options popts;
    pl_purifier_options_default(&popts);
    popts.ode_method = opts.solver == "euler" ? 0 : 1;
    popts.ode_steps = opts.ode_steps;
    popts.sde_steps = opts.sde_steps;
    popts.debug_shift = opts.shift_offset;

    pl_purifier_kind k;
    if (kind == "onestep")
        k = PL_PURIFIER_ONESTEP;
    else if (kind == "pfode")
        k = PL_PURIFIER_PF_ODE;
    else if (kind == "sde")
        k = PL_PURIFIER_REVERSE_SDE;
    else if (kind == "cm-oracle")
        k = PL_PURIFIER_CONSISTENCY_ORACLE;
    else if (kind == "cm-net")
        k = PL_PURIFIER_CONSISTENCY_NET;
    else if (kind == "debug-shift")
        k = PL_PURIFIER_DEBUG_SHIFT;
    else {
        die_usage("unknown purifier '" + kind + "'");
    }

    const pl_net* net = nullptr;
    if (k == PL_PURIFIER_CONSISTENCY_NET) {
        if (opts.checkpoint.empty())
            die_usage("--purifier cm-net requires --checkpoint");
        pl_net* loaded = nullptr;
        check(pl_net_load(opts.checkpoint.c_str(), &loaded), "loading checkpoint");
        net_out.reset(loaded);
        net = loaded;
    }
    pl_purifier* p = nullptr;
    check(pl_purifier_create(k, dist, net, &popts, &p), "creating purifier");
    return PurifierPtr(p);
}

ClassifierPtr make_centroid_classifier(const DistData& data) {
    pl_classifier* c = nullptr;
    check(pl_classifier_nearest_centroid(data.centers.data(), data.labels.data(),
                                         static_cast<int32_t>(data.labels.size()), data.dim, &c),
          "creating classifier");
    return ClassifierPtr(c);
}

RunMeta make_meta(const CLI::App& cmd, std::uint64_t seed) {
    RunMeta meta;
    meta.seed = seed;
    meta.version = pl_version();
    // canonical dump of the effective option values, defaults included
    const std::string dump = cmd.config_to_str(true, false);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv64(dump)));
    meta.config_hash = buf;
    return meta;
}

std::string csv_preamble(const RunMeta& meta) {
    std::ostringstream os;
    os << "# seed=" << meta.seed << "\n";
    os << "# config_hash=" << meta.config_hash << "\n";
    os << "# version=" << meta.version << "\n";
    return os.str();
}

std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    return mix(seed ^ mix(a ^ mix(b)));
}

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_sigma(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    std::string s = buf;
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) die_usage("cannot create output directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace cli

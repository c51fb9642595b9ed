#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "purelab/purelab.h"

namespace cli {

// ---- handle wrappers over the C API ----

struct DistDeleter {
    void operator()(pl_dist* p) const { pl_dist_free(p); }
};
struct GridDeleter {
    void operator()(pl_grid* p) const { pl_grid_free(p); }
};
struct NetDeleter {
    void operator()(pl_net* p) const { pl_net_free(p); }
};
struct PurifierDeleter {
    void operator()(pl_purifier* p) const { pl_purifier_free(p); }
};
struct ClassifierDeleter {
    void operator()(pl_classifier* p) const { pl_classifier_free(p); }
};

using DistPtr = std::unique_ptr<pl_dist, DistDeleter>;
using GridPtr = std::unique_ptr<pl_grid, GridDeleter>;
using NetPtr = std::unique_ptr<pl_net, NetDeleter>;
using PurifierPtr = std::unique_ptr<pl_purifier, PurifierDeleter>;
using ClassifierPtr = std::unique_ptr<pl_classifier, ClassifierDeleter>;

// exit codes: 0 success, 2 config/usage, 3 training failure, 4 property violation
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTraining = 3;
inline constexpr int kExitViolation = 4;

// prints the library error and exits with the mapped code
[[noreturn]] void die_on_status(pl_status st, const std::string& context);
void check(pl_status st, const std::string& context);
[[noreturn]] void die_usage(const std::string& message);

// ---- options shared by the subcommands ----

struct CommonOpts {
    std::string dist_spec = "two-dirac";
    double t_eps = 0.002;
    double t_max = 80.0;
    double rho = 7.0;
    int grid_n = 18;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = "out";

    std::string purifier = "cm-oracle";
    std::string solver = "heun";
    int ode_steps = 18;
    int sde_steps = 200;
    std::string checkpoint;
    double shift_offset = 0.0;
};

void add_common_options(CLI::App& cmd, CommonOpts& opts);
void add_purifier_options(CLI::App& cmd, CommonOpts& opts);

// raw component storage backing a distribution handle; the CLI also uses it
// to build the default nearest-centroid classifier
struct DistData {
    int dim = 0;
    std::vector<double> centers;
    std::vector<double> scales;
    std::vector<double> weights;
    std::vector<std::int32_t> labels;
};

// preset name or key=value file; exits with kExitUsage on problems
DistData load_dist_data(const std::string& spec);
DistPtr make_dist(const DistData& data);
GridPtr make_grid(const CommonOpts& opts);
// cm-net requires opts.checkpoint; exits kExitUsage when inconsistent
PurifierPtr make_purifier(const CommonOpts& opts, const std::string& kind, const pl_dist* dist,
                          NetPtr& net_out);
ClassifierPtr make_centroid_classifier(const DistData& data);

// ---- artifact metadata ----

struct RunMeta {
    std::uint64_t seed = 0;
    std::string config_hash;  // hex
    std::string version;
};

RunMeta make_meta(const CLI::App& cmd, std::uint64_t seed);
std::string csv_preamble(const RunMeta& meta);

// ---- misc helpers ----

std::uint64_t fnv64(const std::string& s);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);
std::string fmt_g17(double v);
std::string format_sigma(double v);  // "1" -> "1.0", keeps "0.25"
void ensure_out_dir(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace cli

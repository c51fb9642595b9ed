#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "json.hpp"

namespace cli {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// rows of a #-commented CSV, header first
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream f(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

}  // namespace

int run_report(const ReportOpts& opts, const RunMeta& meta) {
    namespace fs = std::filesystem;
    const fs::path dir(opts.common.out_dir);
    if (!fs::exists(dir)) die_usage("output directory not found: " + opts.common.out_dir);

    json accuracy = json::object();
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("curve_", 0) != 0 || entry.path().extension() != ".csv") continue;
        const std::string purifier = name.substr(6, name.size() - 6 - 4);
        const auto rows = read_csv(entry.path().string());
        if (rows.size() < 2) continue;
        const auto& header = rows.front();
        json columns = json::object();
        for (std::size_t c = 0; c < header.size(); ++c) {
            json col = json::array();
            for (std::size_t r = 1; r < rows.size(); ++r) col.push_back(std::stod(rows[r][c]));
            columns[header[c]] = std::move(col);
        }
        accuracy[purifier] = std::move(columns);
    }

    json transport = json::array();
    const fs::path tpath = dir / "transport.csv";
    if (fs::exists(tpath)) {
        const auto rows = read_csv(tpath.string());
        if (!rows.empty()) {
            const auto& header = rows.front();
            for (std::size_t r = 1; r < rows.size(); ++r) {
                json rec = json::object();
                for (std::size_t c = 0; c < header.size() && c < rows[r].size(); ++c) {
                    if (c == 0)
                        rec[header[c]] = rows[r][c];
                    else
                        rec[header[c]] = std::stod(rows[r][c]);
                }
                transport.push_back(std::move(rec));
            }
        }
    }

    if (accuracy.empty() && transport.empty())
        die_usage("no result files (curve_*.csv or transport.csv) in " + opts.common.out_dir);

    json report;
    report["seed"] = meta.seed;
    report["config_hash"] = meta.config_hash;
    report["version"] = meta.version;
    report["certified_accuracy"] = std::move(accuracy);
    report["transport"] = std::move(transport);

    const std::string out_path = join_path(opts.common.out_dir, "report.json");
    std::ofstream out(out_path);
    out << report.dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace cli

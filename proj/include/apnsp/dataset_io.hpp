#pragma once

#include "apnsp/csv.hpp"
#include "apnsp/error.hpp"
#include "apnsp/sampling.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace apnsp {

/// Writes graph_id,path_idx,O,D,v,u,x_0..x_k,y. The feature configuration is stored in
/// "# feature_set:" and "# normalize_by_radius:" comment lines so the file loads back alone.
inline void save_dataset_csv(const Dataset& ds, const std::string& path, const std::vector<std::string>& comments = {}) {
    CsvWriter w(path);
    for (const auto& c : comments) w.comment(c);
    w.comment("feature_set: " + std::string(to_string(ds.set)));
    w.comment(std::string("normalize_by_radius: ") + (ds.normalize_by_radius ? "true" : "false"));
    std::vector<std::string> cols{"graph_id", "path_idx", "O", "D", "v", "u"};
    for (std::size_t i = 0; i < omega(ds.set); ++i) cols.push_back("x_" + std::to_string(i));
    cols.push_back("y");
    w.header(cols);
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const auto& p = ds.provenance[k];
        std::vector<std::string> cells{p.graph_id,           std::to_string(p.path_idx), std::to_string(p.origin),
                                       std::to_string(p.dest), std::to_string(p.v),        std::to_string(p.u)};
        for (double x : ds.X[k]) cells.push_back(fmt_double(x));
        cells.push_back(fmt_double(ds.Y[k]));
        w.row_strings(cells);
    }
}

inline Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open dataset " + path);
    Dataset ds;
    bool have_set = false, have_header = false;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        throw FormatError(path + ":" + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = line.substr(1, colon - 1), val = line.substr(colon + 1);
            key.erase(0, key.find_first_not_of(' '));
            val.erase(0, val.find_first_not_of(' '));
            if (key == "feature_set") {
                try {
                    ds.set = feature_set_from_string(val);
                } catch (const Error& e) {
                    fail(e.what());
                }
                have_set = true;
            } else if (key == "normalize_by_radius") {
                ds.normalize_by_radius = val == "true";
            }
            continue;
        }
        if (!have_header) {
            if (!have_set) fail("missing '# feature_set:' line before the header");
            have_header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        const std::size_t om = omega(ds.set);
        if (cells.size() != 7 + om) fail("expected " + std::to_string(7 + om) + " columns");
        try {
            SampleProvenance p;
            p.graph_id = cells[0];
            p.path_idx = std::stoi(cells[1]);
            p.origin = static_cast<NodeId>(std::stoul(cells[2]));
            p.dest = static_cast<NodeId>(std::stoul(cells[3]));
            p.v = static_cast<NodeId>(std::stoul(cells[4]));
            p.u = static_cast<NodeId>(std::stoul(cells[5]));
            std::vector<double> x(om);
            for (std::size_t i = 0; i < om; ++i) x[i] = std::stod(cells[6 + i]);
            ds.X.push_back(std::move(x));
            ds.Y.push_back(std::stod(cells[6 + om]));
            ds.provenance.push_back(std::move(p));
        } catch (const std::logic_error&) {
            fail("malformed number");
        }
    }
    if (!have_header) throw FormatError(path + ": no header row");
    return ds;
}

} // namespace apnsp

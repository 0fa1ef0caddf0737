#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "gwmaxdeg/asymptotics.hpp"
#include "gwmaxdeg/exact.hpp"
#include "gwmaxdeg/global.hpp"
#include "gwmaxdeg/montecarlo.hpp"

namespace gwmaxdeg::io {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "gwmaxdeg 1.0.0";

std::string format_double(double v);  // 17 significant digits, round-trip exact

// Serialized alongside every output; re-running a manifest reproduces the
// output byte for byte (nothing time- or host-dependent goes in here).
struct RunManifest {
    std::string command;
    std::string dist;
    double tail_tolerance = 1e-14;
    ojson parameters = ojson::object();
    ojson tolerances = ojson::object();
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string output_path;  // empty means stdout

    ojson to_json() const;
};

std::string dist_table_csv(const exact::DistTable& t, const RunManifest& m);
std::string dist_table_json(const exact::DistTable& t, const RunManifest& m);

std::string global_law_csv(const global::GlobalLaw& law, const RunManifest& m);
std::string global_law_json(const global::GlobalLaw& law, const RunManifest& m);

std::string ratio_report_csv(const asymptotics::RatioReport& rep, const RunManifest& m);
std::string ratio_report_json(const asymptotics::RatioReport& rep, const RunManifest& m);

std::string sim_summary_csv(const montecarlo::SimSummary& s, const RunManifest& m);
std::string sim_summary_json(const montecarlo::SimSummary& s, const RunManifest& m);

std::string width_report_csv(const montecarlo::WidthReport& w, const RunManifest& m);
std::string width_report_json(const montecarlo::WidthReport& w, const RunManifest& m);

// Atomic file write (temp + rename); empty path writes to stdout.
void write_output(const std::string& path, const std::string& body);

}  // namespace gwmaxdeg::io

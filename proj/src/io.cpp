#include "gwmaxdeg/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gwmaxdeg/errors.hpp"

namespace gwmaxdeg::io {

std::string format_double(double v) {
    char buf[40];
    if (std::isnan(v)) return "";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ojson RunManifest::to_json() const {
    ojson j;
    j["artifact"] = kArtifactVersion;
    j["command"] = command;
    j["dist"] = dist;
    j["tail_tolerance"] = tail_tolerance;
    j["parameters"] = parameters;
    j["tolerances"] = tolerances;
    if (has_seed) j["seed"] = seed;
    j["output"] = output_path.empty() ? "-" : output_path;
    return j;
}

namespace {

std::string csv_header(const RunManifest& m) {
    std::string out = "# ";
    out += kArtifactVersion;
    out += "\n# manifest: ";
    out += m.to_json().dump();
    out += '\n';
    return out;
}

void append_ratio_rows(std::string& out, const std::vector<asymptotics::RatioRow>& rows) {
    for (const auto& r : rows) {
        out += std::to_string(r.r);
        out += ',';
        out += format_double(r.numerator);
        out += ',';
        out += format_double(r.denominator);
        out += ',';
        out += format_double(r.ratio);
        out += ',';
        out += r.bound_ok ? "true" : "false";
        out += '\n';
    }
}

ojson ratio_rows_json(const std::vector<asymptotics::RatioRow>& rows) {
    ojson arr = ojson::array();
    for (const auto& r : rows)
        arr.push_back(ojson{{"r", r.r},
                            {"numerator", r.numerator},
                            {"denominator", r.denominator},
                            {"ratio", r.ratio},
                            {"bound_ok", r.bound_ok}});
    return arr;
}

const char* target_name(montecarlo::Statistic s) {
    switch (s) {
        case montecarlo::Statistic::Generation: return "generation";
        case montecarlo::Statistic::Local: return "local";
        case montecarlo::Statistic::Global: return "global";
        case montecarlo::Statistic::Width: return "width";
    }
    return "?";
}

std::string target_label(const montecarlo::TargetSpec& t, const char* kind) {
    std::string out = target_name(t.stat);
    if (t.stat == montecarlo::Statistic::Generation || t.stat == montecarlo::Statistic::Local) {
        out += ':';
        out += std::to_string(t.horizon);
    }
    out += ':';
    out += kind;
    return out;
}

void append_cells(std::string& out, const std::string& label,
                  const std::vector<montecarlo::CellStat>& cells) {
    for (const auto& c : cells) {
        out += label;
        out += ',';
        out += std::to_string(c.r);
        out += ',';
        out += std::to_string(c.count);
        out += ',';
        out += format_double(c.estimate);
        out += ',';
        out += format_double(c.se);
        out += ',';
        if (c.compared && c.well_populated) out += format_double(c.z);
        out += '\n';
    }
}

ojson cells_json(const std::vector<montecarlo::CellStat>& cells) {
    ojson arr = ojson::array();
    for (const auto& c : cells) {
        ojson j{{"r", c.r}, {"count", c.count}, {"estimate", c.estimate}, {"stderr", c.se}};
        if (c.compared && c.well_populated)
            j["z"] = c.z;
        else
            j["z"] = nullptr;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace

std::string dist_table_csv(const exact::DistTable& t, const RunManifest& m) {
    std::string out = csv_header(m);
    out += "r,cdf,pmf,tail\n";
    for (const auto& row : t.rows) {
        out += std::to_string(row.r);
        out += ',';
        out += format_double(row.cdf);
        out += ',';
        out += format_double(row.pmf);
        out += ',';
        out += format_double(row.tail);
        out += '\n';
    }
    return out;
}

std::string dist_table_json(const exact::DistTable& t, const RunManifest& m) {
    ojson rows = ojson::array();
    for (const auto& row : t.rows)
        rows.push_back(ojson{{"r", row.r}, {"cdf", row.cdf}, {"pmf", row.pmf}, {"tail", row.tail}});
    ojson j;
    j["manifest"] = m.to_json();
    j["cdf_at_minus1"] = t.cdf_at_minus1;
    j["columns"] = ojson::array({"r", "cdf", "pmf", "tail"});
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string global_law_csv(const global::GlobalLaw& law, const RunManifest& m) {
    std::string out = csv_header(m);
    out += "# limit_mass_at_infinity: " + format_double(law.limit_mass_at_infinity) + "\n";
    out += "r,cdf,pmf,tail,iterations,residual\n";
    for (const auto& row : law.rows) {
        out += std::to_string(row.r);
        out += ',';
        out += format_double(row.cdf);
        out += ',';
        out += format_double(row.pmf);
        out += ',';
        out += format_double(row.tail);
        out += ',';
        out += std::to_string(row.iterations);
        out += ',';
        out += format_double(row.residual);
        out += '\n';
    }
    return out;
}

std::string global_law_json(const global::GlobalLaw& law, const RunManifest& m) {
    ojson rows = ojson::array();
    for (const auto& row : law.rows)
        rows.push_back(ojson{{"r", row.r},
                             {"cdf", row.cdf},
                             {"pmf", row.pmf},
                             {"tail", row.tail},
                             {"iterations", row.iterations},
                             {"residual", row.residual}});
    ojson j;
    j["manifest"] = m.to_json();
    j["limit_mass_at_infinity"] = law.limit_mass_at_infinity;
    j["columns"] = ojson::array({"r", "cdf", "pmf", "tail", "iterations", "residual"});
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string ratio_report_csv(const asymptotics::RatioReport& rep, const RunManifest& m) {
    std::string out = csv_header(m);
    out += "# regime: " + rep.regime + "\n";
    out += "# constant: " + rep.constant_desc + " = " + format_double(rep.constant) + "\n";
    out += "# precision_floor_r: " + std::to_string(rep.precision_floor_r) + "\n";
    out += "r,numerator,denominator,ratio,bound_ok\n";
    append_ratio_rows(out, rep.rows);
    if (!rep.tail_rows.empty()) {
        out += "# tail\n";
        append_ratio_rows(out, rep.tail_rows);
    }
    if (!rep.quad_rows.empty()) {
        out += "# quad\n";
        append_ratio_rows(out, rep.quad_rows);
    }
    if (!rep.quad_tail_rows.empty()) {
        out += "# quad_tail\n";
        append_ratio_rows(out, rep.quad_tail_rows);
    }
    return out;
}

std::string ratio_report_json(const asymptotics::RatioReport& rep, const RunManifest& m) {
    ojson j;
    j["manifest"] = m.to_json();
    j["regime"] = rep.regime;
    j["constant_desc"] = rep.constant_desc;
    j["constant"] = std::isfinite(rep.constant) ? ojson(rep.constant) : ojson("inf");
    j["tail_constant"] = rep.tail_constant;
    j["precision_floor_r"] = rep.precision_floor_r;
    j["window"] = ojson::array({rep.window_begin, rep.window_end});
    j["max_ratio_deviation"] = rep.max_ratio_deviation;
    j["max_tail_ratio_deviation"] = rep.max_tail_ratio_deviation;
    j["any_bound_violation"] = rep.any_bound_violation;
    j["rows"] = ratio_rows_json(rep.rows);
    j["tail_rows"] = ratio_rows_json(rep.tail_rows);
    if (!rep.quad_rows.empty()) {
        j["quad_target"] = rep.quad_target;
        j["quad_rows"] = ratio_rows_json(rep.quad_rows);
        j["quad_tail_rows"] = ratio_rows_json(rep.quad_tail_rows);
        j["quad_limsup"] = rep.quad_limsup;
        j["quad_tail_limsup"] = rep.quad_tail_limsup;
        j["quad_ok"] = rep.quad_ok;
        j["quad_tail_ok"] = rep.quad_tail_ok;
        j["growth_factor"] = rep.growth_factor;
        j["growth_ok"] = rep.growth_ok;
    }
    return j.dump(2) + "\n";
}

std::string sim_summary_csv(const montecarlo::SimSummary& s, const RunManifest& m) {
    std::string out = csv_header(m);
    out += "# trials: " + std::to_string(s.trials) + "\n";
    out += "# censored: " + std::to_string(s.censored_trials) + " (rate " +
           format_double(s.censor_rate) + ")\n";
    out += "target,r,count,estimate,stderr,z\n";
    for (const auto& t : s.targets) {
        append_cells(out, target_label(t.target, "pmf"), t.pmf_cells);
        append_cells(out, target_label(t.target, "cdf"), t.cdf_cells);
    }
    return out;
}

std::string sim_summary_json(const montecarlo::SimSummary& s, const RunManifest& m) {
    ojson targets = ojson::array();
    for (const auto& t : s.targets) {
        ojson jt;
        jt["target"] = target_label(t.target, "pmf").substr(0, target_label(t.target, "pmf").rfind(':'));
        jt["usable_trials"] = t.usable_trials;
        jt["short_trials"] = t.short_trials;
        jt["compared"] = t.compared;
        jt["max_abs_z"] = t.max_abs_z;
        jt["pmf_cells"] = cells_json(t.pmf_cells);
        jt["cdf_cells"] = cells_json(t.cdf_cells);
        targets.push_back(jt);
    }
    ojson j;
    j["manifest"] = m.to_json();
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["censored_trials"] = s.censored_trials;
    j["censor_rate"] = s.censor_rate;
    j["max_abs_z"] = s.max_abs_z;
    j["targets"] = targets;
    return j.dump(2) + "\n";
}

std::string width_report_csv(const montecarlo::WidthReport& w, const RunManifest& m) {
    std::string out = csv_header(m);
    out += "# trials: " + std::to_string(w.trials) + "\n";
    out += "target,r,count,estimate,stderr,z\n";
    for (const auto& row : w.rows) {
        out += "width:ccdf,";
        out += std::to_string(row.r);
        out += ',';
        out += std::to_string(row.count);
        out += ',';
        out += format_double(row.estimate);
        out += ',';
        out += format_double(row.se);
        out += ',';
        // z > 3 here is exactly "empirical - 3 SE exceeds 1/r"
        out += row.se > 0 ? format_double((row.estimate - row.bound) / row.se) : "";
        out += '\n';
    }
    return out;
}

std::string width_report_json(const montecarlo::WidthReport& w, const RunManifest& m) {
    ojson rows = ojson::array();
    for (const auto& row : w.rows)
        rows.push_back(ojson{{"r", row.r},
                             {"count", row.count},
                             {"estimate", row.estimate},
                             {"stderr", row.se},
                             {"bound", row.bound},
                             {"ok", row.ok},
                             {"underpowered", row.underpowered}});
    ojson j;
    j["manifest"] = m.to_json();
    j["trials"] = w.trials;
    j["seed"] = w.seed;
    j["any_violation"] = w.any_violation;
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw NumericError("cannot open output file: " + tmp.string());
        f.write(body.data(), static_cast<std::streamsize>(body.size()));
        if (!f) throw NumericError("short write to: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw NumericError("cannot rename temp output into place: " + ec.message());
}

}  // namespace gwmaxdeg::io

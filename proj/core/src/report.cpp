#include "rotmin/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

namespace rotmin {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CSV row width mismatch");
    rows_.push_back(std::move(row));
}

void CsvTable::add_numbers(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double x : row) cells.push_back(format_number(x));
    add_row(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void KvReport::add(const std::string& key, const std::string& value, int indent) {
    lines_.push_back(std::string(static_cast<std::size_t>(2 * indent), ' ') + key + ": " + value);
}

void KvReport::add(const std::string& key, double value, int indent) {
    add(key, format_number(value), indent);
}

void KvReport::add(const std::string& key, long long value, int indent) {
    add(key, std::to_string(value), indent);
}

void KvReport::section(const std::string& key, int indent) {
    lines_.push_back(std::string(static_cast<std::size_t>(2 * indent), ' ') + key + ":");
}

std::string KvReport::str() const {
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    const fs::path tmp = dir / ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto " + path + ": " + ec.message());
    }
}

namespace {

void echo_config(KvReport& r, const ConfigEcho& echo) {
    r.section("config");
    for (const auto& [k, v] : echo) r.add(k, v, 1);
}

void profile_fields(KvReport& r, const PeriodicProfile& p, int indent) {
    r.add("n", static_cast<long long>(p.params.n()), indent);
    r.add("k", static_cast<long long>(p.params.k()), indent);
    r.add("l", static_cast<long long>(p.params.l()), indent);
    r.add("a0", p.a0, indent);
    r.add("T", p.period, indent);
    r.add("residual_f1", p.residual_f1, indent);
    r.add("residual_f2", p.residual_f2, indent);
    r.add("residual_theta", p.residual_theta, indent);
    r.add("minimality_residual", p.minimality_residual, indent);
    r.add("f2_closure_flag", p.f2_closure_flagged() ? "true" : "false", indent);
}

std::string mode_string(const ModeIndex& m) {
    return std::to_string(m.i) + "," + std::to_string(m.j);
}

}  // namespace

std::string shoot_report(const PeriodicProfile& profile, const ConfigEcho& echo) {
    KvReport r;
    echo_config(r, echo);
    r.section("profile");
    profile_fields(r, profile, 1);
    r.add("shooting_evaluations", static_cast<long long>(profile.shooting_evaluations), 1);
    return r.str();
}

std::string profile_csv(const PeriodicProfile& profile) {
    const Trajectory t = full_period_flight(profile);
    CsvTable csv({"u", "f1", "f2", "theta", "nH_residual"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto y = t.state(i);
        const ProfileState s{y[0], y[1], y[2]};
        csv.add_numbers({t.u(i), s.f1, s.f2, s.theta, curvature_bundle(s, profile.params).nH});
    }
    return csv.str();
}

std::string profile_report(const PeriodicProfile& profile, const ConfigEcho& echo) {
    const Trajectory t = full_period_flight(profile);
    KvReport r;
    echo_config(r, echo);
    r.section("profile");
    profile_fields(r, profile, 1);
    r.add("nodes", static_cast<long long>(t.size()), 1);
    const auto end = t.back_state();
    r.add("closure_f1", end[0], 1);
    r.add("closure_f2", end[1] - profile.a0, 1);
    r.add("closure_theta", end[2] - 2.0 * std::numbers::pi, 1);
    return r.str();
}

std::string discriminant_csv(const DiscriminantCurve& curve) {
    CsvTable csv({"lambda", "delta0", "z1T", "z2T", "dz1T", "dz2T"});
    for (const auto& s : curve.samples)
        csv.add_numbers({s.lambda, s.delta0, s.monodromy.z1T, s.monodromy.z2T, s.monodromy.dz1T,
                         s.monodromy.dz2T});
    return csv.str();
}

std::string discriminant_report(const DiscriminantCurve& curve, const ConfigEcho& echo) {
    KvReport r;
    echo_config(r, echo);
    r.add("operator", to_string(curve.kind));
    r.add("mode", mode_string(curve.mode));
    r.section("samples");
    for (const auto& s : curve.samples) {
        std::string v = format_number(s.delta0);
        if (s.monodromy.scale_log2 != 0) v += " (scale 2^" + std::to_string(s.monodromy.scale_log2) + ")";
        r.add(format_number(s.lambda), v, 1);
    }
    return r.str();
}

std::string table_csv(const std::vector<SweepEntry>& entries) {
    CsvTable csv({"n", "k", "l", "a0", "T", "residual_f1", "residual_f2", "residual_theta",
                  "minimality_residual", "status"});
    for (const auto& e : entries) {
        if (e.profile) {
            const auto& p = *e.profile;
            csv.add_row({std::to_string(e.n), std::to_string(p.params.k()), std::to_string(p.params.l()),
                         format_number(p.a0), format_number(p.period), format_number(p.residual_f1),
                         format_number(p.residual_f2), format_number(p.residual_theta),
                         format_number(p.minimality_residual),
                         p.f2_closure_flagged() ? "f2_flag" : "ok"});
        } else {
            csv.add_row({std::to_string(e.n), "", "", "", "", "", "", "", "", "failed: " + e.failure});
        }
    }
    return csv.str();
}

std::string table_report(const std::vector<SweepEntry>& entries, const ConfigEcho& echo) {
    KvReport r;
    echo_config(r, echo);
    r.section("rows");
    for (const auto& e : entries) {
        r.section("n=" + std::to_string(e.n), 1);
        if (e.profile)
            profile_fields(r, *e.profile, 2);
        else
            r.add("failure", e.failure, 2);
    }
    return r.str();
}

std::string spectrum_report(const SpectrumReport& report, const ConfigEcho& echo) {
    KvReport r;
    echo_config(r, echo);
    r.add("operator", to_string(report.kind));
    r.add("lambda_min", report.lambda_min);
    r.add("lambda_max", report.lambda_max);
    r.section("groups");
    for (const auto& g : report.groups) {
        r.section("group", 1);
        r.add("lambda", g.lambda, 2);
        r.add("multiplicity", static_cast<long long>(g.multiplicity), 2);
        for (const auto& m : g.members) {
            std::string v = format_number(m.lambda) + " kernel=" + std::to_string(m.kernel_dim) +
                            " total=" + std::to_string(m.total_multiplicity);
            if (m.tangential) v += " tangential";
            r.add("mode " + mode_string(m.mode), v, 2);
        }
    }
    r.section("flagged");
    for (const auto& f : report.flagged)
        r.add("mode " + mode_string(f.mode), format_number(f.lambda) + " " + f.note, 1);
    std::string frontier;
    for (const auto& m : report.pruned_frontier) frontier += (frontier.empty() ? "" : " ") + ("(" + mode_string(m) + ")");
    r.add("pruned_frontier", frontier);
    r.add("modes_scanned", static_cast<long long>(report.modes.size()));
    if (report.kind == OperatorKind::jacobi) {
        r.add("stability_index", static_cast<long long>(report.stability_index));
        r.add("nullity", static_cast<long long>(report.nullity));
    }
    return r.str();
}

std::string spectrum_csv(const SpectrumReport& report) {
    CsvTable csv({"group", "lambda", "i", "j", "kernel_dim", "total_multiplicity", "tangential"});
    for (std::size_t g = 0; g < report.groups.size(); ++g)
        for (const auto& m : report.groups[g].members)
            csv.add_row({std::to_string(g), format_number(m.lambda), std::to_string(m.mode.i),
                         std::to_string(m.mode.j), std::to_string(m.kernel_dim),
                         std::to_string(m.total_multiplicity), m.tangential ? "1" : "0"});
    return csv.str();
}

}  // namespace rotmin

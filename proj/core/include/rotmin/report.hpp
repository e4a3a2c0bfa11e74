#pragma once

// Text outputs: 9-significant-digit numbers, RFC-4180 CSV, an indented
// key/value report, and atomic file replacement.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rotmin/profile.hpp"
#include "rotmin/spectrum.hpp"

namespace rotmin {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "%.9g" with -0 printed as 0 and non-finite values as nan / inf / -inf.
std::string format_number(double x);

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> row);
    void add_numbers(const std::vector<double>& row);
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Ordered key/value lines; indent levels are two spaces each.
class KvReport {
public:
    void add(const std::string& key, const std::string& value, int indent = 0);
    void add(const std::string& key, double value, int indent = 0);
    void add(const std::string& key, long long value, int indent = 0);
    void section(const std::string& key, int indent = 0);
    std::string str() const;

private:
    std::vector<std::string> lines_;
};

/// Effective configuration echoed at the top of every report.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

std::string shoot_report(const PeriodicProfile& profile, const ConfigEcho& echo);

/// u, f1, f2, theta, nH_residual over the nodes of one full period.
std::string profile_csv(const PeriodicProfile& profile);
std::string profile_report(const PeriodicProfile& profile, const ConfigEcho& echo);

/// lambda, delta0, z1T, z2T, dz1T, dz2T (the z values as stored, see scale_log2).
std::string discriminant_csv(const DiscriminantCurve& curve);
std::string discriminant_report(const DiscriminantCurve& curve, const ConfigEcho& echo);

std::string table_csv(const std::vector<SweepEntry>& entries);
std::string table_report(const std::vector<SweepEntry>& entries, const ConfigEcho& echo);

/// One line per eigenvalue group and its members, then stability_index and
/// nullity (Jacobi only).
std::string spectrum_report(const SpectrumReport& report, const ConfigEcho& echo);
std::string spectrum_csv(const SpectrumReport& report);

}  // namespace rotmin

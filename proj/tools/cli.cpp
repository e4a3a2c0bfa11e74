#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "rotmin/checks.hpp"
#include "rotmin/errors.hpp"
#include "rotmin/parallel.hpp"
#include "rotmin/profile.hpp"
#include "rotmin/report.hpp"
#include "rotmin/spectrum.hpp"

namespace rotmin::cli {

namespace {

// A --a0 given to `shoot` is a bracket centre; the bracket is this wide
// on either side.
constexpr double kShootCentreWidth = 0.02;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    int n = 0, k = 0, l = 0;
    double a0 = 0.0;
    double lambda_min = 0.0, lambda_max = 0.0, step = 0.025;
    std::string op;
    std::string mode;
    std::string out;
    std::string format;
    double rel_tol = IntegratorConfig{}.rel_tol;
    double abs_tol = IntegratorConfig{}.abs_tol;
    int jobs = 0;
    std::string config;
    int n_from = 4, n_to = 50;
    bool audit = false;

    // Each subcommand registers its own copy of a flag; only one subcommand
    // is ever parsed, so "given" means given to any of them.
    std::multimap<std::string, CLI::Option*> opts;
    bool given(const std::string& name) const {
        auto [b, e] = opts.equal_range(name);
        return std::any_of(b, e, [](const auto& kv) { return kv.second->count() > 0; });
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void add_params(CLI::App* sub, Flags& f) {
    f.opts.emplace("n", sub->add_option("--n", f.n, "ambient dimension n = k + l + 1"));
    f.opts.emplace("k", sub->add_option("--k", f.k, "dimension of the first sphere factor"));
    f.opts.emplace("l", sub->add_option("--l", f.l, "dimension of the second sphere factor"));
}

void add_integrator(CLI::App* sub, Flags& f) {
    f.opts.emplace("rel-tol", sub->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance"));
    f.opts.emplace("abs-tol", sub->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance"));
    f.opts.emplace("jobs", sub->add_option("--jobs", f.jobs, "worker threads (default: all cores)"));
    f.opts.emplace("out", sub->add_option("--out", f.out, "output path (default: stdout)"));
    f.opts.emplace("format", sub->add_option("--format", f.format, "csv or report")
                           ->check(CLI::IsMember({"csv", "report"})));
    f.opts.emplace("config", sub->add_option("--config", f.config, "flat key = value file"));
}

void add_a0(CLI::App* sub, Flags& f, const char* help) {
    f.opts.emplace("a0", sub->add_option("--a0", f.a0, help));
}

void add_lambda(CLI::App* sub, Flags& f) {
    f.opts.emplace("lambda-min", sub->add_option("--lambda-min", f.lambda_min, "lower end of the lambda range"));
    f.opts.emplace("lambda-max", sub->add_option("--lambda-max", f.lambda_max, "upper end of the lambda range"));
    f.opts.emplace("step", sub->add_option("--step", f.step, "lambda grid step"));
    f.opts.emplace("operator", sub->add_option("--operator", f.op, "laplace or jacobi")
                             ->check(CLI::IsMember({"laplace", "jacobi"})));
}

RotationParams resolve_params(const Flags& f) {
    const bool hn = f.given("n"), hk = f.given("k"), hl = f.given("l");
    const int count = hn + hk + hl;
    if (count < 2) throw UsageError("give two of --n, --k, --l");
    try {
        if (count == 3) {
            if (f.n != f.k + f.l + 1) throw UsageError("--n must equal --k + --l + 1");
            return RotationParams::from_kl(f.k, f.l);
        }
        if (hk && hl) return RotationParams::from_kl(f.k, f.l);
        if (hn && hl) return RotationParams::from_nl(f.n, f.l);
        return RotationParams::from_nk(f.n, f.k);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

IntegratorConfig resolve_integrator(const Flags& f) {
    IntegratorConfig c;
    c.rel_tol = f.rel_tol;
    c.abs_tol = f.abs_tol;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

OperatorKind resolve_operator(const Flags& f, bool required) {
    if (!f.given("operator")) {
        if (required) throw UsageError("--operator {laplace|jacobi} is required");
        return OperatorKind::laplace;
    }
    return f.op == "jacobi" ? OperatorKind::jacobi : OperatorKind::laplace;
}

ModeIndex resolve_mode(const Flags& f, const RotationParams& params) {
    if (!f.given("mode")) throw UsageError("--mode i,j is required");
    const auto comma = f.mode.find(',');
    if (comma == std::string::npos) throw UsageError("--mode expects i,j");
    try {
        std::size_t p1 = 0, p2 = 0;
        const std::string a = trim(f.mode.substr(0, comma)), b = trim(f.mode.substr(comma + 1));
        const int i = std::stoi(a, &p1), j = std::stoi(b, &p2);
        if (p1 != a.size() || p2 != b.size() || i < 0 || j < 0) throw std::invalid_argument("");
        return ModeIndex::make(i, j, params);
    } catch (const std::exception&) {
        throw UsageError("--mode expects two non-negative integers i,j");
    }
}

PeriodicProfile solve_profile(const Flags& f, const RotationParams& params,
                              const IntegratorConfig& cfg, bool a0_is_centre) {
    if (f.given("a0")) {
        if (!(f.a0 > 0.0 && f.a0 < 1.0)) throw UsageError("--a0 must lie in (0, 1)");
        if (!a0_is_centre) return profile_from_a0(params, f.a0, cfg);
        ShootingProblem problem{params, f.a0 * (1.0 - kShootCentreWidth),
                                std::min(f.a0 * (1.0 + kShootCentreWidth), 0.999), cfg};
        return solve_periodic(problem);
    }
    return solve_periodic(ShootingProblem::with_default_bracket(params, cfg));
}

ConfigEcho base_echo(const std::string& command, const Flags& f, const RotationParams* params) {
    ConfigEcho e{{"command", command}};
    if (params) {
        e.emplace_back("n", std::to_string(params->n()));
        e.emplace_back("k", std::to_string(params->k()));
        e.emplace_back("l", std::to_string(params->l()));
    }
    if (f.given("a0")) e.emplace_back("a0", format_number(f.a0));
    e.emplace_back("rel-tol", format_number(f.rel_tol));
    e.emplace_back("abs-tol", format_number(f.abs_tol));
    return e;
}

void emit(const Flags& f, const std::string& content, std::ostream& out) {
    if (f.out.empty())
        out << content;
    else
        write_atomic(f.out, content);
}

std::string format_of(const Flags& f, const char* fallback) {
    return f.format.empty() ? fallback : f.format;
}

void error_block(std::ostream& err, const char* kind, int code, const std::string& message) {
    std::string flat = message;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    err << "error:\n  kind: " << kind << "\n  exit_code: " << code << "\n  message: " << flat << "\n";
}

bool present(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty() || key == "config")
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": bad key");
        out.emplace_back(key, value);
    }
    return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rotational minimal hypersurfaces in spheres: profiles and spectra", "rotmin"};
    app.require_subcommand(1);
    Flags f;

    auto* shoot = app.add_subcommand("shoot", "solve for the periodic profile (a0, T)");
    add_params(shoot, f);
    add_a0(shoot, f, "bracket centre for the shooting (+-2%)");
    add_integrator(shoot, f);

    auto* table = app.add_subcommand("table", "sweep (a0, T) over n at fixed l");
    f.opts.emplace("l", table->add_option("--l", f.l, "dimension of the second sphere factor"));
    f.opts.emplace("n-from", table->add_option("--n-from", f.n_from, "first n"));
    f.opts.emplace("n-to", table->add_option("--n-to", f.n_to, "last n"));
    add_integrator(table, f);

    auto* profile = app.add_subcommand("profile", "profile curve over one period");
    add_params(profile, f);
    add_a0(profile, f, "start radius used verbatim (skips shooting)");
    add_integrator(profile, f);

    auto* disc = app.add_subcommand("discriminant", "sampled delta0(lambda) for one mode");
    add_params(disc, f);
    add_a0(disc, f, "start radius used verbatim (skips shooting)");
    add_lambda(disc, f);
    f.opts.emplace("mode", disc->add_option("--mode", f.mode, "mode i,j"));
    add_integrator(disc, f);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalue groups over a lambda range");
    add_params(spectrum_cmd, f);
    add_a0(spectrum_cmd, f, "start radius used verbatim (skips shooting)");
    add_lambda(spectrum_cmd, f);
    f.opts.emplace("audit", spectrum_cmd->add_flag("--audit", f.audit, "re-scan the pruned frontier modes"));
    add_integrator(spectrum_cmd, f);

    auto* check = app.add_subcommand("check", "run the invariant suite");
    add_params(check, f);
    add_a0(check, f, "start radius used verbatim (skips shooting)");
    add_integrator(check, f);

    // Config file values fill in every flag not given on the command line.
    std::vector<std::string> args(raw_args.begin() + (raw_args.empty() ? 0 : 1), raw_args.end());
    try {
        if (auto path = config_path(args)) {
            for (const auto& [key, value] : read_config_file(*path)) {
                if (present(args, key)) continue;
                if (key == "audit") {
                    if (value == "true" || value == "1") args.push_back("--audit");
                    continue;
                }
                args.push_back("--" + key);
                args.push_back(value);
            }
        }
    } catch (const IoError& e) {
        error_block(err, "io", kIo, e.what());
        return kIo;
    } catch (const std::invalid_argument& e) {
        error_block(err, "usage", kUsage, e.what());
        return kUsage;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        error_block(err, "usage", kUsage, e.what());
        return kUsage;
    }

    try {
        const IntegratorConfig cfg = resolve_integrator(f);
        if (f.jobs <= 0) f.jobs = default_jobs();

        if (shoot->parsed()) {
            const RotationParams params = resolve_params(f);
            const PeriodicProfile p = solve_profile(f, params, cfg, true);
            const ConfigEcho echo = base_echo("shoot", f, &params);
            if (format_of(f, "report") == "csv") {
                CsvTable csv({"n", "k", "l", "a0", "T", "residual_f1", "residual_f2", "residual_theta",
                              "minimality_residual"});
                csv.add_numbers({double(params.n()), double(params.k()), double(params.l()), p.a0,
                                 p.period, p.residual_f1, p.residual_f2, p.residual_theta,
                                 p.minimality_residual});
                emit(f, csv.str(), out);
            } else {
                emit(f, shoot_report(p, echo), out);
            }
            return kOk;
        }

        if (table->parsed()) {
            if (!f.given("l")) throw UsageError("--l is required");
            if (f.l < 1 || f.n_from < f.l + 2 || f.n_to < f.n_from || f.n_to > 200)
                throw UsageError("need l >= 1 and l + 2 <= n-from <= n-to <= 200");
            const auto entries = table_sweep(f.l, f.n_from, f.n_to, cfg);
            ConfigEcho echo{{"command", "table"},
                            {"l", std::to_string(f.l)},
                            {"n-from", std::to_string(f.n_from)},
                            {"n-to", std::to_string(f.n_to)},
                            {"rel-tol", format_number(f.rel_tol)},
                            {"abs-tol", format_number(f.abs_tol)}};
            emit(f, format_of(f, "csv") == "csv" ? table_csv(entries) : table_report(entries, echo), out);
            const bool any_failed = std::any_of(entries.begin(), entries.end(),
                                                [](const SweepEntry& e) { return !e.profile; });
            return any_failed ? kConvergence : kOk;
        }

        if (profile->parsed()) {
            const RotationParams params = resolve_params(f);
            const PeriodicProfile p = solve_profile(f, params, cfg, false);
            const ConfigEcho echo = base_echo("profile", f, &params);
            emit(f, format_of(f, "csv") == "csv" ? profile_csv(p) : profile_report(p, echo), out);
            return kOk;
        }

        if (disc->parsed()) {
            const RotationParams params = resolve_params(f);
            const ModeIndex mode = resolve_mode(f, params);
            const OperatorKind kind = resolve_operator(f, false);
            const SpectrumOptions defaults = default_spectrum_options(kind);
            const double lo = f.given("lambda-min") ? f.lambda_min : defaults.lambda_min;
            const double hi = f.given("lambda-max") ? f.lambda_max : defaults.lambda_max;
            if (!(f.step > 0.0) || !(hi >= lo)) throw UsageError("need --step > 0 and lambda-min <= lambda-max");
            const PeriodicProfile p = solve_profile(f, params, cfg, false);
            const DiscriminantCurve curve = sample_discriminant(p, mode, kind, lo, hi, f.step, cfg, f.jobs);
            ConfigEcho echo = base_echo("discriminant", f, &params);
            echo.emplace_back("operator", to_string(kind));
            echo.emplace_back("mode", std::to_string(mode.i) + "," + std::to_string(mode.j));
            echo.emplace_back("lambda-min", format_number(lo));
            echo.emplace_back("lambda-max", format_number(hi));
            echo.emplace_back("step", format_number(f.step));
            emit(f, format_of(f, "csv") == "csv" ? discriminant_csv(curve) : discriminant_report(curve, echo),
                 out);
            return kOk;
        }

        if (spectrum_cmd->parsed()) {
            const RotationParams params = resolve_params(f);
            const OperatorKind kind = resolve_operator(f, true);
            SpectrumOptions so = default_spectrum_options(kind);
            if (f.given("lambda-min")) so.lambda_min = f.lambda_min;
            if (f.given("lambda-max")) so.lambda_max = f.lambda_max;
            so.scan.step = f.step;
            so.scan.jobs = f.jobs;
            if (!(so.scan.step > 0.0) || !(so.lambda_max >= so.lambda_min))
                throw UsageError("need --step > 0 and lambda-min <= lambda-max");
            const PeriodicProfile p = solve_profile(f, params, cfg, false);
            const SpectrumReport report = assemble_spectrum(p, kind, so, cfg);
            ConfigEcho echo = base_echo("spectrum", f, &params);
            echo.emplace_back("operator", to_string(kind));
            echo.emplace_back("lambda-min", format_number(so.lambda_min));
            echo.emplace_back("lambda-max", format_number(so.lambda_max));
            echo.emplace_back("step", format_number(so.scan.step));
            echo.emplace_back("a0_used", format_number(p.a0));
            echo.emplace_back("T", format_number(p.period));
            if (format_of(f, "report") == "csv") {
                emit(f, spectrum_csv(report), out);
                return kOk;
            }
            std::string text = spectrum_report(report, echo);
            bool audit_ok = true;
            if (f.audit) {
                KvReport a;
                a.section("audit");
                for (const auto& m : report.pruned_frontier) {
                    const PruningAudit audit =
                        audit_pruned_mode(p, m, kind, so.lambda_min, so.lambda_max, so.scan, cfg);
                    audit_ok = audit_ok && audit.confirmed;
                    a.add("mode " + std::to_string(m.i) + "," + std::to_string(m.j),
                          std::string(audit.confirmed ? "confirmed" : "ROOT FOUND") +
                              " max_witness_delta=" + format_number(audit.max_delta) +
                              " min_abs_witness_delta=" + format_number(audit.min_abs_delta),
                          1);
                }
                text += a.str();
            }
            emit(f, text, out);
            return audit_ok ? kOk : kCheckFailed;
        }

        if (check->parsed()) {
            const RotationParams params = resolve_params(f);
            const PeriodicProfile p = solve_profile(f, params, cfg, false);
            CheckOptions co;
            co.jobs = f.jobs;
            const auto results = run_checks(p, co);
            KvReport head;
            head.section("config");
            for (const auto& [k, v] : base_echo("check", f, &params)) head.add(k, v, 1);
            head.add("a0_used", p.a0);
            head.add("T", p.period);
            emit(f, head.str() + format_checks(results), out);
            return all_passed(results) ? kOk : kCheckFailed;
        }
    } catch (const UsageError& e) {
        error_block(err, "usage", kUsage, e.what());
        return kUsage;
    } catch (const IoError& e) {
        error_block(err, "io", kIo, e.what());
        return kIo;
    } catch (const NoSignChange& e) {
        error_block(err, "no_sign_change", kConvergence, e.what());
        return kConvergence;
    } catch (const NonConvergence& e) {
        error_block(err, "non_convergence", kConvergence, e.what());
        return kConvergence;
    } catch (const DomainError& e) {
        error_block(err, "domain", kConvergence, e.what());
        return kConvergence;
    } catch (const Error& e) {
        error_block(err, "numerics", kConvergence, e.what());
        return kConvergence;
    } catch (const std::invalid_argument& e) {
        error_block(err, "usage", kUsage, e.what());
        return kUsage;
    }
    return kUsage;
}

}  // namespace rotmin::cli

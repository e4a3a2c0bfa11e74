#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "rotmin/report.hpp"

using namespace rotmin;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "rotmin");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rotmin_unit";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(2.029324631) == "2.02932463");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("CSV quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CsvTable t({"x", "note"});
    t.add_row({"1", "a\nb"});
    CHECK(t.str() == "x,note\r\n1,\"a\nb\"\r\n");
    CHECK_THROWS_AS(t.add_row({"1"}), std::invalid_argument);
}

TEST_CASE("key/value report indentation") {
    KvReport r;
    r.section("groups");
    r.add("lambda", -5.0, 1);
    r.add("count", 3LL, 2);
    CHECK(r.str() == "groups:\n  lambda: -5\n    count: 3\n");
}

TEST_CASE("atomic write replaces the target and leaves no temporary") {
    const fs::path p = scratch("atomic.txt");
    write_atomic(p.string(), "first");
    write_atomic(p.string(), "second");
    CHECK(slurp(p) == "second");
    for (const auto& e : fs::directory_iterator(p.parent_path()))
        CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
    CHECK_THROWS_AS(write_atomic("/nonexistent_dir_rotmin/x.txt", "x"), IoError);
}

TEST_CASE("shoot reports the example 1 profile") {
    const Run r = run({"shoot", "--n", "5", "--l", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("  a0: 0.1497133") != std::string::npos);
    CHECK(r.out.find("  T: 2.029324") != std::string::npos);
    CHECK(r.out.find("command: shoot") != std::string::npos);
    // --a0 is only a bracket centre for shoot
    const Run c = run({"shoot", "--k", "3", "--l", "1", "--a0", "0.15"});
    CHECK(c.code == 0);
    CHECK(c.out.find("  a0: 0.1497133") != std::string::npos);
}

TEST_CASE("usage errors exit 64 with an error block") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"shoot", "--n", "5"}).code == cli::kUsage);
    CHECK(run({"shoot", "--n", "6", "--k", "3", "--l", "1"}).code == cli::kUsage);
    CHECK(run({"shoot", "--n", "5", "--l", "1", "--bogus"}).code == cli::kUsage);
    CHECK(run({"discriminant", "--n", "5", "--l", "1"}).code == cli::kUsage);
    CHECK(run({"discriminant", "--n", "5", "--l", "1", "--mode", "1"}).code == cli::kUsage);
    CHECK(run({"spectrum", "--n", "5", "--l", "1"}).code == cli::kUsage);
    CHECK(run({"spectrum", "--n", "5", "--l", "1", "--operator", "heat"}).code == cli::kUsage);
    const Run r = run({"shoot", "--n", "5", "--l", "1", "--rel-tol", "-1"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.rfind("error:\n  kind: usage\n  exit_code: 64\n", 0) == 0);
    CHECK(run({"shoot", "--help"}).code == 0);
}

TEST_CASE("convergence failures exit 2") {
    const Run r = run({"shoot", "--n", "5", "--l", "1", "--a0", "0.3"});
    CHECK(r.code == cli::kConvergence);
    CHECK(r.err.find("kind: no_sign_change") != std::string::npos);
}

TEST_CASE("IO failures exit 74") {
    CHECK(run({"shoot", "--n", "5", "--l", "1", "--out", "/nonexistent_dir_rotmin/o.txt"}).code == cli::kIo);
    CHECK(run({"shoot", "--config", "/nonexistent_dir_rotmin/c.cfg"}).code == cli::kIo);
}

TEST_CASE("config file fills flags; command-line flags win") {
    const fs::path cfg = scratch("run.cfg");
    {
        std::ofstream o(cfg);
        o << "# example 1\nn = 5\nl = 1\nlambda-min = 11.975\nlambda-max = 11.975\nmode = 0,0\n";
    }
    const Run a = run({"discriminant", "--config", cfg.string()});
    CHECK(a.code == 0);
    CHECK(a.out.find("11.975,1.1755") != std::string::npos);
    const Run b = run({"discriminant", "--config", cfg.string(), "--lambda-min", "0", "--lambda-max", "0",
                       "--mode", "1,0"});
    CHECK(b.code == 0);
    CHECK(b.out.find("\r\n0,-273.76") != std::string::npos);

    {
        std::ofstream o(cfg);
        o << "n = 5\nl = 1\nunknown-key = 3\n";
    }
    CHECK(run({"shoot", "--config", cfg.string()}).code == cli::kUsage);
    {
        std::ofstream o(cfg);
        o << "n 5\n";
    }
    CHECK(run({"shoot", "--config", cfg.string()}).code == cli::kUsage);
}

TEST_CASE("outputs are byte-identical across runs and job counts") {
    const fs::path a = scratch("d1.csv"), b = scratch("d2.csv");
    REQUIRE(run({"discriminant", "--n", "5", "--l", "1", "--mode", "0,1", "--lambda-min", "0", "--lambda-max",
                 "3", "--step", "0.5", "--jobs", "1", "--out", a.string()})
                .code == 0);
    REQUIRE(run({"discriminant", "--n", "5", "--l", "1", "--mode", "0,1", "--lambda-min", "0", "--lambda-max",
                 "3", "--step", "0.5", "--jobs", "3", "--out", b.string()})
                .code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("lambda,delta0,z1T,z2T,dz1T,dz2T\r\n", 0) == 0);
}

TEST_CASE("check suite: converged profile passes, perturbed a0 fails closure") {
    const Run ok = run({"check", "--n", "5", "--l", "1"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    const Run bad = run({"check", "--n", "5", "--l", "1", "--a0", "0.150713339"});
    CHECK(bad.code == cli::kCheckFailed);
    CHECK(bad.out.find("minimality_residual") != std::string::npos);
    const auto line = [&](const std::string& name) {
        const auto at = bad.out.find(name);
        return bad.out.substr(at, bad.out.find('\n', at) - at);
    };
    CHECK(line("minimality_residual").find("PASS") != std::string::npos);
    CHECK(line("full_period_closure").find("FAIL") != std::string::npos);
}

TEST_CASE("profile and table CSV schemas") {
    const Run p = run({"profile", "--n", "5", "--l", "1"});
    CHECK(p.code == 0);
    CHECK(p.out.rfind("u,f1,f2,theta,nH_residual\r\n0,0,0.149713", 0) == 0);
    const Run t = run({"table", "--l", "1", "--n-from", "4", "--n-to", "5"});
    CHECK(t.code == 0);
    CHECK(t.out.rfind("n,k,l,a0,T,", 0) == 0);
    CHECK(t.out.find("\r\n4,2,1,0.16853") != std::string::npos);
    CHECK(run({"table", "--l", "1", "--n-from", "2", "--n-to", "5"}).code == cli::kUsage);
}

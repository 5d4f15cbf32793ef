// End-to-end checks of the command-line tool: exit codes, artifact layout,
// reproducibility of the CSV output (all columns except wall_time_s).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

#ifndef TWINLAB_BIN
#error "TWINLAB_BIN must point at the CLI binary"
#endif

int run(const std::string& args) {
    const std::string cmd = std::string(TWINLAB_BIN) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// rows.csv with the wall_time_s column removed
std::string strip_walltime(const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            const auto pos = line.rfind(',');
            if (pos != std::string::npos) line.erase(pos);
        }
        out << line << "\n";
    }
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("twinlab_cli_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& s) const { return (path / s).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run("") == 1);
    CHECK(run("construct") == 1);               // missing kind
    CHECK(run("construct frobnicate") == 1);    // unknown kind
    CHECK(run("sweep eps --from -1 --to 1") == 1);
    CHECK(run("minimize --bc sideways") == 1);
    CHECK(run("--help") == 0);
}

TEST_CASE("construct writes snapshots plus an energy report") {
    TempDir d("construct");
    CHECK(run("construct ustar --alpha 0.5 --N 8 --out " + (d / "ustar")) == 0);
    CHECK(fs::exists(d.path / "ustar" / "u.field"));
    CHECK(fs::exists(d.path / "ustar" / "s.field"));
    const std::string energy = slurp(d.path / "ustar" / "energy.json");
    CHECK(energy.find("\"elastic_qc\": 0.0") != std::string::npos);  // relaxed energy vanishes
    CHECK(energy.find("\"version\"") != std::string::npos);

    CHECK(run("construct affine-w --alpha 0 --N 4 --out " + (d / "w0")) == 0);
    const std::string w0 = slurp(d.path / "w0" / "energy.json");
    CHECK(w0.find("\"total\": 0.0") != std::string::npos);  // zero bending costs nothing
}

TEST_CASE("strict mode exits 2 when the solver is cut off early") {
    TempDir d("strict");
    CHECK(run("minimize --bc top-bottom --eps 0.05 --N 8 --outer-max 1 --strict --out " +
              (d / "s")) == 2);
    // same run without --strict still exits 0 and flags non-convergence
    CHECK(run("minimize --bc top-bottom --eps 0.05 --N 8 --outer-max 1 --out " + (d / "ns")) ==
          0);
    CHECK(slurp(d.path / "ns" / "summary.json").find("\"converged\": false") !=
          std::string::npos);
}

TEST_CASE("minimize writes a monotone trace and a summary") {
    TempDir d("minimize");
    CHECK(run("minimize --bc neumann --gamma 0 --eps 0.05 --N 8 --out " + (d / "m")) == 0);
    const std::string summary = slurp(d.path / "m" / "summary.json");
    CHECK(summary.find("\"converged\": true") != std::string::npos);
    std::stringstream trace(slurp(d.path / "m" / "trace.csv"));
    std::string line;
    std::getline(trace, line);  // config comment
    std::getline(trace, line);  // header
    CHECK(line == "iter,total");
    double prev = 1e300;
    int rows = 0;
    while (std::getline(trace, line)) {
        const double v = std::stod(line.substr(line.find(',') + 1));
        CHECK(v <= prev);
        prev = v;
        ++rows;
    }
    CHECK(rows >= 1);
}

TEST_CASE("ansatz mode writes an x2-invariant sign snapshot") {
    TempDir d("ansatz");
    CHECK(run("minimize --bc top-bottom --eps 0.1 --N 8 --ansatz --out " + (d / "a")) == 0);
    std::stringstream is(slurp(d.path / "a" / "s.field"));
    std::string line;
    std::getline(is, line);  // magic
    while (std::getline(is, line) && (line.empty() || line[0] == '#' || line[0] == 'k')) {}
    const int N = std::stoi(line.substr(2));  // "N 8"
    std::vector<int> s;
    int v;
    while (is >> v) s.push_back(v);
    REQUIRE(static_cast<int>(s.size()) == N * N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) CHECK(s[(i * N + j) * N + k] == s[(i * N) * N + k]);
}

TEST_CASE("sweep CSV is bit-identical across runs, wall time aside") {
    TempDir d("sweep");
    const std::string args = "sweep eps --bc top-bottom --from 1e-4 --to 1e-2 --points 5 --out ";
    CHECK(run(args + (d / "a")) == 0);
    CHECK(run(args + (d / "b")) == 0);
    CHECK(strip_walltime(slurp(d.path / "a" / "rows.csv")) ==
          strip_walltime(slurp(d.path / "b" / "rows.csv")));
    const std::string fit = slurp(d.path / "a" / "fit.json");
    CHECK(fit.find("\"slope\"") != std::string::npos);

    CHECK(run("sweep gamma --eps 1e-3 --points 10 --out " + (d / "g")) == 0);
    CHECK(slurp(d.path / "g" / "gamma_star.json").find("gamma_star") != std::string::npos);

    CHECK(run("sweep crossover --eps-list 1e-4,3e-4,1e-3,3e-3,1e-2 --out " + (d / "x")) == 0);
    CHECK(fs::exists(d.path / "x" / "crossover.csv"));

    // a short sweep still succeeds: the rows are kept, the fit is reported
    // as unavailable
    CHECK(run("sweep eps --bc top-bottom --from 1e-3 --to 1e-2 --points 2 --out " +
              (d / "short")) == 0);
    CHECK(fs::exists(d.path / "short" / "rows.csv"));
    CHECK(slurp(d.path / "short" / "fit.json").find("\"error\"") != std::string::npos);
}

TEST_CASE("certify accepts admissible snapshots and rejects others") {
    TempDir d("certify");
    // the alpha = 1 laminate satisfies the top/bottom rows
    CHECK(run("construct laminate-symmetric --alpha 1 --eps 0.1 --N 16 --out " + (d / "lam")) ==
          0);
    CHECK(run("certify " + (d / "lam") + "/u.field --out " + (d / "cert")) == 0);
    const std::string cert = slurp(d.path / "cert" / "certificate.json");
    CHECK(cert.find("\"bound\"") != std::string::npos);

    // affine-w violates them: validation error
    CHECK(run("construct affine-w --alpha 0.5 --N 8 --out " + (d / "w")) == 0);
    CHECK(run("certify " + (d / "w") + "/u.field") == 1);
    CHECK(run("certify " + (d / "missing.field")) == 1);
}

TEST_CASE("config file values are read and flags override them") {
    TempDir d("config");
    {
        std::ofstream os(d / "run.ini");
        os << "[construct]\nkind=affine-w\nalpha=0.25\nN=4\nout=" << (d / "fromconfig") << "\n";
    }
    CHECK(run("--config " + (d / "run.ini") + " construct affine-w --alpha 0.5 --N 4 --out " +
              (d / "flagwins")) == 0);
    CHECK(fs::exists(d.path / "flagwins" / "energy.json"));
    const std::string energy = slurp(d.path / "flagwins" / "energy.json");
    CHECK(energy.find("\"alpha\": 0.5") != std::string::npos);  // flag beat the file
}

#include "twinlab/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twinlab {

namespace {

constexpr const char* kMagic = "twinlab-field v1";

void write_header(std::ostream& os, const char* kind, int N,
                  const std::vector<std::string>& comments) {
    os << kMagic << "\n";
    for (const auto& c : comments) os << "# " << c << "\n";
    os << "kind " << kind << "\n";
    os << "N " << N << "\n";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Header {
    std::string kind;
    int N = 0;
};

Header read_header(std::istream& is, const std::string& path) {
    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw std::runtime_error(path + ": not a twinlab field snapshot");
    Header h;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "kind") {
            ls >> h.kind;
        } else if (key == "N") {
            ls >> h.N;
            break;
        } else {
            throw std::runtime_error(path + ": malformed snapshot header near '" + line + "'");
        }
    }
    if (h.kind.empty() || h.N < 2)
        throw std::runtime_error(path + ": incomplete snapshot header");
    return h;
}

}  // namespace

void write_displacement(const std::string& path, const DisplacementField& u,
                        const std::vector<std::string>& comments) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_header(os, "displacement", u.grid.N, comments);
    const int N = u.grid.N;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            for (int k = 0; k <= N; ++k)
                os << fmt(u.at(i, j, k, 0)) << ' ' << fmt(u.at(i, j, k, 1)) << ' '
                   << fmt(u.at(i, j, k, 2)) << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

DisplacementField read_displacement(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    const Header h = read_header(is, path);
    if (h.kind != "displacement")
        throw std::runtime_error(path + ": expected a displacement snapshot, got " + h.kind);
    DisplacementField u{GridSpec(h.N)};
    const int N = h.N;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            for (int k = 0; k <= N; ++k)
                if (!(is >> u.at(i, j, k, 0) >> u.at(i, j, k, 1) >> u.at(i, j, k, 2)))
                    throw std::runtime_error(path + ": truncated displacement data");
    for (double v : u.values)
        if (!std::isfinite(v))
            throw std::runtime_error(path + ": non-finite displacement entry");
    return u;
}

void write_sign(const std::string& path, const SignField& s,
                const std::vector<std::string>& comments) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_header(os, "sign", s.grid.N, comments);
    const int N = s.grid.N;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) os << static_cast<int>(s.at(i, j, k)) << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

SignField read_sign(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    const Header h = read_header(is, path);
    if (h.kind != "sign")
        throw std::runtime_error(path + ": expected a sign snapshot, got " + h.kind);
    SignField s{GridSpec(h.N)};
    const int N = h.N;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                int v;
                if (!(is >> v)) throw std::runtime_error(path + ": truncated sign data");
                if (v != 1 && v != -1)
                    throw std::runtime_error(path + ": sign entries must be +-1");
                s.at(i, j, k) = static_cast<std::int8_t>(v);
            }
    return s;
}

}  // namespace twinlab

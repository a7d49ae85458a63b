#include "chiralab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace chiralab {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_chain(std::ostream& os, const SpinChain& chain) {
    for (const auto& u : chain.spins)
        os << format_full(u.x) << ' ' << format_full(u.y) << ' ' << format_full(u.z) << '\n';
}

SpinChain read_chain(std::istream& is, double spacing, Boundary boundary) {
    SpinChain c;
    c.spacing = spacing;
    c.boundary = boundary;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Vec3 u;
        if (!(ls >> u.x >> u.y >> u.z)) throw ParseError("expected three components", lineno);
        std::string extra;
        if (ls >> extra) throw ParseError("trailing content after three components", lineno);
        c.spins.push_back(u);
    }
    if (c.spins.size() < 3) throw ParseError("chain file needs at least 3 sites", lineno);
    return c;
}

void write_profile(std::ostream& os, const ContinuumProfile& profile) {
    for (std::size_t j = 0; j < profile.size(); ++j) {
        const Vec3& u = profile.u[j];
        const Vec3& w = profile.w[j];
        os << format_full(profile.t_at(j)) << ' ' << format_full(u.x) << ' ' << format_full(u.y)
           << ' ' << format_full(u.z) << ' ' << format_full(w.x) << ' ' << format_full(w.y) << ' '
           << format_full(w.z) << '\n';
    }
}

ContinuumProfile read_profile(std::istream& is) {
    std::vector<double> ts;
    std::vector<Vec3> us, ws;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double t;
        Vec3 u, w;
        if (!(ls >> t >> u.x >> u.y >> u.z >> w.x >> w.y >> w.z))
            throw ParseError("expected seven columns", lineno);
        std::string extra;
        if (ls >> extra) throw ParseError("trailing content after seven columns", lineno);
        ts.push_back(t);
        us.push_back(u);
        ws.push_back(w);
    }
    if (ts.size() < 3) throw ParseError("profile file needs at least 3 samples", lineno);
    ContinuumProfile p;
    p.t_lo = ts.front();
    p.dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    p.u = std::move(us);
    p.w = std::move(ws);
    return p;
}

void write_breakdown(std::ostream& os, const EnergyBreakdown& b) {
    os << "total=" << format_full(b.total) << '\n'
       << "well_term=" << format_full(b.well_term) << '\n'
       << "gradient_term=" << format_full(b.gradient_term) << '\n'
       << "cross_term=" << format_full(b.cross_term) << '\n'
       << "penalty_term=" << format_full(b.penalty_term) << '\n'
       << "ferro_2d_term=" << format_full(b.ferro_2d_term) << '\n'
       << "gamma_estimate=" << format_full(b.gamma_estimate) << '\n';
}

namespace {
std::string axis_label(const std::vector<Vec3>& axes, std::size_t i) {
    std::size_t k = axes.size() / 2;
    return (i < k ? "+q" : "-q") + std::to_string(i % k + 1);
}
}  // namespace

void write_hg_table(std::ostream& os, const HgTable& table) {
    std::size_t n = table.axes.size();
    os << "q";
    for (std::size_t j = 0; j < n; ++j) os << ',' << axis_label(table.axes, j);
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        os << axis_label(table.axes, i);
        for (std::size_t j = 0; j < n; ++j) {
            os << ',' << format_full(table.value[i][j]);
            if (table.asym_flag[i][j]) os << "!";
        }
        os << '\n';
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << content;
}

}  // namespace chiralab

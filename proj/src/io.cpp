#include "lfdd/io.hpp"

#include <cstdio>
#include <fstream>

#include "lfdd/errors.hpp"

namespace lfdd {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

template <typename... T>
void row(std::ostream& out, const T&... values) {
    bool first = true;
    ((out << (first ? "" : ",") << values, first = false), ...);
    out << '\n';
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_record_csv(const std::filesystem::path& path, const SimRecord& r) {
    auto out = open_out(path);
    out << "step,t,E,diss_rate,cum_diss,max_residual\n";
    for (size_t k = 0; k < r.size(); ++k) {
        row(out, r.steps[k], format_double(r.times[k]), format_double(r.energy[k]),
            format_double(r.dissipation_rate[k]), format_double(r.cumulative_dissipation[k]),
            format_double(r.max_residual[k]));
    }
}

nlohmann::json record_json(const SimRecord& r) {
    return {{"step", r.steps},
            {"t", r.times},
            {"E", r.energy},
            {"diss_rate", r.dissipation_rate},
            {"cum_diss", r.cumulative_dissipation},
            {"max_residual", r.max_residual}};
}

void write_snapshot_csv(const std::filesystem::path& path, const FieldState& s, const Grid1D& grid,
                        const Material& material) {
    const auto vnorm = constraint_residual_field(s, material);
    auto out = open_out(path);
    out << "x,eps11,eps22,eps33,eps23,eps13,eps12,v1,v2,v3,omega23,omega13,omega12,V_norm\n";
    for (int i = 0; i < s.size(); ++i) {
        out << format_double(grid.x(i));
        for (int a = 0; a < 6; ++a) out << ',' << format_double(s.eps[i][a]);
        for (int c = 0; c < 3; ++c) out << ',' << format_double(s.v[i](c));
        out << ',' << format_double(s.omega[i](1, 2)) << ',' << format_double(s.omega[i](0, 2)) << ','
            << format_double(s.omega[i](0, 1)) << ',' << format_double(vnorm[i]) << '\n';
    }
}

nlohmann::json snapshot_json(const FieldState& s, const Grid1D& grid, const Material& material) {
    const auto vnorm = constraint_residual_field(s, material);
    nlohmann::json nodes = nlohmann::json::array();
    for (int i = 0; i < s.size(); ++i) {
        const auto& e = s.eps[i].data();
        nodes.push_back({{"x", grid.x(i)},
                         {"eps", std::vector<double>(e.begin(), e.end())},
                         {"v", {s.v[i](0), s.v[i](1), s.v[i](2)}},
                         {"omega", {s.omega[i](1, 2), s.omega[i](0, 2), s.omega[i](0, 1)}},
                         {"V_norm", vnorm[i]}});
    }
    return {{"t", s.t}, {"nodes", nodes}};
}

void write_modes_csv(const std::filesystem::path& path, const ModeSet& m) {
    auto out = open_out(path);
    out << "p,frequency,residual,label\n";
    for (int p = 0; p < m.size(); ++p) {
        row(out, p + 1, format_double(m.frequencies(p)),
            format_double(p < static_cast<int>(m.residuals.size()) ? m.residuals[p] : 0.0),
            p < static_cast<int>(m.labels.size()) ? to_string(m.labels[p]) : std::string());
    }
}

nlohmann::json modes_json(const ModeSet& m) {
    nlohmann::json modes = nlohmann::json::array();
    for (int p = 0; p < m.size(); ++p) {
        const Vec3& pol = m.polarization[p];
        modes.push_back({{"p", p + 1},
                         {"frequency", m.frequencies(p)},
                         {"residual", p < static_cast<int>(m.residuals.size()) ? m.residuals[p] : 0.0},
                         {"label", p < static_cast<int>(m.labels.size()) ? to_string(m.labels[p]) : ""},
                         {"polarization", {pol(0), pol(1), pol(2)}}});
    }
    const CaseSummary s = summarize(m);
    return {{"modes", modes},
            {"repeated_eigenvalue_flag", m.repeated_eigenvalue_flag},
            {"summary", {{"case1", s.case1}, {"case2", s.case2}}}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace lfdd

#include "spraykit/io.hpp"

#include <fstream>
#include <system_error>

#include <fmt/format.h>

namespace spraykit {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot open {} for writing", tmp.string()));
        out << content;
        if (!out) throw Error(fmt::format("write failed for {}", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(fmt::format("rename {} -> {} failed: {}", tmp.string(), path.string(), ec.message()));
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

void append_row(std::string& out, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += format_double(row[i]);
    }
    out += '\n';
}

void append_header(std::string& out, const std::vector<std::string>& h) {
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) out += ',';
        out += h[i];
    }
    out += '\n';
}

} // namespace

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    append_header(out, header);
    for (const auto& r : rows) append_row(out, r);
    return out;
}

std::string trajectory_csv(const SpacetimeModel& model, const Prolongation& p) {
    const int n = model.dim;
    std::vector<std::string> h{"t"};
    for (int i = 0; i < n; ++i) h.push_back(fmt::format("x{}", i));
    for (int i = 0; i < n; ++i) h.push_back(fmt::format("v{}", i));
    h.push_back("F_H");
    if (model.labtime) h.push_back("F_labtime");
    std::string out;
    append_header(out, h);
    for (std::size_t k = 0; k < p.size(); ++k) {
        const PhasePoint& u = p.points[k];
        std::vector<double> row{p.params[k]};
        for (int i = 0; i < n; ++i) row.push_back(u.x[i]);
        for (int i = 0; i < n; ++i) row.push_back(u.v[i]);
        row.push_back(-u.v.dot(metric_at(model, u.x) * u.v));
        if (model.labtime) row.push_back(scalar_lift(*model.labtime, u));
        append_row(out, row);
    }
    return out;
}

std::string leaf_csv(const Leaf& leaf) {
    std::string out;
    if (leaf.nodes.empty()) return out;
    const int n = leaf.nodes.front().front().dim();
    std::vector<std::string> h{"t", "lambda"};
    for (int i = 0; i < n; ++i) h.push_back(fmt::format("x{}", i));
    for (int i = 0; i < n; ++i) h.push_back(fmt::format("v{}", i));
    append_header(out, h);
    for (std::size_t j = 0; j < leaf.lambda.size(); ++j)
        for (std::size_t i = 0; i < leaf.t.size(); ++i) {
            const PhasePoint& u = leaf.nodes[j][i];
            std::vector<double> row{leaf.t[i], leaf.lambda[j]};
            for (int k = 0; k < n; ++k) row.push_back(u.x[k]);
            for (int k = 0; k < n; ++k) row.push_back(u.v[k]);
            append_row(out, row);
        }
    return out;
}

std::string ensemble_csv(const ParticleEnsemble& ens) {
    std::string out;
    const int n = ens.samples.empty() ? 0 : ens.samples.front().dim();
    out += "weight";
    for (int i = 0; i < n; ++i) out += fmt::format(",x{}", i);
    for (int i = 0; i < n; ++i) out += fmt::format(",v{}", i);
    out += ",tag\n";
    const std::string tag = ens.tag.str();
    for (std::size_t p = 0; p < ens.size(); ++p) {
        out += format_double(ens.weights[p]);
        for (int i = 0; i < n; ++i) out += "," + format_double(ens.samples[p].x[i]);
        for (int i = 0; i < n; ++i) out += "," + format_double(ens.samples[p].v[i]);
        out += ",\"" + tag + "\"\n";
    }
    return out;
}

std::string moment_grid_csv(const MomentGrid& grid) {
    const int n = grid.dim;
    std::vector<std::string> h{"t"};
    for (int i = 1; i < n; ++i) h.push_back(fmt::format("x{}", i));
    for (int i = 0; i < n; ++i) h.push_back(fmt::format("J{}", i));
    const bool has_t = !grid.T.empty();
    if (has_t)
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) h.push_back(fmt::format("T{}{}", a, b));
    std::string out;
    append_header(out, h);
    for (std::size_t k = 0; k < grid.spec.times.size(); ++k)
        for (std::size_t c = 0; c < grid.spec.cell_count(); ++c) {
            std::vector<double> row{grid.spec.times[k]};
            const Vec x = grid.spec.cell_center(c);
            for (int i = 0; i < x.size(); ++i) row.push_back(x[i]);
            for (int i = 0; i < n; ++i) row.push_back(grid.J[k][c][i]);
            if (has_t)
                for (int a = 0; a < n; ++a)
                    for (int b = a; b < n; ++b) row.push_back(grid.T[k][c](a, b));
            append_row(out, row);
        }
    return out;
}

} // namespace spraykit

#include "mfbo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mfbo::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& context) {
    if (s.empty()) throw DataError(context + ": empty numeric cell");
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw DataError(context + ": bad numeric cell '" + s + "'");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");
    return in;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trace_csv(const std::string& path, const CampaignTrace& trace) {
    auto out = open_out(path);
    const std::size_t d = trace.empty() ? 0 : static_cast<std::size_t>(trace.observations()[0].x.coords.size());
    out << "step,fidelity,cost,cumulative_cost,y,best_hf";
    for (std::size_t j = 0; j < d; ++j) out << ",x" << j;
    out << "\n";

    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& o = trace.observations()[i];
        if (o.fidelity == kHighFidelity && (std::isnan(best) || o.y > best)) best = o.y;
        out << (i + 1) << ',' << format_double(o.fidelity) << ',' << format_double(o.cost) << ','
            << format_double(trace.cumulative_costs()[i]) << ',' << format_double(o.y) << ','
            << format_double(best);
        for (Eigen::Index j = 0; j < o.x.coords.size(); ++j)
            out << ',' << format_double(o.x.coords(j));
        out << "\n";
    }
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("trace CSV '" + path + "' is empty");
    auto header = split_line(line);
    if (header.size() < 6 || header[0] != "step")
        throw DataError("trace CSV '" + path + "': unexpected header");
    const std::size_t d = header.size() - 6;

    std::vector<TraceRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError("trace CSV '" + path + "' row " + std::to_string(lineno) +
                            ": wrong cell count");
        TraceRow r;
        std::string ctx = path + " row " + std::to_string(lineno);
        r.step = static_cast<std::size_t>(to_double(cells[0], ctx));
        r.fidelity = to_double(cells[1], ctx);
        r.cost = to_double(cells[2], ctx);
        r.cumulative_cost = to_double(cells[3], ctx);
        r.y = to_double(cells[4], ctx);
        r.best_hf = to_double(cells[5], ctx);
        for (std::size_t j = 0; j < d; ++j) r.x.push_back(to_double(cells[6 + j], ctx));
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_regret_csv(const std::string& path, const std::vector<double>& sf_costs,
                      const std::vector<RegretTrace>& sf, const std::vector<RegretTrace>& mf) {
    auto out = open_out(path);
    out << "step,sf_cost,regret_sf_mean,regret_sf_std,regret_mf_mean,regret_mf_std\n";

    auto stats_at = [](const std::vector<RegretTrace>& group, std::size_t i, double& mean, double& sd) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& t : group)
            if (i < t.values.size()) {
                sum += t.values[i];
                ++n;
            }
        if (n == 0) return false;
        mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (const auto& t : group)
            if (i < t.values.size()) sq += (t.values[i] - mean) * (t.values[i] - mean);
        sd = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : 0.0;
        return true;
    };

    for (std::size_t i = 0; i < sf_costs.size(); ++i) {
        out << (i + 1) << ',' << format_double(sf_costs[i]);
        double mean = 0.0, sd = 0.0;
        if (stats_at(sf, i, mean, sd))
            out << ',' << format_double(mean) << ',' << format_double(sd);
        else
            out << ",,";
        if (stats_at(mf, i, mean, sd))
            out << ',' << format_double(mean) << ',' << format_double(sd);
        else
            out << ",,";
        out << "\n";
    }
}

std::vector<RegretRow> read_regret_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("regret CSV '" + path + "' is empty");
    std::vector<RegretRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != 6)
            throw DataError("regret CSV '" + path + "' row " + std::to_string(lineno) +
                            ": wrong cell count");
        std::string ctx = path + " row " + std::to_string(lineno);
        RegretRow r;
        r.step = static_cast<std::size_t>(to_double(cells[0], ctx));
        r.sf_cost = to_double(cells[1], ctx);
        r.has_sf = !cells[2].empty();
        if (r.has_sf) {
            r.sf_mean = to_double(cells[2], ctx);
            r.sf_std = to_double(cells[3], ctx);
        }
        r.has_mf = !cells[4].empty();
        if (r.has_mf) {
            r.mf_mean = to_double(cells[4], ctx);
            r.mf_std = to_double(cells[5], ctx);
        }
        rows.push_back(r);
    }
    return rows;
}

std::string family_name(AcquisitionSpec::Family family) {
    return family == AcquisitionSpec::Family::EI ? "ei" : "mes";
}

AcquisitionSpec::Family family_from_name(const std::string& name) {
    if (name == "ei") return AcquisitionSpec::Family::EI;
    if (name == "mes") return AcquisitionSpec::Family::MES;
    throw ConfigError("unknown acquisition family '" + name + "' (expected 'ei' or 'mes')");
}

void write_heatmap_csv(const std::string& path, const SweepGrid& grid) {
    auto out = open_out(path);
    out << "rho,alpha,r_squared,acqf_family,delta_mean,delta_std,n_seeds,failed,error\n";
    for (const auto& c : grid.cells) {
        std::string err = c.error;
        for (auto& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        out << format_double(c.rho) << ',' << format_double(c.alpha) << ','
            << format_double(c.r_squared) << ',' << family_name(c.family) << ','
            << format_double(c.delta_mean) << ',' << format_double(c.delta_std) << ','
            << c.n_seeds << ',' << (c.failed ? 1 : 0) << ',' << err << "\n";
    }
}

std::vector<SweepCell> read_heatmap_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("heatmap CSV '" + path + "' is empty");
    std::vector<SweepCell> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto c = split_line(line);
        if (c.size() != 9)
            throw DataError("heatmap CSV '" + path + "' row " + std::to_string(lineno) +
                            ": wrong cell count");
        std::string ctx = path + " row " + std::to_string(lineno);
        SweepCell cell;
        cell.rho = to_double(c[0], ctx);
        cell.alpha = to_double(c[1], ctx);
        cell.r_squared = to_double(c[2], ctx);
        cell.family = family_from_name(c[3]);
        cell.delta_mean = to_double(c[4], ctx);
        cell.delta_std = to_double(c[5], ctx);
        cell.n_seeds = static_cast<std::size_t>(to_double(c[6], ctx));
        cell.failed = to_double(c[7], ctx) != 0.0;
        cell.error = c[8];
        cells.push_back(std::move(cell));
    }
    return cells;
}

void read_pairs_csv(const std::string& path, Vector& lf, Vector& hf) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("pairs CSV '" + path + "' is empty");
    auto header = split_line(line);
    int lf_col = -1, hf_col = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == "lf") lf_col = static_cast<int>(j);
        if (header[j] == "hf") hf_col = static_cast<int>(j);
    }
    if (lf_col < 0 || hf_col < 0)
        throw DataError("pairs CSV '" + path + "' must carry 'lf' and 'hf' columns");

    std::vector<double> lfs, hfs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError("pairs CSV '" + path + "' row " + std::to_string(lineno) +
                            ": wrong cell count");
        std::string ctx = path + " row " + std::to_string(lineno);
        lfs.push_back(to_double(cells[static_cast<std::size_t>(lf_col)], ctx));
        hfs.push_back(to_double(cells[static_cast<std::size_t>(hf_col)], ctx));
    }
    if (lfs.empty()) throw DataError("pairs CSV '" + path + "' has no data rows");
    lf = Eigen::Map<Vector>(lfs.data(), static_cast<Eigen::Index>(lfs.size()));
    hf = Eigen::Map<Vector>(hfs.data(), static_cast<Eigen::Index>(hfs.size()));
}

} // namespace mfbo::io

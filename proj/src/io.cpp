#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "curvarb/io.hpp"

namespace curvarb::io {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& content) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : content) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string simplex_path_csv(const portfolio::SimplexPath& p) {
    std::ostringstream out;
    out << "t";
    for (int i = 0; i < p.d; ++i) out << ",mu_" << (i + 1);
    out << "\n";
    for (std::size_t k = 0; k < p.n(); ++k) {
        out << fmt(p.times[k]);
        for (int i = 0; i < p.d; ++i) out << "," << fmt(p.mu(k)[i]);
        out << "\n";
    }
    return out.str();
}

portfolio::SimplexPath simplex_path_from_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("simplex path csv: empty");
    int d = -1;
    {
        int cols = 1;
        for (char c : line)
            if (c == ',') ++cols;
        d = cols - 1;
    }
    if (d < 2) throw std::runtime_error("simplex path csv: bad header");
    std::vector<double> times;
    std::vector<double> weights;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) break;
        times.push_back(std::stod(cell));
        for (int i = 0; i < d; ++i) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error("simplex path csv: short row");
            weights.push_back(std::stod(cell));
        }
    }
    return portfolio::make_path(d, std::move(times), std::move(weights));
}

std::string simplex_path_json(const portfolio::SimplexPath& p) {
    json j;
    j["d"] = p.d;
    j["times"] = p.times;
    json w = json::array();
    for (std::size_t k = 0; k < p.n(); ++k) {
        json row = json::array();
        for (int i = 0; i < p.d; ++i) row.push_back(p.mu(k)[i]);
        w.push_back(std::move(row));
    }
    j["weights"] = std::move(w);
    return j.dump();
}

portfolio::SimplexPath simplex_path_from_json(const std::string& content) {
    const json j = json::parse(content);
    const int d = j.at("d").get<int>();
    std::vector<double> times = j.at("times").get<std::vector<double>>();
    std::vector<double> weights;
    for (const auto& row : j.at("weights"))
        for (const auto& v : row) weights.push_back(v.get<double>());
    return portfolio::make_path(d, std::move(times), std::move(weights));
}

namespace {

template <int D>
std::string field_csv_impl(const UniformGrid<D>& g) {
    std::ostringstream out;
    if constexpr (D == 2)
        out << "x,y,w\n";
    else
        out << "x,y,z,w\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside[k]) continue;
        const auto p = g.point(g.coords(k));
        for (int d = 0; d < D; ++d) out << fmt(p[d]) << ",";
        out << fmt(g.values[k]) << "\n";
    }
    return out.str();
}

template <int D>
std::string field_json_impl(const UniformGrid<D>& g) {
    json j;
    j["dim"] = D;
    json origin = json::array();
    for (int d = 0; d < D; ++d) origin.push_back(g.origin[d]);
    j["origin"] = origin;
    j["h"] = g.h;
    json dims = json::array();
    for (int d = 0; d < D; ++d) dims.push_back(g.dims[d]);
    j["dims"] = dims;
    j["values"] = g.values;
    j["inside"] = std::vector<int>(g.inside.begin(), g.inside.end());
    return j.dump();
}

template <int D>
UniformGrid<D> grid_from_json_impl(const std::string& content) {
    const json j = json::parse(content);
    if (j.at("dim").get<int>() != D) throw std::runtime_error("grid json: dimension mismatch");
    UniformGrid<D> g;
    for (int d = 0; d < D; ++d) {
        g.origin[d] = j.at("origin")[d].get<double>();
        g.dims[d] = j.at("dims")[d].get<int>();
    }
    g.h = j.at("h").get<double>();
    g.values = j.at("values").get<std::vector<double>>();
    const auto inside = j.at("inside").get<std::vector<int>>();
    g.inside.assign(inside.begin(), inside.end());
    if (g.values.size() != g.size() || g.inside.size() != g.size())
        throw std::runtime_error("grid json: size mismatch");
    return g;
}

}  // namespace

std::string field_csv(const Grid2& g) { return field_csv_impl(g); }
std::string field_csv(const Grid3& g) { return field_csv_impl(g); }
std::string field_json(const Grid2& g) { return field_json_impl(g); }
std::string field_json(const Grid3& g) { return field_json_impl(g); }
Grid2 grid2_from_json(const std::string& content) { return grid_from_json_impl<2>(content); }
Grid3 grid3_from_json(const std::string& content) { return grid_from_json_impl<3>(content); }

std::string contours_json(const mcf2d::FrontHistory& h) {
    json j;
    j["extinction_time"] = h.extinction_time;
    j["final_area"] = h.final_area;
    json cs = json::array();
    for (const auto& c : h.contours) {
        json poly = json::array();
        for (const auto& v : c.vertices) poly.push_back({v.x(), v.y()});
        cs.push_back({{"time", c.time}, {"polyline", std::move(poly)}});
    }
    j["contours"] = std::move(cs);
    return j.dump();
}

std::string strategy_report_json(const portfolio::StrategyPath& s,
                                 const portfolio::ArbitrageReport& rep, double horizon) {
    json j;
    j["d"] = s.d;
    j["horizon"] = horizon;
    j["initial_value"] = s.value.front();
    j["final_gamma"] = s.gamma.back();
    j["gain"] = rep.gain;
    j["nonnegative"] = rep.nonneg;
    j["min_value"] = rep.min_value;
    j["self_financing_residual"] = rep.self_financing_residual;
    j["residual_bound"] = rep.residual_bound;
    return j.dump();
}

std::string certificate_report_json(const mincurv::CertificateReport& rep) {
    json j;
    j["candidate"] = rep.candidate_id;
    j["residual_min"] = rep.residual_min;
    j["residual_max"] = rep.residual_max;
    j["verdict"] = mincurv::verdict_name(rep.verdict);
    j["bound_value"] = rep.bound_value;
    j["boundary_admissible"] = rep.boundary_admissible;
    j["samples"] = rep.samples;
    return j.dump();
}

std::string ensemble_csv(const std::vector<sde::PlanarPath>& paths) {
    std::ostringstream out;
    out << "path_id,t,x_1,x_2\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        for (std::size_t k = 0; k < p.times.size(); ++k) {
            out << i << "," << fmt(p.times[k]) << "," << fmt(p.points[k].x()) << ","
                << fmt(p.points[k].y()) << "\n";
        }
    }
    return out.str();
}

std::vector<mincurv::PolyTerm> poly_terms_from_json(const std::string& content, int dim) {
    const json j = json::parse(content);
    std::vector<mincurv::PolyTerm> terms;
    for (const auto& t : j.at("terms")) {
        mincurv::PolyTerm term;
        term.coeff = t.at("coeff").get<double>();
        term.exponents = t.at("exponents").get<std::vector<int>>();
        if (static_cast<int>(term.exponents.size()) != dim)
            throw std::runtime_error("polynomial json: exponent arity mismatch");
        terms.push_back(std::move(term));
    }
    return terms;
}

}  // namespace curvarb::io

#pragma once

#include <string>
#include <vector>

#include "curvarb/mcf2d.hpp"
#include "curvarb/mincurv.hpp"
#include "curvarb/portfolio.hpp"
#include "curvarb/sde.hpp"

namespace curvarb::io {

// 12 significant digits; the one float format used in CSV output.
std::string fmt(double v);

std::string fnv1a_hex(const std::string& content);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// SimplexPath: CSV columns t, mu_1..mu_d; JSON {d, times, weights}.
std::string simplex_path_csv(const portfolio::SimplexPath& p);
portfolio::SimplexPath simplex_path_from_csv(const std::string& content);
std::string simplex_path_json(const portfolio::SimplexPath& p);
portfolio::SimplexPath simplex_path_from_json(const std::string& content);

// Grid fields: CSV of inside nodes (coords + value) and a JSON blob carrying
// the full grid for exact reload.
std::string field_csv(const Grid2& g);
std::string field_csv(const Grid3& g);
std::string field_json(const Grid2& g);
std::string field_json(const Grid3& g);
Grid2 grid2_from_json(const std::string& content);
Grid3 grid3_from_json(const std::string& content);

std::string contours_json(const mcf2d::FrontHistory& h);

std::string strategy_report_json(const portfolio::StrategyPath& s,
                                 const portfolio::ArbitrageReport& rep, double horizon);

std::string certificate_report_json(const mincurv::CertificateReport& rep);

// Ensemble CSV: path_id, t, x_1..x_dim rows, paths in index order.
std::string ensemble_csv(const std::vector<sde::PlanarPath>& paths);

std::vector<mincurv::PolyTerm> poly_terms_from_json(const std::string& content, int dim);

}  // namespace curvarb::io

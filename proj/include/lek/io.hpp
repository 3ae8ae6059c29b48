#pragma once

#include <string>

#include <json.hpp>

#include "lek/frequencies.hpp"
#include "lek/geometry.hpp"
#include "lek/grid.hpp"
#include "lek/onedim.hpp"
#include "lek/verify.hpp"

namespace lek::io {

using json = nlohmann::json;

geometry::ConvexDomain domain_from_json(const json& j);
geometry::ConvexDomain load_domain(const std::string& path);
json domain_to_json(const geometry::ConvexDomain& d);

json report_to_json(const verify::VerifyReport& rep);

/// Solution CSV: header `x[,y],value`, interior nodes only, row-major order.
void write_solution_csv(const std::string& path, const GridFunction& f);

/// Profile CSV: header `t,value` (interval) or `r,value` (radial).
void write_profile_csv(const std::string& path, const onedim::Profile1D& prof);

/// Scan CSV: header `q,lambda,hp_lower,perim_upper,ratio`.
void write_scan_csv(const std::string& path, const frequencies::ScanResult& scan);

std::string format_double(double v);

} // namespace lek::io

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "everest/analytic.hpp"
#include "everest/gridvector.hpp"

namespace everest {

/// Shortest round-trippable decimal form of a double.
std::string format_double(double x);

/// RFC-4180 CSV: CRLF records, fields quoted only when they contain a
/// comma, quote, or line break.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Legacy-VTK structured-points file with rho, u, v, p and Mach scalars.
void write_vtk_field(const std::filesystem::path& path,
                     const std::string& title, const ConservedField& field);

/// Legacy-VTK structured-points file over the interior mask, one scalar
/// array per stored variable.
void write_vtk_gridvector(const std::filesystem::path& path,
                          const std::string& title, const GridVector& v);

/// GridVector rows as (i, j, variable, value) CSV.
void write_gridvector_csv(const std::filesystem::path& path,
                          const GridVector& v);

/// Raw binary field: header int32 nx, ny, 4; then row-major float64
/// conservative variables, native endianness. Exact round-trip.
void write_raw_field(const std::filesystem::path& path,
                     const ConservedField& field);
ConservedField read_raw_field(const std::filesystem::path& path,
                              const GridSpec& geometry, double gamma);

/// Region table, wave angles and matching residuals of an analytic field.
nlohmann::json analytic_summary(const AnalyticField& field);

}  // namespace everest

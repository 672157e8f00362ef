#include "everest/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace everest {

namespace {

const char* kVarNames[4] = {"rho", "rho_u", "rho_v", "rho_E"};

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw Error("cannot open for writing: " + path.string());
  return f;
}

const char* kind_name(DiscontinuityKind k) {
  switch (k) {
    case DiscontinuityKind::shock: return "shock";
    case DiscontinuityKind::slip: return "slip";
    case DiscontinuityKind::fan_boundary: return "fan_boundary";
    case DiscontinuityKind::artificial: return "artificial";
  }
  return "unknown";
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof probe, "%.*g", prec, x);
    if (std::strtod(probe, nullptr) == x) return probe;
  }
  return buf;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f = open_out(path, true);  // binary: keep CRLF exact
  auto emit = [&f](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) f << ',';
      f << csv_escape(row[i]);
    }
    f << "\r\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
}

void write_vtk_field(const std::filesystem::path& path,
                     const std::string& title, const ConservedField& field) {
  const GridSpec& g = field.grid();
  std::ofstream f = open_out(path, false);
  f << "# vtk DataFile Version 3.0\n"
    << title << "\nASCII\nDATASET STRUCTURED_POINTS\n"
    << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n"
    << "ORIGIN " << format_double(g.x0) << ' ' << format_double(g.y0)
    << " 0\n"
    << "SPACING " << format_double(g.hx()) << ' ' << format_double(g.hy())
    << " 1\n"
    << "POINT_DATA " << g.nodes() << "\n";
  auto scalars = [&](const char* name, auto&& value_of) {
    f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        f << format_double(value_of(field.state(i, j))) << '\n';
      }
    }
  };
  scalars("rho", [](const FlowState& s) { return s.rho; });
  scalars("u", [](const FlowState& s) { return s.u; });
  scalars("v", [](const FlowState& s) { return s.v; });
  scalars("p", [](const FlowState& s) { return s.p; });
  scalars("mach", [](const FlowState& s) { return s.mach(); });
}

void write_vtk_gridvector(const std::filesystem::path& path,
                          const std::string& title, const GridVector& v) {
  const GridSpec& g = v.grid;
  const int nx = v.interior_nx(), ny = v.interior_ny();
  const int nv = static_cast<int>(v.variables.size());
  std::ofstream f = open_out(path, false);
  f << "# vtk DataFile Version 3.0\n"
    << title << "\nASCII\nDATASET STRUCTURED_POINTS\n"
    << "DIMENSIONS " << nx << ' ' << ny << " 1\n"
    << "ORIGIN " << format_double(g.x(v.margin)) << ' '
    << format_double(g.y(v.margin)) << " 0\n"
    << "SPACING " << format_double(g.hx()) << ' ' << format_double(g.hy())
    << " 1\n"
    << "POINT_DATA " << static_cast<long>(nx) * ny << "\n";
  for (int c = 0; c < nv; ++c) {
    f << "SCALARS " << kVarNames[v.variables[c]]
      << " double 1\nLOOKUP_TABLE default\n";
    for (long node = 0; node < static_cast<long>(nx) * ny; ++node) {
      f << format_double(v.values[node * nv + c]) << '\n';
    }
  }
}

void write_gridvector_csv(const std::filesystem::path& path,
                          const GridVector& v) {
  std::vector<std::vector<std::string>> rows;
  const int nv = static_cast<int>(v.variables.size());
  long idx = 0;
  for (int j = v.margin; j < v.grid.ny - v.margin; ++j) {
    for (int i = v.margin; i < v.grid.nx - v.margin; ++i) {
      for (int c = 0; c < nv; ++c, ++idx) {
        rows.push_back({std::to_string(i), std::to_string(j),
                        kVarNames[v.variables[c]],
                        format_double(v.values[idx])});
      }
    }
  }
  write_csv(path, {"i", "j", "variable", "value"}, rows);
}

void write_raw_field(const std::filesystem::path& path,
                     const ConservedField& field) {
  std::ofstream f = open_out(path, true);
  const int32_t header[3] = {field.grid().nx, field.grid().ny, 4};
  f.write(reinterpret_cast<const char*>(header), sizeof header);
  f.write(reinterpret_cast<const char*>(field.raw().data()),
          static_cast<std::streamsize>(field.raw().size() * sizeof(double)));
}

ConservedField read_raw_field(const std::filesystem::path& path,
                              const GridSpec& geometry, double gamma) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for reading: " + path.string());
  int32_t header[3] = {0, 0, 0};
  f.read(reinterpret_cast<char*>(header), sizeof header);
  if (!f || header[0] != geometry.nx || header[1] != geometry.ny ||
      header[2] != 4) {
    throw GridMismatch("raw field header does not match the expected grid");
  }
  ConservedField field(geometry, gamma);
  f.read(reinterpret_cast<char*>(field.raw().data()),
         static_cast<std::streamsize>(field.raw().size() * sizeof(double)));
  if (!f) throw Error("raw field truncated: " + path.string());
  return field;
}

nlohmann::json analytic_summary(const AnalyticField& field) {
  nlohmann::json j;
  j["anchor"] = {{"x", field.anchor_x()}, {"y", field.anchor_y()}};
  j["slip_pressure_residual"] = field.slip_pressure_residual;
  j["slip_direction_residual_rad"] = field.slip_direction_residual_rad;
  j["max_rankine_hugoniot_residual"] = field.max_rankine_hugoniot_residual;
  nlohmann::json rays = nlohmann::json::array();
  for (const auto& r : field.rays()) {
    rays.push_back({{"angle_deg", r.angle_deg},
                    {"kind", kind_name(r.kind)},
                    {"label", r.label}});
  }
  j["rays"] = rays;
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& s : field.sectors()) {
    nlohmann::json r = {{"region_id", s.region_id},
                        {"label", s.label},
                        {"rho", s.state.rho},
                        {"u", s.state.u},
                        {"v", s.state.v},
                        {"p", s.state.p},
                        {"mach", s.state.mach()},
                        {"direction_deg", s.state.direction_deg()}};
    if (s.fan) {
      r["fan"] = {{"turn_deg", s.fan->turn_deg},
                  {"ray_lo_deg", s.fan->ray_lo_deg},
                  {"ray_hi_deg", s.fan->ray_hi_deg}};
    }
    regions.push_back(r);
  }
  j["regions"] = regions;
  return j;
}

}  // namespace everest

#include "eitshape/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace eitshape {

namespace {

std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw Error("io: cannot open '" + path + "' for writing");
  return out;
}

void vtk_header(std::ofstream& out, const StructuredMesh& mesh, const std::string& title) {
  out << "# vtk DataFile Version 3.0\n"
      << title << "\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << mesh.n + 1 << " " << mesh.n + 1 << " 1\n"
      << "ORIGIN 0 0 0\n"
      << "SPACING " << format_g17(mesh.h) << " " << format_g17(mesh.h) << " 1\n";
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("io: write failed for '" + path + "'");
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_vtk_node_field(const std::string& path, const StructuredMesh& mesh,
                          const std::string& name, const ScalarField& field) {
  if (static_cast<int>(field.size()) != mesh.node_count())
    throw DimensionError("io: node field size != node count");
  std::ofstream out = open_out(path);
  vtk_header(out, mesh, name);
  out << "POINT_DATA " << mesh.node_count() << "\n"
      << "SCALARS " << name << " double 1\n"
      << "LOOKUP_TABLE default\n";
  for (int i = 0; i < mesh.node_count(); ++i) out << format_g17(field[i]) << "\n";
  finish(out, path);
}

void write_vtk_cell_field(const std::string& path, const StructuredMesh& mesh,
                          const std::string& name, const ElementCoefficient& coeff) {
  if (static_cast<int>(coeff.size()) != mesh.tri_count())
    throw DimensionError("io: cell field size != triangle count");
  std::ofstream out = open_out(path);
  vtk_header(out, mesh, name);
  out << "CELL_DATA " << mesh.n * mesh.n << "\n"
      << "SCALARS " << name << " double 1\n"
      << "LOOKUP_TABLE default\n";
  for (int cell = 0; cell < mesh.n * mesh.n; ++cell)
    out << format_g17(0.5 * (coeff[2 * cell] + coeff[2 * cell + 1])) << "\n";
  finish(out, path);
}

void write_node_field_csv(const std::string& path, const StructuredMesh& mesh,
                          const std::string& name, const ScalarField& field) {
  if (static_cast<int>(field.size()) != mesh.node_count())
    throw DimensionError("io: node field size != node count");
  std::ofstream out = open_out(path);
  out << "i,j,x,y," << name << "\n";
  for (int j = 0; j <= mesh.n; ++j)
    for (int i = 0; i <= mesh.n; ++i) {
      int v = mesh.node_index(i, j);
      out << i << "," << j << "," << format_g17(mesh.x[v]) << "," << format_g17(mesh.y[v]) << ","
          << format_g17(field[v]) << "\n";
    }
  finish(out, path);
}

void write_cell_field_csv(const std::string& path, const StructuredMesh& mesh,
                          const ElementCoefficient& coeff) {
  if (static_cast<int>(coeff.size()) != mesh.tri_count())
    throw DimensionError("io: cell field size != triangle count");
  std::ofstream out = open_out(path);
  out << "cell_i,cell_j,lower,upper\n";
  for (int j = 0; j < mesh.n; ++j)
    for (int i = 0; i < mesh.n; ++i) {
      int cell = j * mesh.n + i;
      out << i << "," << j << "," << format_g17(coeff[2 * cell]) << ","
          << format_g17(coeff[2 * cell + 1]) << "\n";
    }
  finish(out, path);
}

void write_trace_csv(const std::string& path, const OptTrace& trace) {
  std::ofstream out = open_out(path);
  out << "iter,J,step,dJ_theta,grad_dev,stop_hits\n";
  for (const TraceRow& row : trace.rows)
    out << row.iter << "," << format_g17(row.J) << "," << format_g17(row.step) << ","
        << format_g17(row.dJ_theta) << "," << format_g17(row.grad_dev) << "," << row.stop_hits
        << "\n";
  finish(out, path);
}

void write_measurements(const std::string& dir, const StructuredMesh& mesh,
                        const EitProblem& problem, const MeasurementSet& measurements) {
  std::filesystem::path base(dir);
  std::error_code ec;
  std::filesystem::create_directories(base, ec);
  std::vector<int> bnodes = boundary_nodes(mesh, kAllSides);
  for (std::size_t k = 0; k < measurements.traces.size(); ++k) {
    const Measurement& m = measurements.traces[k];
    std::ofstream out = open_out((base / ("flux_" + std::to_string(k) + ".csv")).string());
    out << "node,x,y,clean,noisy\n";
    for (int b : bnodes)
      out << b << "," << format_g17(mesh.x[b]) << "," << format_g17(mesh.y[b]) << ","
          << format_g17(m.clean[b]) << "," << format_g17(m.noisy[b]) << "\n";
    finish(out, (base / ("flux_" + std::to_string(k) + ".csv")).string());
  }
  nlohmann::json manifest;
  manifest["format"] = "eitshape-measurements-1";
  manifest["n"] = measurements.source_n;
  manifest["delta"] = measurements.delta;
  manifest["seed"] = problem.seed;
  manifest["flux_count"] = measurements.traces.size();
  nlohmann::json fluxes = nlohmann::json::array();
  for (const SideValues& g : problem.fluxes)
    fluxes.push_back({g.left, g.right, g.top, g.bottom});
  manifest["fluxes"] = fluxes;
  manifest["noise_level"] = noise_level(mesh, measurements);
  std::ofstream out = open_out((base / "manifest.json").string());
  out << manifest.dump(2) << "\n";
  finish(out, (base / "manifest.json").string());
}

MeasurementSet load_measurements(const std::string& dir, const StructuredMesh& mesh) {
  std::filesystem::path base(dir);
  std::ifstream min(base / "manifest.json");
  if (!min) throw Error("io: cannot open '" + (base / "manifest.json").string() + "'");
  nlohmann::json manifest;
  try {
    min >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error("io: bad manifest in '" + dir + "': " + e.what());
  }
  MeasurementSet out;
  out.source_n = manifest.at("n").get<int>();
  out.delta = manifest.at("delta").get<double>();
  if (out.source_n != mesh.n)
    throw DimensionError("io: measurements were generated on n=" +
                         std::to_string(out.source_n) + ", mesh has n=" +
                         std::to_string(mesh.n));
  std::size_t count = manifest.at("flux_count").get<std::size_t>();
  for (std::size_t k = 0; k < count; ++k) {
    std::string path = (base / ("flux_" + std::to_string(k) + ".csv")).string();
    std::ifstream in(path);
    if (!in) throw Error("io: cannot open '" + path + "'");
    Measurement m;
    m.clean = ScalarField(mesh.node_count());
    m.noisy = ScalarField(mesh.node_count());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      int node = 0;
      double x, y, clean, noisy;
      if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &node, &x, &y, &clean, &noisy) != 5)
        throw Error("io: bad row in '" + path + "': " + line);
      if (node < 0 || node >= mesh.node_count())
        throw DimensionError("io: node index out of range in '" + path + "'");
      m.clean[node] = clean;
      m.noisy[node] = noisy;
    }
    out.traces.push_back(std::move(m));
  }
  return out;
}

}  // namespace eitshape

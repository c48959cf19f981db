#pragma once

#include <string>

#include "eitshape/eit.hpp"

namespace eitshape {

// Shortest decimal form that round-trips a double.
std::string format_g17(double v);

// Legacy-VTK ASCII STRUCTURED_POINTS writers; node order matches the mesh
// (x fastest). Element data is reduced to one value per grid cell (mean of
// its two triangles); the CSV mirror keeps the exact per-triangle values.
void write_vtk_node_field(const std::string& path, const StructuredMesh& mesh,
                          const std::string& name, const ScalarField& field);
void write_vtk_cell_field(const std::string& path, const StructuredMesh& mesh,
                          const std::string& name, const ElementCoefficient& coeff);

void write_node_field_csv(const std::string& path, const StructuredMesh& mesh,
                          const std::string& name, const ScalarField& field);
void write_cell_field_csv(const std::string& path, const StructuredMesh& mesh,
                          const ElementCoefficient& coeff);

void write_trace_csv(const std::string& path, const OptTrace& trace);

// Per-flux boundary trace CSVs plus a JSON manifest carrying the generating
// parameters and the realized noise level.
void write_measurements(const std::string& dir, const StructuredMesh& mesh,
                        const EitProblem& problem, const MeasurementSet& measurements);

// Rebuilds the measurement set from a directory written by
// write_measurements; the mesh size must match the manifest.
MeasurementSet load_measurements(const std::string& dir, const StructuredMesh& mesh);

}  // namespace eitshape

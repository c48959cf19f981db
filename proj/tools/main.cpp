#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "eitshape/config.hpp"
#include "eitshape/io.hpp"
#include "eitshape/verify.hpp"

using namespace eitshape;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int dump_every = -1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "TOML run configuration");
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "RNG seed (overrides config)");
  cmd->add_option("--dump-every", opts.dump_every, "field dump cadence in iterations");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
}

RunConfig resolve_config(const CommonOpts& opts, RunConfig defaults = {}) {
  RunConfig cfg = std::move(defaults);
  if (!opts.config_path.empty()) cfg = load_run_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.seed >= 0) cfg.problem.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.dump_every >= 0) cfg.dump_every = opts.dump_every;
  return cfg;
}

int cmd_synth(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  if (cfg.true_shapes.empty())
    throw ConfigError("synth: the configuration must define [[true_shapes]]");
  MeasurementSet ms = synthesize_measurements(cfg.problem, cfg.true_shapes);
  StructuredMesh mesh = build_unit_square_mesh(cfg.problem.n);
  std::string dir = (std::filesystem::path(cfg.out_dir) / "measurements").string();
  write_measurements(dir, mesh, cfg.problem, ms);
  if (!opts.quiet)
    std::cout << "wrote " << ms.traces.size() << " traces to " << dir
              << "  noise_level=" << noise_level(mesh, ms) << "\n";
  return 0;
}

void dump_levelset(const RunConfig& cfg, const StructuredMesh& mesh, const LevelSet& phi,
                   const std::string& stem) {
  std::filesystem::path fields = std::filesystem::path(cfg.out_dir) / "fields";
  write_vtk_node_field((fields / (stem + ".vtk")).string(), mesh, "phi", phi.phi);
  write_node_field_csv((fields / (stem + ".csv")).string(), mesh, "phi", phi.phi);
}

int status_code(const std::string& status) {
  if (status == "converged") return 0;
  if (status == "stalled") return 2;
  return 3;  // max-iter
}

int cmd_reconstruct(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  if (cfg.initial_shapes.empty())
    throw ConfigError("reconstruct: the configuration must define [[initial_shapes]]");
  StructuredMesh mesh = build_unit_square_mesh(cfg.problem.n);
  MeasurementSet ms;
  if (!cfg.measurements_dir.empty()) {
    ms = load_measurements(cfg.measurements_dir, mesh);
  } else if (!cfg.true_shapes.empty()) {
    ms = synthesize_measurements(cfg.problem, cfg.true_shapes);
  } else {
    throw ConfigError("reconstruct: provide measurements_dir or [[true_shapes]]");
  }
  IterationCallback cb = [&](const TraceRow& row, const LevelSet& phi) {
    if (!opts.quiet)
      std::printf("iter %4d  J=%.9e  step=%.3e  dJ=%.3e  hits=%d\n", row.iter, row.J, row.step,
                  row.dJ_theta, row.stop_hits);
    if (cfg.dump_fields && cfg.dump_every > 0 && row.iter % cfg.dump_every == 0) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "phi_%05d", row.iter);
      dump_levelset(cfg, mesh, phi, stem);
    }
  };
  ReconstructionResult result = reconstruct(cfg.problem, ms, cfg.initial_shapes, cb);
  write_trace_csv((std::filesystem::path(cfg.out_dir) / "trace.csv").string(), result.trace);
  if (cfg.dump_fields) {
    dump_levelset(cfg, mesh, result.phi, "phi_final");
    ElementCoefficient sigma = sigma_from_levelset(mesh, result.phi, cfg.problem.sigma_plus,
                                                   cfg.problem.sigma_minus, cfg.problem.sigma_rule);
    std::filesystem::path fields = std::filesystem::path(cfg.out_dir) / "fields";
    write_vtk_cell_field((fields / "sigma_final.vtk").string(), mesh, "sigma", sigma);
    write_cell_field_csv((fields / "sigma_final.csv").string(), mesh, sigma);
    EitSolver solver(cfg.problem);
    std::vector<FluxStates> states;
    solver.cost(ms, result.phi, &states);
    for (std::size_t i = 0; i < states.size(); ++i) {
      write_vtk_node_field((fields / ("u_d_final_" + std::to_string(i) + ".vtk")).string(), mesh,
                           "u_d", states[i].u_d);
      write_vtk_node_field((fields / ("u_n_final_" + std::to_string(i) + ".vtk")).string(), mesh,
                           "u_n", states[i].u_n);
    }
  }
  const TraceRow& last = result.trace.rows.back();
  if (!opts.quiet) {
    if (result.trace.inverse_crime)
      std::cout << "note: data generated on the reconstruction mesh with delta=0 "
                   "(inverse crime)\n";
    if (last.grad_dev > 0.5)
      std::cout << "warning: level-set gradient deviation " << last.grad_dev
                << " exceeds 0.5; the zero level may be poorly resolved\n";
  }
  std::cout << "status=" << result.trace.status << " iterations=" << last.iter
            << " J=" << format_g17(last.J) << "\n";
  return status_code(result.trace.status);
}

struct CheckLine {
  std::string name;
  double gap;
  double tol;
  bool pass() const { return gap <= tol; }
};

int cmd_verify(int panels, int radial, int angular, bool negative_control, bool quiet) {
  ParametricCircle circle = make_circle(0.45, 0.5, 0.3, panels);
  auto zero = [](double, double) { return 0.0; };
  std::vector<CheckLine> lines;

  GapReport divergence = volume_functional_check(
      circle, [](double, double) { return 1.0; }, zero,
      [](double x, double y) { return std::array<double, 2>{x, y}; }, radial, angular);
  double exact = 2 * std::numbers::pi * circle.r * circle.r;
  lines.push_back({"divergence case: distributed vs boundary", divergence.gap, 1e-8});
  lines.push_back({"divergence case: boundary vs 2*pi*r^2",
                   std::abs(divergence.rhs - exact), 1e-8});

  GapReport tangential = volume_functional_check(
      circle, [](double x, double y) { return std::exp(x) * std::sin(y); }, zero,
      [&](double x, double y) {
        return std::array<double, 2>{-(y - circle.cy) / circle.r, (x - circle.cx) / circle.r};
      },
      radial, angular);
  lines.push_back({"structure case: tangential field, boundary value", std::abs(tangential.rhs),
                   1e-12});
  lines.push_back({"structure case: tangential field, distributed value",
                   std::abs(tangential.lhs), 1e-8});

  auto g_fn = [](double x, double y) { return std::exp(x) * std::cos(2 * y); };
  GapReport green = volume_functional_check(
      circle, zero, g_fn,
      [](double x, double y) {
        return std::array<double, 2>{std::sin(std::numbers::pi * x) * y + 0.2,
                                     std::cos(std::numbers::pi * y) * x - 0.1};
      },
      radial, angular);
  lines.push_back({"tangential Green: surface terms vs boundary density", green.gap, 1e-8});

  SmoothFunction u{[](double x, double y) { return x * x * y; },
                   [](double x, double y) { return std::array<double, 2>{2 * x * y, x * x}; },
                   [](double, double y) { return 2 * y; },
                   [](double, double) { return std::array<double, 2>{0, 2}; }};
  SmoothFunction p{
      [](double x, double y) { return std::sin(x) * std::cos(y); },
      [](double x, double y) {
        return std::array<double, 2>{std::cos(x) * std::cos(y), -std::sin(x) * std::sin(y)};
      },
      [](double x, double y) { return -2 * std::sin(x) * std::cos(y); },
      [](double x, double y) {
        return std::array<double, 2>{-2 * std::cos(x) * std::cos(y),
                                     2 * std::sin(x) * std::sin(y)};
      }};
  DataMode mode = negative_control ? DataMode::offset : DataMode::consistent;
  double r1 = equilibrium_residual_check(u, p, mode, 1e-2);
  double r2 = equilibrium_residual_check(u, p, mode, 5e-3);
  double order = std::log2(r1 / r2);
  lines.push_back({"equilibrium: residual at delta=5e-3", r2, 1e-3});
  lines.push_back({"equilibrium: order - 2", std::abs(order - 2.0), 0.2});

  CorollaryReport corollary = corollary_simplification_check(
      circle, [](double x, double y) { return 1 + 0.5 * x * y; },
      [](double x, double y) {
        return std::array<double, 2>{std::sin(std::numbers::pi * x) * y + 0.2,
                                     std::cos(std::numbers::pi * y) * x - 0.1};
      });
  lines.push_back({"corollary: projected tensor annihilates the normal",
                   corollary.max_projector_normal, 1e-12});
  lines.push_back({"corollary: tensor vs curvature term", corollary.max_curvature_gap, 1e-8});
  lines.push_back({"corollary: full vs simplified boundary density", corollary.gap, 1e-8});

  bool all = true;
  for (const CheckLine& line : lines) {
    bool ok = line.pass();
    all = all && ok;
    if (!quiet)
      std::printf("%-52s gap=%.3e tol=%.0e %s\n", line.name.c_str(), line.gap, line.tol,
                  ok ? "PASS" : "FAIL");
  }
  if (!quiet && negative_control)
    std::printf("negative control: inconsistent data leave residual %.3e (expected O(1))\n", r2);
  return all ? 0 : 1;
}

int cmd_deriv_check(const CommonOpts& opts, std::vector<double> t_levels, int field_count,
                    long long field_seed) {
  RunConfig defaults;
  defaults.problem.n = 32;
  defaults.problem.sigma_rule = SigmaRule::area_fraction;
  defaults.true_shapes.balls.push_back({0.6, 0.6, 0.15});
  defaults.initial_shapes.balls.push_back({0.45, 0.42, 0.22});
  RunConfig cfg = resolve_config(opts, std::move(defaults));
  if (cfg.true_shapes.empty() || cfg.initial_shapes.empty())
    throw ConfigError("deriv-check: true_shapes and initial_shapes are both required");
  FdCheckReport report =
      fd_consistency_check(cfg.problem, cfg.true_shapes, cfg.initial_shapes, t_levels,
                           field_count, static_cast<std::uint64_t>(field_seed));
  if (!opts.quiet) {
    for (const FdThetaReport& f : report.fields) {
      std::printf("theta seed %llu\n", static_cast<unsigned long long>(f.seed));
      std::printf("  %-12s %-16s %-16s %-12s %s\n", "t", "FD", "dJ", "error", "ratio");
      for (const FdLevel& l : f.levels)
        std::printf("  %-12.4e %-16.9e %-16.9e %-12.4e %.3f\n", l.t, l.fd, l.dj, l.err, l.ratio);
    }
    std::printf("interface-bump ratio |dJ|/||theta||_H1 = %.6e\n", report.near_ratio);
    std::printf("far-bump ratio       |dJ|/||theta||_H1 = %.6e", report.far_ratio);
    if (report.near_ratio > 0)
      std::printf("  (%.4f%% of interface bump)", 100 * report.far_ratio / report.near_ratio);
    std::printf("\n");
  }
  bool ok = report.ratios_within(1.6, 2.4);
  std::printf("deriv-check %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_mesh_info(const CommonOpts& opts, int n_flag) {
  RunConfig cfg = resolve_config(opts);
  int n = n_flag > 0 ? n_flag : cfg.problem.n;
  StructuredMesh mesh = build_unit_square_mesh(n);
  std::printf("n=%d h=%s nodes=%d triangles=%d boundary_nodes=%zu\n", mesh.n,
              format_g17(mesh.h).c_str(), mesh.node_count(), mesh.tri_count(),
              boundary_nodes(mesh, kAllSides).size());
  for (int s = 0; s < 4; ++s) {
    Side side = static_cast<Side>(s);
    std::printf("  side %-6s edges=%zu\n", side_name(side),
                mesh.side_edges[static_cast<std::size_t>(s)].size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Inclusion reconstruction for electrical impedance tomography via "
      "level-set descent on the distributed shape derivative"};
  app.require_subcommand(1);

  CommonOpts synth_opts;
  CLI::App* synth = app.add_subcommand("synth", "generate synthetic boundary measurements");
  add_common(synth, synth_opts);

  CommonOpts rec_opts;
  CLI::App* rec = app.add_subcommand("reconstruct", "run the level-set reconstruction");
  add_common(rec, rec_opts);

  bool negative_control = false;
  bool verify_quiet = false;
  int panels = 4096, radial = 256, angular = 1024;
  CLI::App* verify = app.add_subcommand("verify", "analytic tensor-calculus checks");
  verify->add_option("--panels", panels, "boundary quadrature panels (>= 16)");
  verify->add_option("--radial", radial, "radial quadrature intervals");
  verify->add_option("--angular", angular, "angular quadrature points");
  verify->add_flag("--negative-control", negative_control,
                   "use inconsistent data; the equilibrium check must fail");
  verify->add_flag("--quiet", verify_quiet, "suppress per-check lines");

  CommonOpts fd_opts;
  std::vector<double> t_levels{1e-2, 5e-3, 2.5e-3};
  int field_count = 5;
  long long field_seed = 101;
  CLI::App* fd = app.add_subcommand("deriv-check",
                                    "finite-difference check of the shape derivative");
  add_common(fd, fd_opts);
  fd->add_option("--t", t_levels, "perturbation times (halving sequence)");
  fd->add_option("--fields", field_count, "number of random test fields");
  fd->add_option("--field-seed", field_seed, "seed of the first test field");

  CommonOpts mesh_opts;
  int n_flag = 0;
  CLI::App* info = app.add_subcommand("mesh-info", "print mesh statistics");
  add_common(info, mesh_opts);
  info->add_option("--n", n_flag, "cells per side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_opts);
    if (rec->parsed()) return cmd_reconstruct(rec_opts);
    if (verify->parsed())
      return cmd_verify(panels, radial, angular, negative_control, verify_quiet);
    if (fd->parsed()) return cmd_deriv_check(fd_opts, t_levels, field_count, field_seed);
    if (info->parsed()) return cmd_mesh_info(mesh_opts, n_flag);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (residual " << e.residual << " after "
              << e.iterations << " iterations)\n";
    return 5;
  } catch (const InvalidParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InvalidShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InvalidCoefficientError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DegenerateDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

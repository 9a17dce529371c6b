#include "polydg/driver.hpp"
#include "polydg/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>

using namespace polydg;

namespace {

struct RunArgs {
  std::string preset, config, pstudy, out_dir;
  std::optional<int> degree, refinements, workers;
  std::optional<double> dt, theta;
  bool dry_run = false;
};

struct MeshGenArgs {
  std::string kind = "cartesian", domain = "verification", out;
  int n = 4, seeds = 100, lloyd = 10;
  std::uint64_t rng = 42;
};

int do_run(const RunArgs& a) {
  RunConfig cfg;
  if (!a.config.empty()) {
    cfg = load_config(a.config);
  } else {
    cfg = preset_config(a.preset.empty() ? "test1" : a.preset);
  }
  if (!a.config.empty() && !a.preset.empty() && cfg.case_name != a.preset)
    throw ConfigError(fmt::format("--preset {} conflicts with case = \"{}\" in {}", a.preset, cfg.case_name, a.config));
  if (a.degree) cfg.p_p = cfg.p_f = *a.degree;
  if (a.refinements) cfg.study.refinements = *a.refinements;
  if (!a.pstudy.empty()) cfg.study.degrees = parse_degree_list(a.pstudy);
  if (a.dt) cfg.dt = *a.dt;
  if (a.theta) cfg.theta = *a.theta;
  if (!a.out_dir.empty()) cfg.output.dir = a.out_dir;
  if (a.workers) cfg.workers = *a.workers;
  cfg.validate();
  if (a.dry_run) {
    std::cout << to_config_text(cfg);
    return 0;
  }
  const RunSummary s = run_case(cfg);
  if (s.table) {
    for (const auto& r : s.table->rows)
      spdlog::info("h={:.4g} p={} ndof={} err_Ep={:.3e} err_Ef={:.3e} eoc_Ep={:.2f} eoc_Ef={:.2f}", r.h, r.p, r.ndof, r.err_Ep,
                   r.err_Ef, r.eoc_Ep, r.eoc_Ef);
  } else {
    spdlog::info("{} steps, ndof {}, weak symmetry {:.2e}, interface flux mismatch {:.3e}", s.steps, s.ndof, s.weak_symmetry,
                 s.flux_mismatch);
    if (s.errors) spdlog::info("err_Ep={:.4e} err_Ef={:.4e} err_r={:.4e}", s.errors->err_Ep, s.errors->err_Ef, s.errors->err_r);
  }
  std::cout << (s.out_dir / "manifest.json").string() << "\n";
  return s.finite ? 0 : 3;
}

int do_mesh_gen(const MeshGenArgs& a) {
  RunConfig cfg = preset_config(a.domain == "drainage" ? "test3A" : "test1");
  cfg.mesh.kind = a.kind;
  cfg.mesh.nx = a.domain == "drainage" ? 2 * a.n : a.n;
  cfg.mesh.ny = a.n;
  cfg.mesh.seeds = a.seeds;
  cfg.mesh.lloyd = a.lloyd;
  cfg.seed = a.rng;
  cfg.validate();
  const auto mesh = build_mesh(cfg, 0);
  save_mesh(*mesh, a.out);
  spdlog::info("wrote {} cells, {} faces to {}", mesh->num_cells(), mesh->num_faces(), a.out);
  return 0;
}

int do_mesh_check(const std::string& path) {
  const PolyMesh mesh = load_mesh(path);
  const auto rep = regularity_report(mesh);
  fmt::print("cells {}\nfaces {}\np-cells {}\nf-cells {}\nh_max {:.6g}\nh_min {:.6g}\n", mesh.num_cells(), mesh.num_faces(),
             mesh.region_cells(Region::Poro).size(), mesh.region_cells(Region::Fluid).size(), rep.h_max, rep.h_min);
  fmt::print("max_cell_ratio {:.6g} (cell {})\nmax_neighbor_ratio {:.6g}\nmax_aspect {:.6g}\n", rep.max_cell_ratio,
             rep.worst_cell, rep.max_neighbor_ratio, rep.max_aspect);
  if (mesh.has_interface()) {
    const auto seg = build_interface_segmentation(mesh);
    fmt::print("interface_length {:.6g}\ninterface_segments {}\n", seg.length, seg.segments.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"polydg: discontinuous Galerkin solver for Biot/Stokes coupled problems on polygonal meshes"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a preset or configuration file");
  run->add_option("--preset", ra.preset, "test1 | test2 | test3A | test3B | custom");
  run->add_option("--config", ra.config, "Configuration file")->check(CLI::ExistingFile);
  run->add_option("--degree", ra.degree, "Polynomial degree for both regions");
  run->add_option("--refinements", ra.refinements, "Uniform refinements in the h-study (meshes = n + 1)");
  run->add_option("--pstudy", ra.pstudy, "Degrees of the p-study, e.g. 1..4");
  run->add_option("--dt", ra.dt, "Time step");
  run->add_option("--theta", ra.theta, "Theta of the time integrator");
  run->add_option("--out-dir", ra.out_dir, "Output directory");
  run->add_option("--workers", ra.workers, "Worker threads (0: hardware concurrency)");
  run->add_flag("--dry-run", ra.dry_run, "Print the resolved configuration and exit");

  auto* mesh = app.add_subcommand("mesh", "Mesh utilities");
  mesh->require_subcommand(1);
  MeshGenArgs ga;
  auto* gen = mesh->add_subcommand("gen", "Generate a mesh file");
  gen->add_option("--kind", ga.kind, "cartesian | triangles | voronoi")
      ->check(CLI::IsMember({"cartesian", "triangles", "voronoi"}));
  gen->add_option("--domain", ga.domain, "verification | drainage")->check(CLI::IsMember({"verification", "drainage"}));
  gen->add_option("--n", ga.n, "Cells per side and region (cartesian, triangles)");
  gen->add_option("--seeds", ga.seeds, "Seeds per region (voronoi)");
  gen->add_option("--lloyd", ga.lloyd, "Lloyd iterations");
  gen->add_option("--rng", ga.rng, "Random seed");
  gen->add_option("--out", ga.out, "Output JSON file")->required();
  std::string check_path;
  auto* check = mesh->add_subcommand("check", "Report mesh statistics and regularity");
  check->add_option("file", check_path, "Mesh JSON file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return do_run(ra);
    if (gen->parsed()) return do_mesh_gen(ga);
    if (check->parsed()) return do_mesh_check(check_path);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

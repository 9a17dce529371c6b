#pragma once

#include "polydg/analysis.hpp"
#include "polydg/config.hpp"
#include "polydg/postproc.hpp"

#include <filesystem>
#include <string>

namespace polydg {

struct MeshSpec {
  std::string kind = "cartesian";  // cartesian | triangles | voronoi | file
  int nx = 4, ny = 4;              // cells per region box (cartesian, triangles)
  int seeds = 100;                 // per region (voronoi)
  int lloyd = 10;
  std::string path;                // file
};

struct OutputSpec {
  std::string dir = "out";
  int stride = 0;  // VTK snapshot stride in steps (0: final state only)
  bool vtk = true;
  bool energy = true;
  bool profiles = true;
};

struct StudySpec {
  int refinements = 0;       // h-study refinements beyond the base mesh (0: single run)
  std::vector<int> degrees;  // p-study degrees (empty: none)
};

struct RunConfig {
  std::string case_name = "test1";  // test1 | test2 | test3A | test3B | custom
  MeshSpec mesh;
  int p_p = 1, p_f = 1;
  MaterialPreset material;
  PenaltySpec penalty;
  double T = 0.1, dt = 1e-3, theta = 0.5;
  SolverKind solver = SolverKind::Direct;
  double tol = 1e-12;
  OutputSpec output;
  StudySpec study;
  std::uint64_t seed = 42;
  int workers = 0;
  std::vector<RegionBox> boxes;
  /// Parabolic inflow on the left fluid boundary scaled by the logistic ramp (test3 and custom cases).
  bool inflow = false;

  /// Throws ConfigError naming the offending entry.
  void validate() const;
  ThetaScheme scheme() const;
  bool manufactured() const { return case_name == "test1" || case_name == "test2"; }
};

/// Logistic ramp 1 / (1 + exp(-10 (t - 1))).
double inflow_h(double t);

/// Boxes of the drainage problem: p = (0,2)x(-1,0), f = (0,2)x(0,1).
std::vector<RegionBox> drainage_boxes();

RunConfig preset_config(std::string_view name);
/// Starts from the preset named by `case` (default test1) and applies the file's overrides.
RunConfig config_from_doc(const ConfigDoc& doc);
RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved configuration in the config file syntax (deterministic).
std::string to_config_text(const RunConfig& cfg);

/// Mesh of refinement level `level` (cartesian/triangles: n 2^level; voronoi: seeds 4^level).
std::shared_ptr<const PolyMesh> build_mesh(const RunConfig& cfg, int level = 0);

LoadSources case_sources(const RunConfig& cfg);
InitialData case_initial(const RunConfig& cfg);

struct RunSummary {
  std::filesystem::path out_dir;
  std::vector<std::string> artifacts;
  std::string manifest;  // JSON text also written to manifest.json
  int steps = 0;
  int ndof = 0;
  double weak_symmetry = 0.0;
  double flux_mismatch = 0.0;
  InterfaceFlux interface;  // final-time interface traces
  CheckerboardReport checkerboard;
  std::optional<ErrorReport> errors;
  std::optional<ConvergenceTable> table;
  bool finite = true;
};

/// Runs the configured pipeline and writes every artifact under cfg.output.dir.
RunSummary run_case(const RunConfig& cfg);

/// "1..4" or "1,3,5" -> degree list; throws ConfigError on malformed input.
std::vector<int> parse_degree_list(std::string_view text);

/// Reads POLYDG_LOG (trace, debug, info, warn, error, off) and sets the global log level.
void init_logging();

}  // namespace polydg

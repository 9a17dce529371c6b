#include "polydg/driver.hpp"

#include "polydg/error.hpp"
#include "polydg/parallel.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace polydg {

double inflow_h(double t) { return 1.0 / (1.0 + std::exp(-10.0 * (t - 1.0))); }

std::vector<RegionBox> drainage_boxes() {
  RegionBox p;
  p.region = Region::Poro;
  p.xmin = 0.0;
  p.xmax = 2.0;
  p.ymin = -1.0;
  p.ymax = 0.0;
  p.left = BoundaryKind::Dirichlet;
  p.right = BoundaryKind::Dirichlet;
  p.bottom = BoundaryKind::Neumann;
  RegionBox f;
  f.region = Region::Fluid;
  f.xmin = 0.0;
  f.xmax = 2.0;
  f.ymin = 0.0;
  f.ymax = 1.0;
  f.left = BoundaryKind::Dirichlet;
  f.top = BoundaryKind::Dirichlet;
  f.right = BoundaryKind::Neumann;
  return {p, f};
}

void RunConfig::validate() const {
  static const std::set<std::string> cases{"test1", "test2", "test3A", "test3B", "custom"};
  POLYDG_THROW_IF(!cases.count(case_name), ConfigError,
                  fmt::format("case: unknown value '{}' (expected test1, test2, test3A, test3B or custom)", case_name));
  static const std::set<std::string> kinds{"cartesian", "triangles", "voronoi", "file"};
  POLYDG_THROW_IF(!kinds.count(mesh.kind), ConfigError, fmt::format("mesh.kind: unknown value '{}'", mesh.kind));
  POLYDG_THROW_IF(mesh.nx < 1 || mesh.ny < 1, ConfigError, "mesh.nx and mesh.ny must be >= 1");
  POLYDG_THROW_IF(mesh.seeds < 1, ConfigError, "mesh.seeds must be >= 1");
  POLYDG_THROW_IF(mesh.lloyd < 0, ConfigError, "mesh.lloyd must be >= 0");
  POLYDG_THROW_IF(mesh.kind == "file" && mesh.path.empty(), ConfigError, "mesh.path is required for mesh.kind = \"file\"");
  POLYDG_THROW_IF(p_p < 1 || p_f < 1, ConfigError, "degree.p_p and degree.p_f must be >= 1");
  POLYDG_THROW_IF(penalty.c1 <= 0 || penalty.c2 <= 0 || penalty.c3 <= 0, ConfigError, "penalty constants must be positive");
  POLYDG_THROW_IF(study.refinements < 0, ConfigError, "study.refinements must be >= 0");
  POLYDG_THROW_IF((study.refinements > 0 || !study.degrees.empty()) && !manufactured(), ConfigError,
                  "convergence studies need a manufactured case (test1 or test2)");
  for (int p : study.degrees) POLYDG_THROW_IF(p < 1, ConfigError, "study.degrees entries must be >= 1");
  POLYDG_THROW_IF(output.stride < 0, ConfigError, "output.stride must be >= 0");
  POLYDG_THROW_IF(workers < 0, ConfigError, "workers must be >= 0");
  try {
    polydg::validate(material.poro);
    polydg::validate(material.fluid);
    polydg::validate(material.iface);
    (void)scheme().num_steps(T);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ThetaScheme RunConfig::scheme() const {
  ThetaScheme s;
  s.theta = theta;
  s.dt = dt;
  s.solver = solver;
  s.tol = tol;
  return s;
}

RunConfig preset_config(std::string_view name) {
  RunConfig c;
  c.case_name = std::string(name);
  c.output.dir = "out/" + c.case_name;
  if (name == "test1" || name == "test2") {
    c.material = material_preset(name);
    c.boxes = verification_boxes();
    c.mesh.kind = "cartesian";
    c.mesh.nx = c.mesh.ny = 2;
    c.p_p = c.p_f = name == "test1" ? 1 : 2;
    c.T = 0.1;
    c.dt = 1e-3;
  } else if (name == "test3A" || name == "test3B") {
    c.material = material_preset(name);
    c.boxes = drainage_boxes();
    c.mesh.kind = "voronoi";
    c.mesh.seeds = 800;
    c.mesh.nx = 20;
    c.mesh.ny = 10;
    c.p_p = c.p_f = 3;
    c.T = 1.5;
    c.dt = 0.01;
    c.output.stride = 50;
    c.inflow = true;
  } else if (name == "custom") {
    c.material = material_preset("test3A");
    c.boxes = drainage_boxes();
    c.T = 0.1;
    c.dt = 0.01;
  } else {
    throw ConfigError(fmt::format("unknown preset '{}' (expected test1, test2, test3A, test3B or custom)", name));
  }
  return c;
}

namespace {

const std::set<std::string> kKnownKeys{
    "case", "seed", "workers", "inflow",
    "mesh.kind", "mesh.nx", "mesh.ny", "mesh.seeds", "mesh.lloyd", "mesh.path",
    "degree.p_p", "degree.p_f",
    "material.p.rho_s", "material.p.rho_f", "material.p.phi", "material.p.a", "material.p.eta", "material.p.k",
    "material.p.lambda", "material.p.mu", "material.p.beta", "material.p.m", "material.f.rho_f", "material.f.mu_f",
    "interface.alpha", "interface.delta", "interface.gamma",
    "penalty.c1", "penalty.c2", "penalty.c3", "penalty.scale_boundary",
    "time.T", "time.dt", "time.theta",
    "solver.kind", "solver.tol",
    "output.dir", "output.stride", "output.vtk", "output.energy", "output.profiles",
    "study.refinements", "study.degrees",
    "domain.p_box", "domain.f_box", "domain.p_bc", "domain.f_bc"};

RegionBox box_from(const std::vector<double>& v, Region r, const std::string& key) {
  POLYDG_THROW_IF(v.size() != 4, ConfigError, fmt::format("{}: expected [xmin, xmax, ymin, ymax]", key));
  RegionBox b;
  b.region = r;
  b.xmin = v[0];
  b.xmax = v[1];
  b.ymin = v[2];
  b.ymax = v[3];
  return b;
}

void apply_bc(RegionBox& b, const std::string& s, const std::string& key) {
  POLYDG_THROW_IF(s.size() != 4, ConfigError, fmt::format("{}: expected four letters D/N for left, right, bottom, top", key));
  BoundaryKind* sides[] = {&b.left, &b.right, &b.bottom, &b.top};
  for (int i = 0; i < 4; ++i) {
    POLYDG_THROW_IF(s[static_cast<std::size_t>(i)] != 'D' && s[static_cast<std::size_t>(i)] != 'N', ConfigError,
                    fmt::format("{}: letters must be D or N", key));
    *sides[i] = s[static_cast<std::size_t>(i)] == 'D' ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
  }
}

std::string bc_string(const RegionBox& b) {
  auto c = [](BoundaryKind k) { return k == BoundaryKind::Dirichlet ? 'D' : 'N'; };
  return {c(b.left), c(b.right), c(b.bottom), c(b.top)};
}

}  // namespace

RunConfig config_from_doc(const ConfigDoc& doc) {
  doc.require_known(kKnownKeys);
  RunConfig c = preset_config(doc.has("case") ? doc.string("case") : "test1");
  auto num = [&](const char* k, double& dst) { if (doc.has(k)) dst = doc.number(k); };
  auto integer = [&](const char* k, int& dst) { if (doc.has(k)) dst = doc.integer(k); };
  auto flag = [&](const char* k, bool& dst) { if (doc.has(k)) dst = doc.boolean(k); };
  auto str = [&](const char* k, std::string& dst) { if (doc.has(k)) dst = doc.string(k); };
  if (doc.has("seed")) c.seed = static_cast<std::uint64_t>(doc.integer("seed"));
  integer("workers", c.workers);
  flag("inflow", c.inflow);
  str("mesh.kind", c.mesh.kind);
  integer("mesh.nx", c.mesh.nx);
  integer("mesh.ny", c.mesh.ny);
  integer("mesh.seeds", c.mesh.seeds);
  integer("mesh.lloyd", c.mesh.lloyd);
  str("mesh.path", c.mesh.path);
  integer("degree.p_p", c.p_p);
  integer("degree.p_f", c.p_f);
  auto& pm = c.material.poro;
  num("material.p.rho_s", pm.rho_s);
  num("material.p.rho_f", pm.rho_f);
  num("material.p.phi", pm.phi);
  num("material.p.a", pm.a);
  num("material.p.eta", pm.eta);
  num("material.p.k", pm.k);
  num("material.p.lambda", pm.lambda);
  num("material.p.mu", pm.mu);
  num("material.p.beta", pm.beta);
  num("material.p.m", pm.m);
  num("material.f.rho_f", c.material.fluid.rho_f);
  num("material.f.mu_f", c.material.fluid.mu_f);
  num("interface.alpha", c.material.iface.alpha);
  num("interface.delta", c.material.iface.delta);
  num("interface.gamma", c.material.iface.gamma);
  num("penalty.c1", c.penalty.c1);
  num("penalty.c2", c.penalty.c2);
  num("penalty.c3", c.penalty.c3);
  flag("penalty.scale_boundary", c.penalty.scale_boundary);
  num("time.T", c.T);
  num("time.dt", c.dt);
  num("time.theta", c.theta);
  if (doc.has("solver.kind")) {
    const auto& k = doc.string("solver.kind");
    POLYDG_THROW_IF(k != "direct" && k != "iterative", ConfigError, "solver.kind must be \"direct\" or \"iterative\"");
    c.solver = k == "direct" ? SolverKind::Direct : SolverKind::Iterative;
  }
  num("solver.tol", c.tol);
  str("output.dir", c.output.dir);
  integer("output.stride", c.output.stride);
  flag("output.vtk", c.output.vtk);
  flag("output.energy", c.output.energy);
  flag("output.profiles", c.output.profiles);
  integer("study.refinements", c.study.refinements);
  if (doc.has("study.degrees")) {
    c.study.degrees.clear();
    for (double v : doc.array("study.degrees")) {
      POLYDG_THROW_IF(v != std::floor(v), ConfigError, "study.degrees entries must be integers");
      c.study.degrees.push_back(static_cast<int>(v));
    }
  }
  if (doc.has("domain.p_box") || doc.has("domain.f_box") || doc.has("domain.p_bc") || doc.has("domain.f_bc")) {
    POLYDG_THROW_IF(c.case_name != "custom", ConfigError, "domain.* keys are only accepted with case = \"custom\"");
    if (doc.has("domain.p_box")) c.boxes[0] = box_from(doc.array("domain.p_box"), Region::Poro, "domain.p_box");
    if (doc.has("domain.f_box")) c.boxes[1] = box_from(doc.array("domain.f_box"), Region::Fluid, "domain.f_box");
    if (doc.has("domain.p_bc")) apply_bc(c.boxes[0], doc.string("domain.p_bc"), "domain.p_bc");
    if (doc.has("domain.f_bc")) apply_bc(c.boxes[1], doc.string("domain.f_bc"), "domain.f_bc");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  POLYDG_THROW_IF(!in, ConfigError, fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_doc(ConfigDoc::parse(ss.str()));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string to_config_text(const RunConfig& c) {
  const auto& pm = c.material.poro;
  std::string s;
  s += fmt::format("case = \"{}\"\nseed = {}\nworkers = {}\ninflow = {}\n", c.case_name, c.seed, c.workers, c.inflow);
  s += fmt::format("\n[mesh]\nkind = \"{}\"\nnx = {}\nny = {}\nseeds = {}\nlloyd = {}\npath = \"{}\"\n", c.mesh.kind, c.mesh.nx,
                   c.mesh.ny, c.mesh.seeds, c.mesh.lloyd, c.mesh.path);
  s += fmt::format("\n[degree]\np_p = {}\np_f = {}\n", c.p_p, c.p_f);
  s += fmt::format(
      "\n[material.p]\nrho_s = {}\nrho_f = {}\nphi = {}\na = {}\neta = {}\nk = {}\nlambda = {}\nmu = {}\nbeta = {}\nm = {}\n",
      pm.rho_s, pm.rho_f, pm.phi, pm.a, pm.eta, pm.k, pm.lambda, pm.mu, pm.beta, pm.m);
  s += fmt::format("\n[material.f]\nrho_f = {}\nmu_f = {}\n", c.material.fluid.rho_f, c.material.fluid.mu_f);
  s += fmt::format("\n[interface]\nalpha = {}\ndelta = {}\ngamma = {}\n", c.material.iface.alpha, c.material.iface.delta,
                   c.material.iface.gamma);
  s += fmt::format("\n[penalty]\nc1 = {}\nc2 = {}\nc3 = {}\nscale_boundary = {}\n", c.penalty.c1, c.penalty.c2, c.penalty.c3,
                   c.penalty.scale_boundary);
  s += fmt::format("\n[time]\nT = {}\ndt = {}\ntheta = {}\n", c.T, c.dt, c.theta);
  s += fmt::format("\n[solver]\nkind = \"{}\"\ntol = {}\n", c.solver == SolverKind::Direct ? "direct" : "iterative", c.tol);
  s += fmt::format("\n[output]\ndir = \"{}\"\nstride = {}\nvtk = {}\nenergy = {}\nprofiles = {}\n", c.output.dir, c.output.stride,
                   c.output.vtk, c.output.energy, c.output.profiles);
  s += fmt::format("\n[study]\nrefinements = {}\ndegrees = [{}]\n", c.study.refinements, fmt::join(c.study.degrees, ", "));
  if (c.case_name == "custom") {
    const auto& p = c.boxes[0];
    const auto& f = c.boxes[1];
    s += fmt::format("\n[domain]\np_box = [{}, {}, {}, {}]\nf_box = [{}, {}, {}, {}]\np_bc = \"{}\"\nf_bc = \"{}\"\n", p.xmin,
                     p.xmax, p.ymin, p.ymax, f.xmin, f.xmax, f.ymin, f.ymax, bc_string(p), bc_string(f));
  }
  return s;
}

std::shared_ptr<const PolyMesh> build_mesh(const RunConfig& cfg, int level) {
  const auto& m = cfg.mesh;
  if (m.kind == "file") {
    POLYDG_THROW_IF(level != 0, ConfigError, "refinement studies need a generated mesh family");
    return std::make_shared<PolyMesh>(load_mesh(m.path));
  }
  if (m.kind == "voronoi") {
    const int seeds = m.seeds * (1 << (2 * level));
    return std::make_shared<PolyMesh>(generate_voronoi(cfg.boxes, seeds, m.lloyd, cfg.seed));
  }
  const int f = 1 << level;
  return std::make_shared<PolyMesh>(generate_cartesian(cfg.boxes, m.nx * f, m.ny * f, m.kind == "triangles"));
}

LoadSources case_sources(const RunConfig& cfg) {
  if (cfg.manufactured()) return manufactured_case(cfg.case_name).sources;
  LoadSources s;
  s.f_p = [](const Vec2&, double) { return Vec2::Zero().eval(); };
  s.g_p = s.f_p;
  s.H = s.f_p;
  s.F_f = [](const Vec2&, double) { return Mat2::Zero().eval(); };
  if (cfg.inflow) {
    const RegionBox& fb = cfg.boxes[1];
    const double x0 = fb.xmin, y0 = fb.ymin, ly = fb.ymax - fb.ymin, tol = 1e-9 * (fb.xmax - fb.xmin);
    // -40 y (y - 1) on the unit-height channel, rescaled to the fluid box height
    s.g_fD = [x0, y0, ly, tol](const Vec2& x, double t) {
      if (std::abs(x.x() - x0) > tol) return Vec2::Zero().eval();
      const double y = (x.y() - y0) / ly;
      return Vec2(inflow_h(t) * -40.0 * y * (y - 1.0), 0.0);
    };
  }
  return s;
}

InitialData case_initial(const RunConfig& cfg) {
  if (cfg.manufactured()) return manufactured_case(cfg.case_name).initial(0.0);
  return {};
}

std::vector<int> parse_degree_list(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    POLYDG_THROW_IF(ec != std::errc{} || ptr != s.data() + s.size() || v < 1, ConfigError,
                    fmt::format("degree list '{}': expected positive integers as \"a..b\" or \"a,b,c\"", text));
    return v;
  };
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const int a = to_int(text.substr(0, dots)), b = to_int(text.substr(dots + 2));
    POLYDG_THROW_IF(b < a, ConfigError, fmt::format("degree list '{}': empty range", text));
    for (int p = a; p <= b; ++p) out.push_back(p);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(to_int(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

void init_logging() {
  const char* env = std::getenv("POLYDG_LOG");
  if (!env || !*env) {
    spdlog::set_level(spdlog::level::info);
    return;
  }
  const auto lvl = spdlog::level::from_str(env);
  if (lvl == spdlog::level::off && std::string_view(env) != "off") {
    spdlog::warn("POLYDG_LOG='{}' is not a log level; using info", env);
    spdlog::set_level(spdlog::level::info);
    return;
  }
  spdlog::set_level(lvl);
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  POLYDG_THROW_IF(!out, Error, fmt::format("cannot write '{}'", p.string()));
  out << s;
}

std::vector<ProfileLine> default_profiles(const RunConfig& cfg) {
  const RegionBox& p = cfg.boxes[0];
  const RegionBox& f = cfg.boxes[1];
  std::vector<ProfileLine> lines;
  const double xm = 0.5 * (std::min(p.xmin, f.xmin) + std::max(p.xmax, f.xmax));
  const double ym = 0.5 * (std::min(p.ymin, f.ymin) + std::max(p.ymax, f.ymax));
  lines.push_back({"horizontal", {std::min(p.xmin, f.xmin), ym}, {std::max(p.xmax, f.xmax), ym}, 201});
  lines.push_back({"vertical", {xm, std::min(p.ymin, f.ymin)}, {xm, std::max(p.ymax, f.ymax)}, 201});
  return lines;
}

}  // namespace

RunSummary run_case(const RunConfig& cfg) {
  cfg.validate();
  set_worker_count(cfg.workers);
  const auto t_start = std::chrono::steady_clock::now();
  RunSummary sum;
  sum.out_dir = cfg.output.dir;
  std::filesystem::create_directories(sum.out_dir);
  nlohmann::json manifest;
  manifest["config"] = to_config_text(cfg);
  manifest["case"] = cfg.case_name;
  auto add = [&](const std::string& name) { sum.artifacts.push_back(name); };

  const ThetaScheme scheme = cfg.scheme();
  if (cfg.study.refinements > 0 || !cfg.study.degrees.empty()) {
    const auto mc = manufactured_case(cfg.case_name);
    nlohmann::json studies = nlohmann::json::array();
    if (cfg.study.refinements > 0) {
      std::vector<std::shared_ptr<const PolyMesh>> meshes;
      for (int l = 0; l <= cfg.study.refinements; ++l) meshes.push_back(build_mesh(cfg, l));
      auto table = run_convergence(mc, meshes, cfg.p_p, scheme, cfg.penalty, cfg.T);
      write_text(sum.out_dir / "convergence_h.csv", table.to_csv());
      add("convergence_h.csv");
      studies.push_back({{"kind", "h"}, {"rows", table.rows.size()}});
      sum.table = std::move(table);
    }
    if (!cfg.study.degrees.empty()) {
      auto table = run_pstudy(mc, build_mesh(cfg, 0), cfg.study.degrees, scheme, cfg.penalty, cfg.T);
      write_text(sum.out_dir / "convergence_p.csv", table.to_csv());
      add("convergence_p.csv");
      studies.push_back({{"kind", "p"}, {"rows", table.rows.size()}});
      if (!sum.table) sum.table = std::move(table);
    }
    manifest["studies"] = studies;
  } else {
    const auto mesh = build_mesh(cfg, 0);
    DgSpace space(mesh, cfg.p_p, cfg.p_f);
    MaterialModel mat(*mesh, cfg.material.poro, cfg.material.fluid, cfg.material.iface);
    spdlog::info("{}: {} cells, ndof {}", cfg.case_name, mesh->num_cells(), space.ndof());
    const GlobalSystem sys = assemble_system(space, mat, cfg.penalty);
    const LoadSources src = case_sources(cfg);
    const SimState x0 = project_initial(space, case_initial(cfg), 0.0);
    std::vector<EnergyRecord> energy;
    std::optional<SimState> prev;
    auto write_snapshot = [&](const SimState& s, const std::optional<SimState>& before) {
      const auto snap = make_snapshot(space, mat, s, before, src);
      const auto name = fmt::format("snapshot_{:05d}.vtk", s.k);
      export_vtk(snap, space, sum.out_dir / name);
      add(name);
    };
    RunOptions opts;
    opts.T = cfg.T;
    opts.observer = [&](const SimState& s) {
      sum.weak_symmetry = std::max(sum.weak_symmetry, weak_symmetry_defect(space, sys, s.X));
      if (cfg.output.energy) energy.push_back(energy_record(space, mat, cfg.penalty, sys, s));
      if (cfg.output.vtk && cfg.output.stride > 0 && s.k > 0 && s.k % cfg.output.stride == 0) write_snapshot(s, prev);
      prev = s;
    };
    const auto load = [&](double t) { return assemble_load(space, mat, cfg.penalty, src, t); };
    Trajectory traj = run(sys, scheme, x0, load, opts);
    const SimState& fin = traj.final_state;
    sum.steps = traj.steps;
    sum.ndof = space.ndof();
    sum.finite = fin.X.allFinite();
    if (cfg.output.vtk && (cfg.output.stride == 0 || fin.k % cfg.output.stride != 0)) write_snapshot(fin, traj.previous_state);
    if (cfg.output.energy) {
      write_text(sum.out_dir / "energy.csv", energy_csv(energy));
      add("energy.csv");
    }
    const auto flux = interface_flux(space, mat, fin.X, src, fin.t);
    sum.flux_mismatch = flux.mismatch_l2;
    sum.interface = flux;
    const auto pp = recover_poro_pressure(space, mat, fin.X);
    sum.checkerboard = pressure_checkerboard(space, pp);
    if (cfg.output.profiles) {
      export_interface_csv(flux, sum.out_dir / "interface_flux.csv");
      add("interface_flux.csv");
      const auto snap = make_snapshot(space, mat, fin, traj.previous_state, src);
      export_csv_profiles(snap, space, default_profiles(cfg), sum.out_dir / "profiles.csv");
      add("profiles.csv");
    }
    nlohmann::json metrics{{"steps", sum.steps},
                           {"ndof", sum.ndof},
                           {"cells", mesh->num_cells()},
                           {"weak_symmetry_max", sum.weak_symmetry},
                           {"interface_flux_mismatch", sum.flux_mismatch},
                           {"p_p_max_abs", sum.checkerboard.max_abs},
                           {"p_p_range", sum.checkerboard.range},
                           {"p_p_max_neighbor_jump", sum.checkerboard.max_neighbor_jump}};
    if (cfg.manufactured()) {
      const auto mc = manufactured_case(cfg.case_name);
      sum.errors = error_vs_exact(space, mat, cfg.penalty, fin.X, mc, fin.t);
      metrics["err_Ep"] = sum.errors->err_Ep;
      metrics["err_Ef"] = sum.errors->err_Ef;
      metrics["err_r"] = sum.errors->err_r;
    }
    manifest["metrics"] = metrics;
  }
  manifest["artifacts"] = sum.artifacts;
  manifest["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  sum.manifest = manifest.dump(2);
  write_text(sum.out_dir / "manifest.json", sum.manifest + "\n");
  return sum;
}

}  // namespace polydg

#include "polydg/analysis.hpp"
#include "polydg/driver.hpp"
#include "polydg/parallel.hpp"
#include "test_support.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <set>

using namespace polydg;
using namespace polydg::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

void detail(const std::string& s) { fmt::print("    {}\n", s); }

std::filesystem::path out_root() { return std::filesystem::current_path() / "acceptance_out"; }

std::shared_ptr<const PolyMesh> voronoi_level(int seeds, int level, std::uint64_t rng) {
  int n = seeds;
  for (int l = 0; l < level; ++l) n *= 4;
  return std::make_shared<PolyMesh>(generate_voronoi(verification_boxes(), n, 10, rng));
}

ThetaScheme cn(double dt) {
  ThetaScheme s;
  s.theta = 0.5;
  s.dt = dt;
  return s;
}

double last_eoc(const ConvergenceTable& t, bool energy_total) {
  const auto& a = t.rows[t.rows.size() - 2];
  const auto& b = t.rows.back();
  if (!energy_total) return std::min(b.eoc_Ep, b.eoc_Ef);
  return eoc(std::hypot(a.err_Ep, a.err_Ef), std::hypot(b.err_Ep, b.err_Ef), a.h, b.h);
}

void print_table(const ConvergenceTable& t) {
  for (const auto& r : t.rows)
    detail(fmt::format("h={:.4f} p={} cells={} ndof={} err_Ep={:.3e} err_Ef={:.3e} eoc_Ep={:.2f} eoc_Ef={:.2f}", r.h,
                       r.p, r.cells, r.ndof, r.err_Ep, r.err_Ef, r.eoc_Ep, r.eoc_Ef));
}

Outcome criterion1() {
  const auto mc = manufactured_case("test1");
  bool ok = true;
  std::string worst;
  double min_margin = 1e300;
  for (const char* kind : {"cartesian", "voronoi"}) {
    std::vector<std::shared_ptr<const PolyMesh>> meshes;
    for (int l = 0; l < 4; ++l)
      meshes.push_back(std::string(kind) == "cartesian" ? cartesian(2 << l) : voronoi_level(8, l, 7));
    for (int p : {1, 2}) {
      auto t = run_convergence(mc, meshes, p, cn(1e-3), {}, 0.1);
      detail(fmt::format("{} p={}", kind, p));
      print_table(t);
      const double e = last_eoc(t, false);
      ok = ok && e >= p - 0.15;
      if (e - p < min_margin) {
        min_margin = e - p;
        worst = fmt::format("{} p={} min EOC {:.3f}", kind, p, e);
      }
    }
  }
  return {ok, fmt::format("Test-1 h-convergence, worst: {} (need >= p-0.15)", worst)};
}

Outcome criterion2() {
  const auto mc = manufactured_case("test1");
  const auto mesh = voronoi_level(50, 0, 11);
  const std::vector<int> degrees{1, 2, 3, 4, 5};
  auto total = [](const ConvergenceRow& r) { return std::hypot(r.err_Ep, r.err_Ef); };
  bool ok = true;
  std::vector<double> plateau;
  for (double dt : {1e-3, 1e-4}) {
    const auto t = run_pstudy(mc, mesh, degrees, cn(dt), {}, 0.1);
    detail(fmt::format("dt={:g} cells={}", dt, mesh->num_cells()));
    print_table(t);
    double floor = total(t.rows.back());
    for (const auto& r : t.rows) floor = std::min(floor, total(r));
    bool mono = true;
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i)
      if (total(t.rows[i]) > 5 * floor && total(t.rows[i + 1]) >= total(t.rows[i])) mono = false;
    detail(fmt::format("dt={:g}: plateau {:.3e}, monotone until plateau: {}", dt, floor, mono));
    ok = ok && mono;
    plateau.push_back(floor);
  }
  const double ratio = plateau[0] / plateau[1];
  ok = ok && ratio >= 50 && ratio <= 200;
  return {ok, fmt::format("Test-1 p-study, plateau ratio dt=1e-3/1e-4 = {:.1f} (need [50, 200])", ratio)};
}

Outcome criterion3() {
  const auto mc = manufactured_case("test2");
  std::vector<std::shared_ptr<const PolyMesh>> meshes;
  for (int l = 0; l < 4; ++l) meshes.push_back(cartesian(2 << l));
  bool ok = true;
  std::string line;
  for (int p : {1, 2, 3}) {
    auto t = run_convergence(mc, meshes, p, cn(1e-3), {}, 0.1);
    detail(fmt::format("p={}", p));
    print_table(t);
    const double e = last_eoc(t, true);
    ok = ok && e >= p - 0.2;
    line += fmt::format(" p={}:{:.3f}", p, e);
  }
  return {ok, fmt::format("Test-2 h-convergence, EOC in E:{} (need >= p-0.2)", line)};
}

Outcome criterion4() {
  bool ok = true;
  double worst = -1e300;
  int meshes = 0;
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    auto mesh = voronoi_level(10 + static_cast<int>(seed % 7), 0, seed);
    const char* preset = seed == 202u ? "test3B" : "test1";
    const DgSpace space(mesh, 2, 2);
    const auto mat = model(*mesh, material_preset(preset));
    const auto sys = assemble_system(space, mat, {});
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    SimState x0;
    x0.X = Eigen::VectorXd::Zero(space.ndof());
    for (Field f : {Field::U, Field::W, Field::V, Field::Z})
      for (int i = 0; i < space.size(f); ++i) x0.X[space.offset(f) + i] = nd(rng);
    for (double theta : {0.5, 1.0}) {
      ThetaScheme sc;
      sc.theta = theta;
      sc.dt = 1e-2;
      RunOptions o;
      o.T = 0.3;
      std::vector<double> e;
      o.observer = [&](const SimState& s) { e.push_back(stored_energy(space, sys, s.X)); };
      const int n = space.ndof();
      run(sys, sc, x0, [n](double) { return Eigen::VectorXd::Zero(n).eval(); }, o);
      double growth = -1e300;
      for (std::size_t k = 1; k < e.size(); ++k) growth = std::max(growth, (e[k] - e[k - 1]) / e[k - 1]);
      detail(fmt::format("seed {} {} theta={} cells={} E0={:.4e} ET={:.4e} max relative increase {:.2e}", seed, preset,
                         theta, mesh->num_cells(), e.front(), e.back(), growth));
      ok = ok && growth <= 1e-10;
      worst = std::max(worst, growth);
    }
    ++meshes;
  }
  return {ok, fmt::format("energy non-increasing on {} random meshes, theta in {{0.5, 1}}, max relative increase {:.2e}",
                          meshes, worst)};
}

struct PresetRuns {
  std::map<std::string, RunSummary> runs;
};

RunSummary run_preset(RunConfig cfg, const std::string& tag) {
  cfg.output.dir = (out_root() / tag).string();
  const auto t0 = std::chrono::steady_clock::now();
  auto s = run_case(cfg);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail(fmt::format("{}: {} mesh, ndof {}, steps {}, {:.1f} s, weak symmetry {:.2e}, flux mismatch {:.3e}",
                     tag, cfg.mesh.kind, s.ndof, s.steps, sec, s.weak_symmetry, s.flux_mismatch));
  return s;
}

PresetRuns& preset_runs() {
  static PresetRuns cache = [] {
    PresetRuns r;
    for (const char* name : {"test1", "test2", "test3A", "test3B"}) r.runs[name] = run_preset(preset_config(name), name);
    for (const char* name : {"test3A", "test3B"}) {
      auto cfg = preset_config(name);
      cfg.mesh.seeds /= 4;
      cfg.output.vtk = false;
      r.runs[std::string(name) + "_coarse"] = run_preset(cfg, std::string(name) + "_coarse");
    }
    return r;
  }();
  return cache;
}

Outcome criterion5() {
  double worst = 0;
  for (const auto& [name, s] : preset_runs().runs) worst = std::max(worst, s.weak_symmetry);
  return {worst <= 1e-10,
          fmt::format("weak symmetry over {} preset runs, max ||Bf^T S||/||S|| = {:.2e} (need <= 1e-10)",
                      preset_runs().runs.size(), worst)};
}

Outcome criterion6() {
  bool ok = true;
  double sym = 0, coup = 0;
  for (const char* name : {"test1", "test2", "test3A", "test3B", "custom"}) {
    const auto cfg = preset_config(name);
    const auto mesh = build_mesh(cfg);
    const DgSpace space(mesh, cfg.p_p, cfg.p_f);
    const MaterialModel mat(*mesh, cfg.material.poro, cfg.material.fluid, cfg.material.iface);
    const auto sys = assemble_system(space, mat, cfg.penalty);
    const auto rep = matrix_diagnostics(space, sys);
    std::string syms;
    for (const auto& [k, v] : rep.symmetry) syms += fmt::format(" {}={:.1e}", k, v);
    detail(fmt::format("{}: cells={} density_pd={} elastic_pd={} fluid_mass_psd={} |Cpf-Cfp^T|={:.1e}{}", name,
                       mesh->num_cells(), rep.density_pd, rep.elastic_pd, rep.fluid_mass_psd, rep.coupling_transpose,
                       syms));
    ok = ok && rep.max_symmetry() <= 1e-12 && rep.density_pd && rep.elastic_pd && rep.coupling_transpose <= 1e-12;
    sym = std::max(sym, rep.max_symmetry());
    coup = std::max(coup, rep.coupling_transpose);
  }
  return {ok, fmt::format("structural properties on all presets, symmetry {:.1e}, coupling transpose {:.1e}", sym, coup)};
}

Outcome criterion7() {
  const auto mc = manufactured_case("test1");
  const double t = 0.05;
  bool ok = true;
  double worst = 0, worst_p2 = 0;
  for (int p : {2, 3, 4}) {
    for (bool vor : {false, true}) {
      auto mesh = vor ? voronoi_level(12, 0, 5) : cartesian(2);
      const DgSpace space(mesh, p, p);
      const auto mat = model(*mesh, mc.params);
      const PenaltySpec spec;
      const Eigen::VectorXd X = exact_state(space, mc, t);
      const auto e = error_vs_exact(space, mat, spec, X, mc, t);
      const double semi = std::sqrt(std::max({e.poro.dg_e(), e.poro.dg_p(), e.fluid.dg_f()}));
      const auto sys = assemble_system(space, mat, spec);
      const double h = 1e-2;
      Eigen::VectorXd Xt = Eigen::VectorXd::Zero(space.ndof());
      set_block(space, Xt, Field::U, project_poro_vector(space, mc.u_t, t));
      set_block(space, Xt, Field::W, project_poro_vector(space, mc.w_t, t));
      set_block(space, Xt, Field::V,
                (project_poro_vector(space, mc.u_t, t + h) - project_poro_vector(space, mc.u_t, t - h)) / (2 * h));
      set_block(space, Xt, Field::Z,
                (project_poro_vector(space, mc.w_t, t + h) - project_poro_vector(space, mc.w_t, t - h)) / (2 * h));
      set_block(space, Xt, Field::S, project_tensor(space, mc.Sigma_t, t));
      const Eigen::VectorXd F = assemble_load(space, mat, spec, mc.sources, t);
      const Eigen::VectorXd AX = sys.A * X;
      const double res = (sys.M * Xt + AX - F).cwiseAbs().maxCoeff() / (AX.cwiseAbs().maxCoeff() + F.cwiseAbs().maxCoeff());
      detail(fmt::format("p={} {}: max dG seminorm error {:.2e}, err_Ep {:.2e}, err_Ef {:.2e}, relative residual {:.2e}", p,
                         vor ? "voronoi" : "cartesian", semi, e.err_Ep, e.err_Ef, res));
      if (p >= 3) {
        ok = ok && semi <= 1e-9 && e.err_Ep <= 1e-9 && e.err_Ef <= 1e-9 && res <= 1e-9;
        worst = std::max({worst, semi, e.err_Ep, e.err_Ef});
      } else {
        worst_p2 = std::max({worst_p2, semi, e.err_Ep, e.err_Ef});
      }
    }
  }
  detail("displacements contain x^2 y terms, so exact reproduction starts at p = 3");
  return {ok, fmt::format("polynomial exactness at t=0.05: p=3,4 max error {:.2e} (need <= 1e-9); p=2 error {:.2e}, "
                          "fields are cubic",
                          worst, worst_p2)};
}

Outcome criterion8() {
  bool ok = true;
  std::string line;
  for (const char* name : {"test1", "test2"}) {
    const auto r = residual_oracle(manufactured_case(name), 100, 2024);
    ok = ok && r.max() <= 1e-6;
    line += fmt::format(" {}={:.2e}", name, r.max());
  }
  return {ok, fmt::format("manufactured-source residuals at 100 points:{} (need <= 1e-6)", line)};
}

Outcome criterion9() {
  std::vector<double> beta;
  for (int n : {2, 4, 8}) {
    auto mesh = cartesian(n, true);
    const DgSpace space(mesh, 2, 2);
    const auto mat = model(*mesh, material_preset("test1"));
    const auto r = infsup_estimate(space, mat, {}, 20000);
    detail(fmt::format("n={} fluid triangles={} stress dofs={} rotation dofs={} beta={:.4e}", n,
                       mesh->region_cells(Region::Fluid).size(), r.n_stress, r.n_rotation, r.beta));
    beta.push_back(r.beta);
  }
  bool ok = true;
  for (double b : beta) ok = ok && b > 1e-3 && b >= beta[0] / 2 && b <= beta[0] * 2;
  return {ok, fmt::format("inf-sup on nested triangulations, p_f=2: beta = {:.4f}, {:.4f}, {:.4f}", beta[0], beta[1],
                          beta[2])};
}

Outcome criterion10() {
  auto& runs = preset_runs().runs;
  bool ok = true;
  std::string line;
  for (const char* name : {"test3A", "test3B"}) {
    const auto& fine = runs.at(name);
    const auto& coarse = runs.at(std::string(name) + "_coarse");
    ok = ok && fine.finite && coarse.finite && fine.flux_mismatch < coarse.flux_mismatch;
    line += fmt::format(" {}: finite={} mismatch {:.3e} -> {:.3e};", name, fine.finite, coarse.flux_mismatch,
                        fine.flux_mismatch);
    for (const auto* r : {&coarse, &fine}) {
      const auto& f = r->interface;
      const double L = f.length;
      detail(fmt::format("{} ndof {}: mismatch on s/L in [0,0.1] {:.3e}, [0.1,0.9] {:.3e}, [0.9,1] {:.3e}", name, r->ndof,
                         f.mismatch_l2_on(0, 0.1 * L), f.mismatch_l2_on(0.1 * L, 0.9 * L), f.mismatch_l2_on(0.9 * L, L)));
    }
  }
  const auto& cb = runs.at("test3B").checkerboard;
  const double ratio = cb.max_neighbor_jump / cb.range;
  detail(fmt::format("set B p_p: max |p_p| {:.4e}, range {:.4e}, max neighbor jump {:.4e}, jump/range {:.3f}", cb.max_abs,
                     cb.range, cb.max_neighbor_jump, ratio));
  ok = ok && std::isfinite(cb.max_abs) && cb.max_neighbor_jump <= 10 * cb.range;
  return {ok, fmt::format("Test-3 to T=1.5:{} set B jump/range {:.3f}", line, ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  set_worker_count(0);
  std::filesystem::create_directories(out_root());
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  // usage: acceptance [--allow-fail N]... [N]...
  std::set<int> selected, allowed;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--allow-fail" && i + 1 < argc) allowed.insert(std::stoi(argv[++i]));
    else selected.insert(std::stoi(a));
  }
  int failures = 0;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    fmt::print("criterion {}\n", id);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    lines.push_back(fmt::format("{} {:2d}: {} [{:.1f} s]", o.pass ? "PASS" : "FAIL", id, o.summary, sec));
    fmt::print("{}\n", lines.back());
    std::fflush(stdout);
    if (!o.pass && allowed.count(id)) lines.back() += " (known failure, allowed)";
    failures += o.pass || allowed.count(id) ? 0 : 1;
  }
  fmt::print("\nsummary\n");
  for (const auto& l : lines) fmt::print("{}\n", l);
  return failures == 0 ? 0 : 1;
}

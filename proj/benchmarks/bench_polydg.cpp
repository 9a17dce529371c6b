#include "polydg/assembly.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/stepper.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace polydg;

namespace {

struct Setup {
  std::shared_ptr<const PolyMesh> mesh;
  DgSpace space;
  MaterialModel mat;
  Setup(int seeds, int p)
      : mesh(std::make_shared<PolyMesh>(generate_voronoi(verification_boxes(), seeds, 5, 3))),
        space(mesh, p, p),
        mat(*mesh, material_preset("test1").poro, material_preset("test1").fluid, material_preset("test1").iface) {}
};

void BM_VoronoiMesh(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(generate_voronoi(verification_boxes(), static_cast<int>(st.range(0)), 10, 1));
}
BENCHMARK(BM_VoronoiMesh)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_AssembleSystem(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(assemble_system(s.space, s.mat, {}));
  st.counters["ndof"] = s.space.ndof();
}
BENCHMARK(BM_AssembleSystem)->Args({50, 1})->Args({50, 3})->Args({200, 2})->Unit(benchmark::kMillisecond);

void BM_AssembleLoad(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const auto mc = manufactured_case("test1");
  double t = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(assemble_load(s.space, s.mat, {}, mc.sources, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_AssembleLoad)->Args({50, 1})->Args({50, 3})->Unit(benchmark::kMillisecond);

void BM_Factorize(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const auto sys = assemble_system(s.space, s.mat, {});
  ThetaScheme sc;
  sc.dt = 1e-3;
  for (auto _ : st) benchmark::DoNotOptimize(Stepper(sys, sc));
}
BENCHMARK(BM_Factorize)->Args({50, 2})->Args({200, 2})->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const auto sys = assemble_system(s.space, s.mat, {});
  ThetaScheme sc;
  sc.dt = 1e-3;
  Stepper stepper(sys, sc);
  const int n = s.space.ndof();
  const LoadProvider zero = [n](double) { return Eigen::VectorXd::Zero(n).eval(); };
  SimState x{0.0, 0, Eigen::VectorXd::Ones(n)};
  for (auto _ : st) x = stepper.step(x, zero);
  st.counters["ndof"] = n;
}
BENCHMARK(BM_Step)->Args({50, 2})->Args({200, 2})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

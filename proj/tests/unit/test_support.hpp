#pragma once

#include "polydg/assembly.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/stepper.hpp"

#include <memory>

namespace polydg::testing {

inline std::shared_ptr<const PolyMesh> cartesian(int n, bool tri = false) {
  return std::make_shared<PolyMesh>(generate_cartesian(verification_boxes(), n, n, tri));
}

inline std::shared_ptr<const PolyMesh> voronoi(int seeds, std::uint64_t seed) {
  return std::make_shared<PolyMesh>(generate_voronoi(verification_boxes(), seeds, 5, seed));
}

inline MaterialModel model(const PolyMesh& mesh, const MaterialPreset& p) {
  return MaterialModel(mesh, p.poro, p.fluid, p.iface);
}

/// L2 projection of a tensor field onto the stress block.
inline Eigen::VectorXd project_tensor(const DgSpace& space, const TensorFn& f, double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.size(Field::S));
  const int d = space.dim(Region::Fluid);
  for (int K : space.mesh().region_cells(Region::Fluid)) {
    const auto& tab = space.cell_table(K);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const Mat2 v = f(tab.rule.points[q], t);
      const double comps[4] = {v(0, 0), v(0, 1), v(1, 0), v(1, 1)};
      for (int c = 0; c < 4; ++c)
        for (int m = 0; m < d; ++m)
          out[space.local(Field::S, K, c, m)] += tab.rule.weights[q] * comps[c] * tab.phi(static_cast<Eigen::Index>(q), m);
    }
  }
  return out;
}

/// L2 projection of a scalar field onto the rotation block.
inline Eigen::VectorXd project_rotation(const DgSpace& space, const ScalarFn& f, double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.size(Field::R));
  for (int K : space.mesh().region_cells(Region::Fluid)) {
    const auto& tab = space.cell_table(K);
    for (std::size_t q = 0; q < tab.rule.size(); ++q)
      for (int m = 0; m < space.dim_r(); ++m)
        out[space.local(Field::R, K, 0, m)] += tab.rule.weights[q] * f(tab.rule.points[q], t) * tab.phi(static_cast<Eigen::Index>(q), m);
  }
  return out;
}

inline void set_block(const DgSpace& s, Eigen::VectorXd& X, Field f, const Eigen::VectorXd& v) {
  X.segment(s.offset(f), s.size(f)) = v;
}

/// Projection of the exact manufactured state at t (S and R included).
inline Eigen::VectorXd exact_state(const DgSpace& s, const ManufacturedCase& mc, double t) {
  Eigen::VectorXd X = Eigen::VectorXd::Zero(s.ndof());
  set_block(s, X, Field::U, project_poro_vector(s, mc.u, t));
  set_block(s, X, Field::W, project_poro_vector(s, mc.w, t));
  set_block(s, X, Field::V, project_poro_vector(s, mc.u_t, t));
  set_block(s, X, Field::Z, project_poro_vector(s, mc.w_t, t));
  set_block(s, X, Field::S, project_tensor(s, mc.Sigma, t));
  set_block(s, X, Field::R, project_rotation(s, mc.r, t));
  return X;
}

}  // namespace polydg::testing

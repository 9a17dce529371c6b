#pragma once

#include "polydg/dg_space.hpp"
#include "polydg/material.hpp"

#include <Eigen/Sparse>

#include <filesystem>
#include <map>
#include <string>

namespace polydg {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

struct PenaltySpec {
  double c1 = 10.0;
  double c2 = 10.0;
  double c3 = 10.0;
  /// Multiply the boundary-face penalties by c as well (the plain formula uses the bare value there).
  bool scale_boundary = true;
};

enum class PenaltyKind : std::uint8_t { Elastic, Pressure, Fluid };

/// Face penalty: c max_K coef_K p_K^2 / h_K on interior faces, the single-cell value on boundary faces.
double penalty_chi(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, int face,
                   PenaltyKind kind);

/// Faces carrying the SIPG terms of each region.
bool is_poro_sipg_face(FaceTag tag);
bool is_fluid_sipg_face(FaceTag tag);

/// Square blocks over the p vector space V_h^p (rows: test, cols: trial).
struct PoroBlocks {
  SpMat M_rho, M_rhof, M_rhow;
  SpMat D_etak, D_gamma;
  SpMat Ae;
  SpMat Bp;        // B^p(w, z)
  SpMat Bp_beta;   // B^p(w, beta v): rows v, cols w
  SpMat Bp_beta2;  // B^p(beta u, beta v)
};

/// Blocks over the stress space S_h^f; Bf has rows S and columns R.
struct FluidBlocks {
  SpMat Mf, Df, Af, Bf;
};

/// Interface blocks with rows in S_h^f and columns in V_h^p, plus the independently assembled C^fp.
struct CouplingBlocks {
  SpMat N;        // <w.n, tau n.n>
  SpMat N_alpha;  // <alpha u.n, tau n.n>
  SpMat T;        // <u.t, tau n.t>
  SpMat Cfp_v;    // C^fp(Sigma, (v, 0)): rows V_h^p, cols S_h^f
  SpMat Cfp_z;    // C^fp(Sigma, (0, z))
};

PoroBlocks assemble_poro(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec);
FluidBlocks assemble_fluid(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec);
CouplingBlocks assemble_coupling(const DgSpace& space, const MaterialModel& mat);

struct GlobalSystem {
  SpMat M, A;
  PoroBlocks poro;
  FluidBlocks fluid;
  CouplingBlocks coupling;
};

/// Places the blocks in the 6x6 layout of M X' + A X = F.
GlobalSystem build_global(const DgSpace& space, PoroBlocks poro, FluidBlocks fluid, CouplingBlocks coupling);
GlobalSystem assemble_system(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec);

/// Named blocks for dumping and diagnostics.
std::map<std::string, const SpMat*> named_blocks(const GlobalSystem& sys);
/// Coordinate text (row col value per line) for each named block, one file per block.
void dump_matrices(const GlobalSystem& sys, const std::filesystem::path& dir);

/// Extracts a sub-block of a sparse matrix.
SpMat sparse_block(const SpMat& m, int r0, int c0, int nr, int nc);

}  // namespace polydg

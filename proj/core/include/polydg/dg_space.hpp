#pragma once

#include "polydg/mesh.hpp"
#include "polydg/quadrature.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>

namespace polydg {

/// Number of scalar modes of P_p in two dimensions.
constexpr int scalar_dim(int p) { return p < 0 ? 0 : (p + 1) * (p + 2) / 2; }

/// L2-orthonormal modal basis of one cell: phi = C * m with bounding-box-scaled monomials m.
class CellBasis {
public:
  CellBasis() = default;
  CellBasis(const PolyMesh& mesh, int cell, int degree, const QuadratureRule& rule);

  int degree() const { return degree_; }
  int dim() const { return scalar_dim(degree_); }
  const Eigen::MatrixXd& coefficients() const { return coeff_; }

  /// Values of all modes at x.
  Eigen::VectorXd eval(const Vec2& x) const;
  /// Values (dim) and gradients (dim x 2) at x.
  void eval(const Vec2& x, Eigen::VectorXd& values, Eigen::MatrixX2d& grads) const;

private:
  void monomials(const Vec2& x, Eigen::VectorXd& m, Eigen::MatrixX2d* dm) const;

  int degree_ = 0;
  Vec2 center_ = Vec2::Zero();
  Vec2 half_ = Vec2::Ones();
  Eigen::MatrixXd coeff_;
};

/// The six unknown blocks in solver order.
enum class Field : std::uint8_t { U, W, V, Z, S, R };
inline constexpr Field kAllFields[] = {Field::U, Field::W, Field::V, Field::Z, Field::S, Field::R};
std::string_view to_string(Field f);

/// Basis values at a rule's points: rows are points, columns modes.
struct BasisTable {
  QuadratureRule rule;
  Eigen::MatrixXd phi, dx, dy;
};

class DgSpace {
public:
  /// exactness < 0 selects 2 max(p_p, p_f) + 2.
  DgSpace(std::shared_ptr<const PolyMesh> mesh, int p_p, int p_f, int exactness = -1);

  const PolyMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const PolyMesh> mesh_ptr() const { return mesh_; }
  int degree(Region r) const { return r == Region::Poro ? p_p_ : p_f_; }
  int cell_degree(int cell) const { return degree(mesh_->cell(cell).region); }
  /// Scalar modes per cell of a region.
  int dim(Region r) const { return scalar_dim(degree(r)); }
  /// Modes of the rotation multiplier space P_{p_f-1}.
  int dim_r() const { return scalar_dim(p_f_ - 1); }
  int exactness() const { return exactness_; }

  const CellBasis& basis(int cell) const { return bases_[static_cast<std::size_t>(cell)]; }
  const BasisTable& cell_table(int cell) const { return cell_tables_[static_cast<std::size_t>(cell)]; }
  const QuadratureRule& face_rule(int face) const { return face_rules_[static_cast<std::size_t>(face)]; }
  /// Basis of cells[side] of the face at the face rule points.
  const BasisTable& face_table(int face, int side) const {
    return face_tables_[static_cast<std::size_t>(2 * face + side)];
  }

  /// Number of components of a field per cell (2 for vectors, 4 for S, 1 for R).
  static int components(Field f);
  /// DoFs per cell of a field.
  int cell_block(Field f) const;
  int size(Field f) const;
  int offset(Field f) const { return offsets_[static_cast<std::size_t>(f)]; }
  int ndof() const { return ndof_; }
  /// Index inside the field block; `cell` is a global cell id of the matching region.
  int local(Field f, int cell, int comp, int mode) const;
  int global(Field f, int cell, int comp, int mode) const { return offset(f) + local(f, cell, comp, mode); }
  /// First local index of a cell inside the field block.
  int cell_start(Field f, int cell) const;

private:
  std::shared_ptr<const PolyMesh> mesh_;
  int p_p_, p_f_, exactness_;
  std::vector<CellBasis> bases_;
  std::vector<BasisTable> cell_tables_;
  std::vector<QuadratureRule> face_rules_;
  std::vector<BasisTable> face_tables_;
  std::array<int, 7> offsets_{};
  int ndof_ = 0;
};

/// Fills values of every mode of `basis` at the rule points.
BasisTable tabulate(const CellBasis& basis, const QuadratureRule& rule);

/// Jump and average of traces on a face; the minus trace is absent on boundary faces.
struct ScalarJump {
  Vec2 jump;
  double average;
};
struct VectorJump {
  Mat2 jump;        // v+ (x) n+ + v- (x) n-
  Vec2 average;
  double normal_jump;  // v+.n+ + v-.n-
};
struct TensorJump {
  Vec2 jump;  // tau+ n+ + tau- n-
  Mat2 average;
};
ScalarJump jump_average(double plus, std::optional<double> minus, const Vec2& n_plus);
VectorJump jump_average(const Vec2& plus, std::optional<Vec2> minus, const Vec2& n_plus);
TensorJump jump_average(const Mat2& plus, std::optional<Mat2> minus, const Vec2& n_plus);

inline double tr(const Mat2& t) { return t(0, 0) + t(1, 1); }
inline Mat2 dev(const Mat2& t) { return t - 0.5 * tr(t) * Mat2::Identity(); }
/// (t12 - t21) / 2, the independent component of skew(t).
inline double skew2(const Mat2& t) { return 0.5 * (t(0, 1) - t(1, 0)); }

/// Row-major component index of S: 0 -> 11, 1 -> 12, 2 -> 21, 3 -> 22.
inline Mat2 tensor_from_components(const double* c) {
  Mat2 t;
  t << c[0], c[1], c[2], c[3];
  return t;
}

}  // namespace polydg

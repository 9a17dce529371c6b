#include "polydg/dg_space.hpp"

#include "polydg/error.hpp"

#include <fmt/format.h>

#include <Eigen/Cholesky>

namespace polydg {

CellBasis::CellBasis(const PolyMesh& mesh, int cell, int degree, const QuadratureRule& rule) : degree_(degree) {
  POLYDG_THROW_IF(degree < 0, InvalidArgument, "polynomial degree must be >= 0");
  Vec2 lo = mesh.vertices()[static_cast<std::size_t>(mesh.cell(cell).vertices[0])];
  Vec2 hi = lo;
  for (int v : mesh.cell(cell).vertices) {
    lo = lo.cwiseMin(mesh.vertices()[static_cast<std::size_t>(v)]);
    hi = hi.cwiseMax(mesh.vertices()[static_cast<std::size_t>(v)]);
  }
  center_ = 0.5 * (lo + hi);
  half_ = 0.5 * (hi - lo);
  const int n = dim();
  coeff_ = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd m;
  // Two Gram-Cholesky passes: the second removes the round-off left by the first.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      monomials(rule.points[q], m, nullptr);
      const Eigen::VectorXd phi = coeff_ * m;
      gram.noalias() += rule.weights[q] * phi * phi.transpose();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    POLYDG_THROW_IF(llt.info() != Eigen::Success, GeometryError,
                    fmt::format("cell {}: basis Gram matrix is not positive definite", cell));
    const Eigen::MatrixXd L = llt.matrixL();
    coeff_ = L.triangularView<Eigen::Lower>().solve(coeff_);
  }
}

void CellBasis::monomials(const Vec2& x, Eigen::VectorXd& m, Eigen::MatrixX2d* dm) const {
  const int n = dim();
  const double sx = (x.x() - center_.x()) / half_.x();
  const double sy = (x.y() - center_.y()) / half_.y();
  double px[32], py[32];
  px[0] = py[0] = 1.0;
  for (int k = 1; k <= degree_; ++k) {
    px[k] = px[k - 1] * sx;
    py[k] = py[k - 1] * sy;
  }
  m.resize(n);
  if (dm) dm->resize(n, 2);
  int idx = 0;
  for (int d = 0; d <= degree_; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      m(idx) = px[i] * py[j];
      if (dm) {
        (*dm)(idx, 0) = i > 0 ? i * px[i - 1] * py[j] / half_.x() : 0.0;
        (*dm)(idx, 1) = j > 0 ? j * px[i] * py[j - 1] / half_.y() : 0.0;
      }
      ++idx;
    }
  }
}

Eigen::VectorXd CellBasis::eval(const Vec2& x) const {
  Eigen::VectorXd m;
  monomials(x, m, nullptr);
  return coeff_ * m;
}

void CellBasis::eval(const Vec2& x, Eigen::VectorXd& values, Eigen::MatrixX2d& grads) const {
  Eigen::VectorXd m;
  Eigen::MatrixX2d dm;
  monomials(x, m, &dm);
  values = coeff_ * m;
  grads = coeff_ * dm;
}

std::string_view to_string(Field f) {
  switch (f) {
    case Field::U: return "U";
    case Field::W: return "W";
    case Field::V: return "V";
    case Field::Z: return "Z";
    case Field::S: return "S";
    case Field::R: return "R";
  }
  return "?";
}

BasisTable tabulate(const CellBasis& basis, const QuadratureRule& rule) {
  BasisTable t;
  t.rule = rule;
  const auto nq = static_cast<Eigen::Index>(rule.size());
  t.phi.resize(nq, basis.dim());
  t.dx.resize(nq, basis.dim());
  t.dy.resize(nq, basis.dim());
  Eigen::VectorXd v;
  Eigen::MatrixX2d g;
  for (Eigen::Index q = 0; q < nq; ++q) {
    basis.eval(rule.points[static_cast<std::size_t>(q)], v, g);
    t.phi.row(q) = v.transpose();
    t.dx.row(q) = g.col(0).transpose();
    t.dy.row(q) = g.col(1).transpose();
  }
  return t;
}

DgSpace::DgSpace(std::shared_ptr<const PolyMesh> mesh, int p_p, int p_f, int exactness)
    : mesh_(std::move(mesh)), p_p_(p_p), p_f_(p_f) {
  POLYDG_THROW_IF(!mesh_, InvalidArgument, "DgSpace needs a mesh");
  POLYDG_THROW_IF(p_p < 1 || p_f < 1, InvalidArgument, "polynomial degrees must be >= 1");
  exactness_ = exactness < 0 ? 2 * std::max(p_p, p_f) + 2 : exactness;
  POLYDG_THROW_IF(exactness_ > kMaxQuadratureExactness || 2 * std::max(p_p, p_f) > kMaxQuadratureExactness,
                  InvalidArgument, fmt::format("degree too high for the supported quadrature (exactness {})", exactness_));
  const auto& m = *mesh_;
  bases_.resize(static_cast<std::size_t>(m.num_cells()));
  cell_tables_.resize(bases_.size());
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto pts = m.cell_points(c);
    auto rule = cell_quadrature(pts, m.cell(c).centroid, exactness_);
    const int deg = cell_degree(c);
    if (2 * deg > exactness_) {
      auto gram_rule = cell_quadrature(pts, m.cell(c).centroid, 2 * deg);
      bases_[static_cast<std::size_t>(c)] = CellBasis(m, c, deg, gram_rule);
    } else {
      bases_[static_cast<std::size_t>(c)] = CellBasis(m, c, deg, rule);
    }
    cell_tables_[static_cast<std::size_t>(c)] = tabulate(bases_[static_cast<std::size_t>(c)], rule);
  }
  face_rules_.resize(static_cast<std::size_t>(m.num_faces()));
  face_tables_.resize(2 * face_rules_.size());
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto& face = m.face(f);
    face_rules_[static_cast<std::size_t>(f)] = face_quadrature(face.a, face.b, exactness_);
    for (int s = 0; s < 2; ++s)
      if (face.cells[static_cast<std::size_t>(s)] >= 0)
        face_tables_[static_cast<std::size_t>(2 * f + s)] =
            tabulate(basis(face.cells[static_cast<std::size_t>(s)]), face_rules_[static_cast<std::size_t>(f)]);
  }
  offsets_[0] = 0;
  for (int k = 0; k < 6; ++k) offsets_[static_cast<std::size_t>(k + 1)] = offsets_[static_cast<std::size_t>(k)] + size(kAllFields[k]);
  ndof_ = offsets_[6];
}

int DgSpace::components(Field f) {
  switch (f) {
    case Field::S: return 4;
    case Field::R: return 1;
    default: return 2;
  }
}

int DgSpace::cell_block(Field f) const {
  if (f == Field::S) return 4 * dim(Region::Fluid);
  if (f == Field::R) return dim_r();
  return 2 * dim(Region::Poro);
}

int DgSpace::size(Field f) const {
  const Region r = (f == Field::S || f == Field::R) ? Region::Fluid : Region::Poro;
  return cell_block(f) * mesh_->num_region_cells(r);
}

int DgSpace::cell_start(Field f, int cell) const {
  const auto& c = mesh_->cell(cell);
  const Region want = (f == Field::S || f == Field::R) ? Region::Fluid : Region::Poro;
  POLYDG_THROW_IF(c.region != want, InvalidArgument,
                  fmt::format("cell {} does not carry field {}", cell, to_string(f)));
  return c.local_index * cell_block(f);
}

int DgSpace::local(Field f, int cell, int comp, int mode) const {
  const int d = f == Field::R ? dim_r() : dim(f == Field::S ? Region::Fluid : Region::Poro);
  return cell_start(f, cell) + comp * d + mode;
}

ScalarJump jump_average(double plus, std::optional<double> minus, const Vec2& n) {
  if (!minus) return {plus * n, plus};
  return {(plus - *minus) * n, 0.5 * (plus + *minus)};
}

VectorJump jump_average(const Vec2& plus, std::optional<Vec2> minus, const Vec2& n) {
  const Vec2 d = minus ? Vec2(plus - *minus) : plus;
  const Vec2 avg = minus ? Vec2(0.5 * (plus + *minus)) : plus;
  return {d * n.transpose(), avg, d.dot(n)};
}

TensorJump jump_average(const Mat2& plus, std::optional<Mat2> minus, const Vec2& n) {
  const Mat2 d = minus ? Mat2(plus - *minus) : plus;
  const Mat2 avg = minus ? Mat2(0.5 * (plus + *minus)) : plus;
  return {d * n, avg};
}

}  // namespace polydg

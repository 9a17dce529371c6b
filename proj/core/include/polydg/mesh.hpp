#pragma once

#include "polydg/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polydg {

enum class Region : std::uint8_t { Poro, Fluid };

enum class FaceTag : std::uint8_t {
  InteriorP,
  InteriorF,
  Interface,
  DirichletP,
  NeumannP,
  DirichletF,
  NeumannF,
};

std::string_view to_string(FaceTag tag);
FaceTag face_tag_from_string(std::string_view s);
std::string_view to_string(Region r);
Region region_of(FaceTag boundary_tag);

struct Face {
  Vec2 a, b;
  /// Mesh vertex ids of the endpoints when the face is a full cell edge; -1 for interface sub-segments.
  std::array<int, 2> vertex_ids{-1, -1};
  double length = 0.0;
  /// Unit normal pointing from cells[0] into cells[1]; outward on the boundary.
  /// On interface faces cells[0] is the poroelastic cell, so this is n_p.
  Vec2 normal = Vec2::Zero();
  std::array<int, 2> cells{-1, -1};
  FaceTag tag = FaceTag::InteriorP;

  bool is_boundary() const { return cells[1] < 0; }
  Vec2 midpoint() const { return 0.5 * (a + b); }
};

struct Cell {
  std::vector<int> vertices;  // counter-clockwise
  Region region = Region::Poro;
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();
  double diameter = 0.0;
  std::vector<int> faces;
  int local_index = -1;  // position among the cells of the same region
};

/// Input description of a cell: a counter-clockwise vertex loop plus its region.
struct CellSpec {
  std::vector<int> vertices;
  Region region = Region::Poro;
};

/// Tags the boundary faces. Called with the face geometry (normal already outward) and the owning cell's region.
using BoundaryClassifier = std::function<FaceTag(const Face& face, Region region)>;

/// Two-region polygonal mesh with classified faces. Immutable after construction.
class PolyMesh {
public:
  PolyMesh() = default;

  /// Validates the cells, builds faces (including the interface overlay) and tags the boundary.
  static PolyMesh build(std::vector<Vec2> vertices, std::vector<CellSpec> cells,
                        const BoundaryClassifier& classify);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Cell& cell(int i) const { return cells_[static_cast<std::size_t>(i)]; }
  const Face& face(int i) const { return faces_[static_cast<std::size_t>(i)]; }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  /// Global ids of the cells of one region, ordered by local index.
  const std::vector<int>& region_cells(Region r) const {
    return r == Region::Poro ? poro_cells_ : fluid_cells_;
  }
  int num_region_cells(Region r) const { return static_cast<int>(region_cells(r).size()); }

  std::vector<int> faces_with_tag(FaceTag tag) const;
  bool has_interface() const { return has_interface_; }
  /// n_p on the (straight) interface; zero when there is none.
  const Vec2& interface_normal() const { return interface_normal_; }
  /// t_p = n_p rotated by -pi/2.
  Vec2 interface_tangent() const { return rotate_minus_90(interface_normal_); }

  double region_area(Region r) const;
  std::vector<Vec2> cell_points(int cell) const;

  bool operator==(const PolyMesh& other) const;

private:
  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<int> poro_cells_;
  std::vector<int> fluid_cells_;
  bool has_interface_ = false;
  Vec2 interface_normal_ = Vec2::Zero();
};

enum class BoundaryKind : std::uint8_t { Dirichlet, Neumann };

/// Axis-aligned region used by the generators. Sides on the interface ignore their kind.
struct RegionBox {
  Region region = Region::Poro;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  BoundaryKind left = BoundaryKind::Dirichlet;
  BoundaryKind right = BoundaryKind::Dirichlet;
  BoundaryKind bottom = BoundaryKind::Dirichlet;
  BoundaryKind top = BoundaryKind::Dirichlet;
  /// Per-box subdivision overrides for the Cartesian generator (0 = use the global value).
  int nx = 0, ny = 0;

  double area() const { return (xmax - xmin) * (ymax - ymin); }
};

/// Structured quadrilateral (or split-triangle) cells per region box.
PolyMesh generate_cartesian(std::span<const RegionBox> boxes, int nx, int ny, bool triangulate = false);

/// Lloyd-relaxed Voronoi cells clipped to each region box; n_seeds per region.
PolyMesh generate_voronoi(std::span<const RegionBox> boxes, int n_seeds, int lloyd_iters,
                          std::uint64_t rng_seed);

/// Boundary classifier derived from region boxes (side of the owning box -> Dirichlet/Neumann).
BoundaryClassifier box_classifier(std::vector<RegionBox> boxes);

/// JSON mesh file: vertices, cells {verts, region}, boundary_tags {edge, tag}.
PolyMesh load_mesh(const std::filesystem::path& path);
PolyMesh parse_mesh_json(std::string_view text);
void save_mesh(const PolyMesh& mesh, const std::filesystem::path& path);
std::string mesh_to_json(const PolyMesh& mesh);

struct RegularityReport {
  /// max_F h_K |F| / (d |S_K^F|) per cell, with centroid-fan simplices.
  std::vector<double> cell_ratio;
  /// max(h_K+/h_K-, h_K-/h_K+) per face (1 on boundary faces).
  std::vector<double> neighbor_ratio;
  double max_cell_ratio = 0.0;
  int worst_cell = -1;
  double max_neighbor_ratio = 1.0;
  /// Heuristic shape metric: max h_K^2 / |K|.
  double max_aspect = 0.0;
  double h_max = 0.0;
  double h_min = 0.0;
};

RegularityReport regularity_report(const PolyMesh& mesh);

struct InterfaceSegment {
  Vec2 a, b;
  double s0 = 0.0, s1 = 0.0;  // arc coordinates along t_p from the interface start
  int face = -1;              // mesh face id
  int p_cell = -1, f_cell = -1;
  /// Endpoints of the full cell edges that contain this piece.
  std::array<Vec2, 2> p_edge, f_edge;
};

struct InterfaceSegmentation {
  Vec2 start, end;
  double length = 0.0;
  std::vector<InterfaceSegment> segments;  // sorted by s0
};

InterfaceSegmentation build_interface_segmentation(const PolyMesh& mesh);

/// Points of the welded set; `index` maps each input point to its representative.
struct WeldResult {
  std::vector<Vec2> points;
  std::vector<int> index;
};
WeldResult weld_points(std::span<const Vec2> pts, double tol);

}  // namespace polydg

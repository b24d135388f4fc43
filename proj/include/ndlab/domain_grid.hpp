#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ndlab/types.hpp"

namespace ndlab {

enum class ShapeKind { UnitSquare, LShape, Disk, Polygon, PuncturedDisk };

/// Catalog metadata. These are fixed per shape kind, never computed.
struct ShapeFlags {
  bool uniform_exterior_cone = true;
  bool wiener_regular = true;
};

struct ShapeSpec {
  ShapeKind kind = ShapeKind::UnitSquare;
  Point center{0.5, 0.5};
  double radius = 0.5;
  double puncture_radius = 0.0;
  /// Polygon vertices, counter-clockwise, first vertex not repeated.
  std::vector<Point> vertices;

  static ShapeSpec unit_square();
  /// [0,1]^2 minus [1/2,1]^2.
  static ShapeSpec l_shape();
  static ShapeSpec disk(Point center, double radius);
  /// Validates simplicity and normalizes orientation; throws InvalidShape.
  static ShapeSpec polygon(std::vector<Point> vertices);
  /// puncture_radius == 0 removes the single lattice node nearest the center.
  static ShapeSpec punctured_disk(Point center, double radius, double puncture_radius);

  ShapeFlags flags() const;
  std::string kind_name() const;
};

/// Nearest point of the shape's boundary. The center of a punctured disk with
/// zero puncture radius counts as boundary.
Point nearest_boundary_point(const ShapeSpec& spec, Point p);

/// `h` is written only when given.
nlohmann::json shape_to_json(const ShapeSpec& spec, std::optional<double> h = std::nullopt);
/// Reads {"kind", "params", "h"?}. Throws Error(ConfigError) on malformed input.
ShapeSpec shape_from_json(const nlohmann::json& j, std::optional<double>* h = nullptr);

struct GridNode {
  int i = 0;
  int j = 0;
  Point pos;
  /// Nearest point of the boundary for boundary nodes (where Dirichlet data
  /// is evaluated); equal to `pos` for interior nodes.
  Point trace;
};

/// Uniform-lattice rasterization of a planar domain. Lattice points sit at
/// (i*h, j*h) for integers i, j, so grids with equal h share coordinates
/// bit-for-bit. Nodes are numbered interior first, then boundary, each in
/// row-major (j, i) order.
class DomainGrid {
 public:
  const ShapeSpec& shape() const { return shape_; }
  double h() const { return h_; }

  std::span<const GridNode> interior() const { return {nodes_.data(), num_interior_}; }
  std::span<const GridNode> boundary() const {
    return {nodes_.data() + num_interior_, nodes_.size() - num_interior_};
  }
  std::span<const GridNode> nodes() const { return nodes_; }

  std::size_t num_interior() const { return num_interior_; }
  std::size_t num_boundary() const { return nodes_.size() - num_interior_; }
  std::size_t num_nodes() const { return nodes_.size(); }

  bool is_interior(std::size_t global) const { return global < num_interior_; }

  /// Global node index of lattice point (i, j), or -1 if unclassified.
  int find(int i, int j) const;

  /// 4-neighbour connectivity of the interior node set.
  bool interior_connected() const;

  /// Bilinear interpolation of node data (interior then boundary ordering) at
  /// an arbitrary point; exact at lattice points. Throws if a needed corner is
  /// not a grid node.
  double interpolate(const Vector& all_nodes, Point p) const;

 private:
  friend DomainGrid build_domain(const ShapeSpec& spec, double h);

  ShapeSpec shape_;
  double h_ = 0.0;
  std::vector<GridNode> nodes_;
  std::size_t num_interior_ = 0;
  int i_min_ = 0;
  int j_min_ = 0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<int> lookup_;
};

/// Throws EmptyInterior when no lattice point lies strictly inside the shape.
DomainGrid build_domain(const ShapeSpec& spec, double h);

struct EnclosingBall {
  DomainGrid grid;
  Point center;
  double radius = 0.0;
  /// injection[k] is the ball node (always interior) at the same lattice
  /// point as node k of the source grid.
  std::vector<int> injection;
};

EnclosingBall enclosing_ball(const DomainGrid& grid, double margin);

/// Stacks interior and boundary values into one node vector.
Vector stack_nodes(const GridFunction& u);

}  // namespace ndlab

#include "ndlab/domain_grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "ndlab/error.hpp"

namespace ndlab {

namespace {

constexpr double kTieTolerance = 1e-12;  // relative to h

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

Point nearest_on_segment(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {a.x + t * dx, a.y + t * dy};
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int d1 = sign(cross(q1, q2, p1));
  const int d2 = sign(cross(q1, q2, p2));
  const int d3 = sign(cross(p1, p2, q1));
  const int d4 = sign(cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

int winding_number(Point p, const std::vector<Point>& v) {
  int wn = 0;
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = v[k];
    const Point b = v[(k + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(a, b, p) > 0.0) ++wn;
    } else if (b.y <= p.y && cross(a, b, p) < 0.0) {
      --wn;
    }
  }
  return wn;
}

struct Probe {
  bool inside = false;  // in the open set, before the tie-break
  Point nearest;        // nearest boundary point
};

Point radial_projection(Point p, Point c, double r) {
  const double d = distance(p, c);
  if (d == 0.0) return {c.x + r, c.y};
  return {c.x + r * (p.x - c.x) / d, c.y + r * (p.y - c.y) / d};
}

Probe probe_polygon(Point p, const std::vector<Point>& v) {
  Probe r;
  r.inside = winding_number(p, v) != 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point q = nearest_on_segment(p, v[k], v[(k + 1) % v.size()]);
    const double d = distance(p, q);
    if (d < best) {
      best = d;
      r.nearest = q;
    }
  }
  return r;
}

Probe probe_square(Point p) {
  Probe r;
  r.inside = p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
  if (!r.inside) {
    r.nearest = {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)};
    return r;
  }
  const double dl = p.x, dr = 1.0 - p.x, db = p.y, dt = 1.0 - p.y;
  const double m = std::min({dl, dr, db, dt});
  if (m == dl) r.nearest = {0.0, p.y};
  else if (m == dr) r.nearest = {1.0, p.y};
  else if (m == db) r.nearest = {p.x, 0.0};
  else r.nearest = {p.x, 1.0};
  return r;
}

std::vector<Point> l_shape_vertices() {
  return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {0.0, 1.0}};
}

struct BoundingBox {
  double xmin, xmax, ymin, ymax;
};

BoundingBox bounding_box(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeKind::UnitSquare:
    case ShapeKind::LShape: return {0.0, 1.0, 0.0, 1.0};
    case ShapeKind::Disk:
    case ShapeKind::PuncturedDisk:
      return {s.center.x - s.radius, s.center.x + s.radius, s.center.y - s.radius, s.center.y + s.radius};
    case ShapeKind::Polygon: {
      BoundingBox b{s.vertices[0].x, s.vertices[0].x, s.vertices[0].y, s.vertices[0].y};
      for (const Point& v : s.vertices) {
        b.xmin = std::min(b.xmin, v.x);
        b.xmax = std::max(b.xmax, v.x);
        b.ymin = std::min(b.ymin, v.y);
        b.ymax = std::max(b.ymax, v.y);
      }
      return b;
    }
  }
  return {0.0, 1.0, 0.0, 1.0};
}

class ShapeProbe {
 public:
  ShapeProbe(const ShapeSpec& s, double h) : s_(s), h_(h) {
    if (s.kind == ShapeKind::LShape) poly_ = l_shape_vertices();
    if (s.kind == ShapeKind::Polygon) poly_ = s.vertices;
    if (s.kind == ShapeKind::PuncturedDisk && s.puncture_radius == 0.0) {
      puncture_i_ = static_cast<int>(std::lround(s.center.x / h));
      puncture_j_ = static_cast<int>(std::lround(s.center.y / h));
    }
  }

  /// Returns {strictly inside after tie-break, nearest boundary point}.
  std::pair<bool, Point> classify(int i, int j) const {
    const Point p{i * h_, j * h_};
    Probe pr;
    switch (s_.kind) {
      case ShapeKind::UnitSquare: pr = probe_square(p); break;
      case ShapeKind::LShape:
      case ShapeKind::Polygon: pr = probe_polygon(p, poly_); break;
      case ShapeKind::Disk:
        pr.inside = distance(p, s_.center) < s_.radius;
        pr.nearest = radial_projection(p, s_.center, s_.radius);
        break;
      case ShapeKind::PuncturedDisk: {
        const double d = distance(p, s_.center);
        const Point outer = radial_projection(p, s_.center, s_.radius);
        if (s_.puncture_radius == 0.0) {
          if (i == puncture_i_ && j == puncture_j_) return {false, s_.center};
          pr.inside = d < s_.radius;
          pr.nearest = std::abs(s_.radius - d) <= d ? outer : s_.center;
        } else {
          pr.inside = d < s_.radius && d > s_.puncture_radius;
          const Point inner = radial_projection(p, s_.center, s_.puncture_radius);
          pr.nearest = std::abs(s_.radius - d) <= std::abs(d - s_.puncture_radius) ? outer : inner;
        }
        break;
      }
    }
    if (!pr.inside) return {false, pr.nearest};
    if (distance(p, pr.nearest) <= kTieTolerance * h_) return {false, pr.nearest};
    return {true, p};
  }

 private:
  const ShapeSpec& s_;
  double h_;
  std::vector<Point> poly_;
  int puncture_i_ = std::numeric_limits<int>::min();
  int puncture_j_ = std::numeric_limits<int>::min();
};

}  // namespace

// ---------------------------------------------------------------- ShapeSpec

ShapeSpec ShapeSpec::unit_square() {
  ShapeSpec s;
  s.kind = ShapeKind::UnitSquare;
  return s;
}

ShapeSpec ShapeSpec::l_shape() {
  ShapeSpec s;
  s.kind = ShapeKind::LShape;
  return s;
}

ShapeSpec ShapeSpec::disk(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorCode::InvalidShape, "disk radius must be positive");
  ShapeSpec s;
  s.kind = ShapeKind::Disk;
  s.center = center;
  s.radius = radius;
  return s;
}

ShapeSpec ShapeSpec::punctured_disk(Point center, double radius, double puncture_radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidShape, "disk radius must be positive");
  if (!(puncture_radius >= 0.0) || !(puncture_radius < radius))
    throw Error(ErrorCode::InvalidShape, "puncture radius must lie in [0, radius)");
  ShapeSpec s;
  s.kind = ShapeKind::PuncturedDisk;
  s.center = center;
  s.radius = radius;
  s.puncture_radius = puncture_radius;
  return s;
}

ShapeSpec ShapeSpec::polygon(std::vector<Point> v) {
  if (v.size() >= 2 && v.front().x == v.back().x && v.front().y == v.back().y) v.pop_back();
  if (v.size() < 3) throw Error(ErrorCode::InvalidShape, "polygon needs at least 3 distinct vertices");
  for (const Point& p : v)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::InvalidShape, "non-finite vertex");
  const std::size_t n = v.size();
  double area2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = v[k];
    const Point b = v[(k + 1) % n];
    area2 += a.x * b.y - b.x * a.y;
  }
  if (area2 == 0.0) throw Error(ErrorCode::InvalidShape, "polygon has zero area");
  for (std::size_t a = 0; a < n; ++a) {
    const Point p1 = v[a], p2 = v[(a + 1) % n];
    if (p1.x == p2.x && p1.y == p2.y) throw Error(ErrorCode::InvalidShape, "repeated vertex");
    for (std::size_t b = a + 1; b < n; ++b) {
      const Point q1 = v[b], q2 = v[(b + 1) % n];
      const bool adjacent = b == a + 1 || (a == 0 && b == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex.
        const Point shared = (b == a + 1) ? p2 : p1;
        const Point other_p = (b == a + 1) ? p1 : p2;
        const Point other_q = (b == a + 1) ? q2 : q1;
        if (cross(shared, other_p, other_q) == 0.0) {
          const double dot = (other_p.x - shared.x) * (other_q.x - shared.x) +
                             (other_p.y - shared.y) * (other_q.y - shared.y);
          if (dot > 0.0) throw Error(ErrorCode::InvalidShape, "polygon edges overlap");
        }
        continue;
      }
      if (segments_intersect(p1, p2, q1, q2)) throw Error(ErrorCode::InvalidShape, "polygon self-intersects");
    }
  }
  if (area2 < 0.0) std::reverse(v.begin(), v.end());
  ShapeSpec s;
  s.kind = ShapeKind::Polygon;
  s.vertices = std::move(v);
  return s;
}

ShapeFlags ShapeSpec::flags() const {
  if (kind == ShapeKind::PuncturedDisk) return {false, false};
  return {true, true};
}

std::string ShapeSpec::kind_name() const {
  switch (kind) {
    case ShapeKind::UnitSquare: return "unit_square";
    case ShapeKind::LShape: return "l_shape";
    case ShapeKind::Disk: return "disk";
    case ShapeKind::Polygon: return "polygon";
    case ShapeKind::PuncturedDisk: return "punctured_disk";
  }
  return "unknown";
}

nlohmann::json shape_to_json(const ShapeSpec& s, std::optional<double> h) {
  nlohmann::json j;
  j["kind"] = s.kind_name();
  nlohmann::json params = nlohmann::json::object();
  switch (s.kind) {
    case ShapeKind::UnitSquare:
    case ShapeKind::LShape: break;
    case ShapeKind::Disk:
      params["center"] = {s.center.x, s.center.y};
      params["radius"] = s.radius;
      break;
    case ShapeKind::PuncturedDisk:
      params["center"] = {s.center.x, s.center.y};
      params["radius"] = s.radius;
      params["puncture_radius"] = s.puncture_radius;
      break;
    case ShapeKind::Polygon: {
      nlohmann::json verts = nlohmann::json::array();
      for (const Point& p : s.vertices) verts.push_back({p.x, p.y});
      params["vertices"] = verts;
      break;
    }
  }
  j["params"] = params;
  if (h) j["h"] = *h;
  return j;
}

namespace {

Point read_point(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::ConfigError, where + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

double read_number(const nlohmann::json& params, const char* key, double fallback, const std::string& where) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number()) throw Error(ErrorCode::ConfigError, where + "/" + key + ": expected a number");
  return params[key].get<double>();
}

}  // namespace

ShapeSpec shape_from_json(const nlohmann::json& j, std::optional<double>* h) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(ErrorCode::ConfigError, "/domain/kind: missing or not a string");
  const std::string kind = j["kind"].get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (!params.is_object()) throw Error(ErrorCode::ConfigError, "/domain/params: expected an object");
  if (h) {
    if (j.contains("h")) {
      if (!j["h"].is_number()) throw Error(ErrorCode::ConfigError, "/domain/h: expected a number");
      *h = j["h"].get<double>();
    } else {
      h->reset();
    }
  }
  const std::string where = "/domain/params";
  const Point center = params.contains("center") ? read_point(params["center"], where + "/center") : Point{0.5, 0.5};
  if (kind == "unit_square") return ShapeSpec::unit_square();
  if (kind == "l_shape") return ShapeSpec::l_shape();
  if (kind == "disk") return ShapeSpec::disk(center, read_number(params, "radius", 0.5, where));
  if (kind == "punctured_disk")
    return ShapeSpec::punctured_disk(center, read_number(params, "radius", 0.5, where),
                                     read_number(params, "puncture_radius", 0.0, where));
  if (kind == "polygon") {
    if (!params.contains("vertices") || !params["vertices"].is_array())
      throw Error(ErrorCode::ConfigError, where + "/vertices: expected an array of [x, y]");
    std::vector<Point> v;
    for (std::size_t k = 0; k < params["vertices"].size(); ++k)
      v.push_back(read_point(params["vertices"][k], where + "/vertices/" + std::to_string(k)));
    return ShapeSpec::polygon(std::move(v));
  }
  throw Error(ErrorCode::ConfigError, "/domain/kind: unknown shape '" + kind + "'");
}

Point nearest_boundary_point(const ShapeSpec& s, Point p) {
  switch (s.kind) {
    case ShapeKind::UnitSquare: return probe_square(p).nearest;
    case ShapeKind::LShape: return probe_polygon(p, l_shape_vertices()).nearest;
    case ShapeKind::Polygon: return probe_polygon(p, s.vertices).nearest;
    case ShapeKind::Disk: return radial_projection(p, s.center, s.radius);
    case ShapeKind::PuncturedDisk: {
      const double d = distance(p, s.center);
      const Point outer = radial_projection(p, s.center, s.radius);
      const Point inner =
          s.puncture_radius == 0.0 ? s.center : radial_projection(p, s.center, s.puncture_radius);
      return std::abs(s.radius - d) <= std::abs(d - s.puncture_radius) ? outer : inner;
    }
  }
  return p;
}

// --------------------------------------------------------------- DomainGrid

DomainGrid build_domain(const ShapeSpec& spec, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidShape, "mesh width must be positive");
  const BoundingBox box = bounding_box(spec);
  const int i_lo = static_cast<int>(std::floor(box.xmin / h)) - 1;
  const int i_hi = static_cast<int>(std::ceil(box.xmax / h)) + 1;
  const int j_lo = static_cast<int>(std::floor(box.ymin / h)) - 1;
  const int j_hi = static_cast<int>(std::ceil(box.ymax / h)) + 1;
  const int nx = i_hi - i_lo + 1;
  const int ny = j_hi - j_lo + 1;

  const ShapeProbe probe(spec, h);
  std::vector<char> inside(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<Point> nearest(inside.size());
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = i_lo; i <= i_hi; ++i) {
      const std::size_t k = static_cast<std::size_t>(j - j_lo) * nx + (i - i_lo);
      auto [in, q] = probe.classify(i, j);
      inside[k] = in;
      nearest[k] = q;
    }
  }

  DomainGrid g;
  g.shape_ = spec;
  g.h_ = h;
  g.i_min_ = i_lo;
  g.j_min_ = j_lo;
  g.nx_ = nx;
  g.ny_ = ny;
  g.lookup_.assign(inside.size(), -1);

  auto at = [&](int i, int j) { return static_cast<std::size_t>(j - j_lo) * nx + (i - i_lo); };

  for (int j = j_lo; j <= j_hi; ++j)
    for (int i = i_lo; i <= i_hi; ++i)
      if (inside[at(i, j)]) {
        const Point p{i * h, j * h};
        g.lookup_[at(i, j)] = static_cast<int>(g.nodes_.size());
        g.nodes_.push_back({i, j, p, p});
      }
  g.num_interior_ = g.nodes_.size();
  if (g.num_interior_ == 0)
    throw Error(ErrorCode::EmptyInterior, "no lattice point lies inside the " + spec.kind_name() + " at h=" +
                                              std::to_string(h));

  for (int j = j_lo + 1; j < j_hi; ++j)
    for (int i = i_lo + 1; i < i_hi; ++i) {
      if (inside[at(i, j)]) continue;
      bool adjacent = false;
      for (int dj = -1; dj <= 1 && !adjacent; ++dj)
        for (int di = -1; di <= 1 && !adjacent; ++di) adjacent = inside[at(i + di, j + dj)];
      if (!adjacent) continue;
      g.lookup_[at(i, j)] = static_cast<int>(g.nodes_.size());
      g.nodes_.push_back({i, j, Point{i * h, j * h}, nearest[at(i, j)]});
    }
  return g;
}

int DomainGrid::find(int i, int j) const {
  if (i < i_min_ || j < j_min_ || i >= i_min_ + nx_ || j >= j_min_ + ny_) return -1;
  return lookup_[static_cast<std::size_t>(j - j_min_) * nx_ + (i - i_min_)];
}

bool DomainGrid::interior_connected() const {
  if (num_interior_ == 0) return false;
  std::vector<char> seen(num_interior_, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  constexpr int kDi[] = {1, -1, 0, 0};
  constexpr int kDj[] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const GridNode& n = nodes_[queue.front()];
    queue.pop_front();
    for (int d = 0; d < 4; ++d) {
      const int k = find(n.i + kDi[d], n.j + kDj[d]);
      if (k < 0 || !is_interior(static_cast<std::size_t>(k)) || seen[k]) continue;
      seen[k] = 1;
      ++count;
      queue.push_back(static_cast<std::size_t>(k));
    }
  }
  return count == num_interior_;
}

double DomainGrid::interpolate(const Vector& values, Point p) const {
  if (static_cast<std::size_t>(values.size()) != nodes_.size())
    throw Error(ErrorCode::DimensionMismatch, "interpolate: node vector has wrong length");
  auto split = [&](double c, int& base, double& frac) {
    const double f = c / h_;
    const double r = std::round(f);
    if (std::abs(f - r) <= 1e-9) {
      base = static_cast<int>(r);
      frac = 0.0;
    } else {
      base = static_cast<int>(std::floor(f));
      frac = f - base;
    }
  };
  int i0, j0;
  double tx, ty;
  split(p.x, i0, tx);
  split(p.y, j0, ty);
  double result = 0.0;
  const double wx[2] = {1.0 - tx, tx};
  const double wy[2] = {1.0 - ty, ty};
  for (int dj = 0; dj < 2; ++dj)
    for (int di = 0; di < 2; ++di) {
      const double w = wx[di] * wy[dj];
      if (w == 0.0) continue;
      const int k = find(i0 + di, j0 + dj);
      if (k < 0) throw Error(ErrorCode::DimensionMismatch, "interpolate: point outside the classified grid");
      result += w * values[k];
    }
  return result;
}

EnclosingBall enclosing_ball(const DomainGrid& grid, double margin) {
  if (!(margin > 0.0)) throw Error(ErrorCode::InvalidShape, "ball margin must be positive");
  const ShapeSpec& s = grid.shape();
  Point center;
  double reach = 0.0;
  if (s.kind == ShapeKind::Disk || s.kind == ShapeKind::PuncturedDisk) {
    center = s.center;
    reach = s.radius;
  } else {
    const BoundingBox box = bounding_box(s);
    center = {0.5 * (box.xmin + box.xmax), 0.5 * (box.ymin + box.ymax)};
    std::vector<Point> corners = s.vertices;
    if (s.kind == ShapeKind::UnitSquare) corners = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    if (s.kind == ShapeKind::LShape) corners = l_shape_vertices();
    for (const Point& c : corners) reach = std::max(reach, distance(c, center));
  }
  EnclosingBall ball{build_domain(ShapeSpec::disk(center, reach + margin), grid.h()), center, reach + margin, {}};
  ball.injection.reserve(grid.num_nodes());
  for (const GridNode& n : grid.nodes()) {
    const int k = ball.grid.find(n.i, n.j);
    if (k < 0 || !ball.grid.is_interior(static_cast<std::size_t>(k)))
      throw Error(ErrorCode::InvalidShape, "ball margin too small for mesh width; grid node escapes the ball");
    ball.injection.push_back(k);
  }
  return ball;
}

Vector stack_nodes(const GridFunction& u) {
  Vector all(u.interior.size() + u.boundary.size());
  all << u.interior, u.boundary;
  return all;
}

}  // namespace ndlab

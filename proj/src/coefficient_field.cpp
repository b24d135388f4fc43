#include "ndlab/coefficient_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "ndlab/error.hpp"

namespace ndlab {

namespace {

std::string where(const GridNode& n) {
  return "(" + std::to_string(n.trace.x) + ", " + std::to_string(n.trace.y) + ")";
}

}  // namespace

CoefficientField sample_field(const CoefficientExprs& e, double lambda_lower, const DomainGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.num_nodes());
  CoefficientField f;
  f.a11.resize(n);
  f.a12.resize(n);
  f.a22.resize(n);
  f.b1.resize(n);
  f.b2.resize(n);
  f.c.resize(n);
  f.lambda_lower = lambda_lower;
  f.exprs = e;
  for (Eigen::Index k = 0; k < n; ++k) {
    const GridNode& node = grid.nodes()[static_cast<std::size_t>(k)];
    const Point p = node.trace;
    f.a11[k] = e.a11(p.x, p.y);
    f.a12[k] = e.a12(p.x, p.y);
    f.a22[k] = e.a22(p.x, p.y);
    f.b1[k] = e.b1(p.x, p.y);
    f.b2[k] = e.b2(p.x, p.y);
    f.c[k] = e.c(p.x, p.y);
    const double vals[] = {f.a11[k], f.a12[k], f.a22[k], f.b1[k], f.b2[k], f.c[k]};
    for (double v : vals)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidCoefficient, "non-finite coefficient at " + where(node));
    if (f.c[k] > 0.0) throw Error(ErrorCode::InvalidCoefficient, "c > 0 at " + where(node));
  }
  return f;
}

CoefficientField field_from_samples(Vector a11, Vector a12, const Vector& a21, Vector a22, Vector b1, Vector b2,
                                    Vector c, double lambda_lower) {
  const Eigen::Index n = a11.size();
  if (a12.size() != n || a21.size() != n || a22.size() != n || b1.size() != n || b2.size() != n || c.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "coefficient arrays differ in length");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (a12[k] != a21[k])
      throw Error(ErrorCode::AsymmetricInput, "a12 != a21 at node " + std::to_string(k));
    if (c[k] > 0.0) throw Error(ErrorCode::InvalidCoefficient, "c > 0 at node " + std::to_string(k));
  }
  CoefficientField f;
  f.a11 = std::move(a11);
  f.a12 = std::move(a12);
  f.a22 = std::move(a22);
  f.b1 = std::move(b1);
  f.b2 = std::move(b2);
  f.c = std::move(c);
  f.lambda_lower = lambda_lower;
  return f;
}

double min_eigenvalue(double a11, double a12, double a22) {
  // min(a11, a22) - (hypot(gap, a12) - |gap|), rationalized: no cancellation,
  // and exact when a12 == 0.
  const double half_gap = 0.5 * std::abs(a11 - a22);
  const double denom = std::hypot(half_gap, a12) + half_gap;
  return std::min(a11, a22) - (denom > 0.0 ? a12 * a12 / denom : 0.0);
}

EllipticityCertificate check_ellipticity(const CoefficientField& field, const DomainGrid& grid, int n_dirs) {
  if (n_dirs < 8) throw Error(ErrorCode::InvalidCoefficient, "need at least 8 sample directions");
  if (field.size() != grid.num_nodes()) throw Error(ErrorCode::DimensionMismatch, "field does not match grid");
  EllipticityCertificate cert;
  cert.min_quadform = std::numeric_limits<double>::infinity();
  cert.min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> dirs(static_cast<std::size_t>(n_dirs));
  for (int d = 0; d < n_dirs; ++d) {
    const double theta = 2.0 * std::numbers::pi * d / n_dirs;
    dirs[static_cast<std::size_t>(d)] = {std::cos(theta), std::sin(theta)};
  }
  for (std::size_t k = 0; k < field.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double a11 = field.a11[i], a12 = field.a12[i], a22 = field.a22[i];
    for (const auto& [c, s] : dirs)
      cert.min_quadform = std::min(cert.min_quadform, a11 * c * c + 2.0 * a12 * c * s + a22 * s * s);
    const double ev = min_eigenvalue(a11, a12, a22);
    if (ev < cert.min_eigenvalue) {
      cert.min_eigenvalue = ev;
      cert.worst_node = k;
    }
  }
  cert.pass = cert.min_eigenvalue >= field.lambda_lower;
  return cert;
}

double blend_weight(double d, double width) {
  if (d <= 0.0) return 1.0;
  if (d >= width) return 0.0;
  const double s = d / width;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

CoefficientField extend_to_ball(const CoefficientField& field, const DomainGrid& grid, const EnclosingBall& ball,
                                const ExtensionRecipe& recipe) {
  if (field.size() != grid.num_nodes()) throw Error(ErrorCode::DimensionMismatch, "field does not match grid");
  if (recipe.collar_width < 2.0 * grid.h())
    throw Error(ErrorCode::BlendFailure, "collar width " + std::to_string(recipe.collar_width) +
                                             " is below two mesh cells");
  const DomainGrid& bg = ball.grid;
  const auto n = static_cast<Eigen::Index>(bg.num_nodes());
  const double fallback = 0.5 * field.lambda_lower;

  CoefficientField out;
  out.a11 = Vector::Constant(n, fallback);
  out.a12 = Vector::Zero(n);
  out.a22 = Vector::Constant(n, fallback);
  out.b1 = Vector::Zero(n);
  out.b2 = Vector::Zero(n);
  out.c = Vector::Zero(n);
  out.lambda_lower = fallback;

  std::vector<char> mapped(bg.num_nodes(), 0);
  for (std::size_t k = 0; k < grid.num_nodes(); ++k) {
    const auto src = static_cast<Eigen::Index>(k);
    const Eigen::Index dst = ball.injection[k];
    out.a11[dst] = field.a11[src];
    out.a12[dst] = field.a12[src];
    out.a22[dst] = field.a22[src];
    out.b1[dst] = field.b1[src];
    out.b2[dst] = field.b2[src];
    out.c[dst] = field.c[src];
    mapped[static_cast<std::size_t>(dst)] = 1;
  }

  // Without expressions the clamp uses the sample at the nearest boundary node.
  auto clamp_from_samples = [&](Point q) {
    std::size_t best = grid.num_interior();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = grid.num_interior(); k < grid.num_nodes(); ++k) {
      const double d = distance(grid.nodes()[k].trace, q);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    const auto b = static_cast<Eigen::Index>(best);
    return std::array<double, 3>{field.a11[b], field.a12[b], field.a22[b]};
  };

  for (std::size_t k = 0; k < bg.num_nodes(); ++k) {
    if (mapped[k]) continue;
    const Point p = bg.nodes()[k].pos;
    const Point q = nearest_boundary_point(grid.shape(), p);
    const double phi = blend_weight(distance(p, q), recipe.collar_width);
    if (phi == 0.0) continue;
    std::array<double, 3> a;
    if (field.exprs) {
      a = {field.exprs->a11(q.x, q.y), field.exprs->a12(q.x, q.y), field.exprs->a22(q.x, q.y)};
    } else {
      a = clamp_from_samples(q);
    }
    const auto i = static_cast<Eigen::Index>(k);
    out.a11[i] = phi * a[0] + (1.0 - phi) * fallback;
    out.a12[i] = phi * a[1];
    out.a22[i] = phi * a[2] + (1.0 - phi) * fallback;
  }
  return out;
}

std::vector<KernelTap> mollifier_kernel(const MollifierSpec& spec, double h) {
  if (spec.k <= 0) throw Error(ErrorCode::InvalidCoefficient, "mollifier index k must be positive");
  const double radius = 1.0 / spec.k;
  const int reach = static_cast<int>(std::ceil(radius / h));
  std::vector<KernelTap> taps;
  double mass = 0.0;
  for (int dj = -reach; dj <= reach; ++dj)
    for (int di = -reach; di <= reach; ++di) {
      const double rk = std::hypot(di * h, dj * h) * spec.k;
      if (rk >= 1.0) continue;
      const double w = std::exp(-1.0 / (1.0 - rk * rk));
      taps.push_back({di, dj, w});
      mass += w;
    }
  for (KernelTap& t : taps) t.weight /= mass;
  return taps;
}

CoefficientField mollify(const CoefficientField& ball_field, const EnclosingBall& ball, const MollifierSpec& spec) {
  const DomainGrid& bg = ball.grid;
  if (ball_field.size() != bg.num_nodes()) throw Error(ErrorCode::DimensionMismatch, "field is not on the ball grid");
  const std::vector<KernelTap> taps = mollifier_kernel(spec, bg.h());
  const auto n = static_cast<Eigen::Index>(ball.injection.size());

  CoefficientField out;
  out.a11.resize(n);
  out.a12.resize(n);
  out.a22.resize(n);
  out.b1.resize(n);
  out.b2.resize(n);
  out.c.resize(n);
  out.lambda_lower = ball_field.lambda_lower;
  for (Eigen::Index t = 0; t < n; ++t) {
    const int centre = ball.injection[static_cast<std::size_t>(t)];
    const GridNode& node = bg.nodes()[static_cast<std::size_t>(centre)];
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;
    for (const KernelTap& tap : taps) {
      const int k = bg.find(node.i + tap.di, node.j + tap.dj);
      if (k < 0)
        throw Error(ErrorCode::SupportOverrun, "mollifier support 1/" + std::to_string(spec.k) +
                                                   " leaves the ball grid");
      s11 += tap.weight * ball_field.a11[k];
      s12 += tap.weight * ball_field.a12[k];
      s22 += tap.weight * ball_field.a22[k];
    }
    out.a11[t] = s11;
    out.a12[t] = s12;
    out.a22[t] = s22;
    out.b1[t] = ball_field.b1[centre];
    out.b2[t] = ball_field.b2[centre];
    out.c[t] = ball_field.c[centre];
  }
  return out;
}

double sup_distance(const CoefficientField& a, const CoefficientField& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "fields differ in size");
  if (a.size() == 0) return 0.0;
  return std::max({(a.a11 - b.a11).lpNorm<Eigen::Infinity>(), (a.a12 - b.a12).lpNorm<Eigen::Infinity>(),
                   (a.a22 - b.a22).lpNorm<Eigen::Infinity>()});
}

namespace {

// Derivative of node samples along one lattice axis at an interior node.
double axis_derivative(const Vector& f, const DomainGrid& grid, const GridNode& node, int di, int dj) {
  const double h = grid.h();
  auto interior_at = [&](int step) {
    const int k = grid.find(node.i + step * di, node.j + step * dj);
    return (k >= 0 && grid.is_interior(static_cast<std::size_t>(k))) ? k : -1;
  };
  const int centre = grid.find(node.i, node.j);
  const int fwd = interior_at(1), bwd = interior_at(-1);
  if (fwd >= 0 && bwd >= 0) return (f[fwd] - f[bwd]) / (2.0 * h);
  if (fwd >= 0) {
    const int fwd2 = interior_at(2);
    if (fwd2 >= 0) return (-3.0 * f[centre] + 4.0 * f[fwd] - f[fwd2]) / (2.0 * h);
    return (f[fwd] - f[centre]) / h;
  }
  if (bwd >= 0) {
    const int bwd2 = interior_at(-2);
    if (bwd2 >= 0) return (3.0 * f[centre] - 4.0 * f[bwd] + f[bwd2]) / (2.0 * h);
    return (f[centre] - f[bwd]) / h;
  }
  return 0.0;
}

}  // namespace

ReducedDrift divergence_reduction(const CoefficientField& field, const DomainGrid& grid, double lipschitz_bound) {
  if (field.size() != grid.num_nodes()) throw Error(ErrorCode::DimensionMismatch, "field does not match grid");
  const auto n = static_cast<Eigen::Index>(grid.num_interior());
  ReducedDrift out;
  out.b1.resize(n);
  out.b2.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const GridNode& node = grid.interior()[static_cast<std::size_t>(k)];
    const double d1a11 = axis_derivative(field.a11, grid, node, 1, 0);
    const double d2a12 = axis_derivative(field.a12, grid, node, 0, 1);
    const double d1a12 = axis_derivative(field.a12, grid, node, 1, 0);
    const double d2a22 = axis_derivative(field.a22, grid, node, 0, 1);
    out.b1[k] = field.b1[k] - (d1a11 + d2a12);
    out.b2[k] = field.b2[k] - (d1a12 + d2a22);

    for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
      const int nb = grid.find(node.i + di, node.j + dj);
      if (nb < 0 || !grid.is_interior(static_cast<std::size_t>(nb))) continue;
      for (const Vector* a : {&field.a11, &field.a12, &field.a22})
        out.max_difference_quotient =
            std::max(out.max_difference_quotient, std::abs((*a)[nb] - (*a)[k]) / grid.h());
    }
  }
  out.lipschitz_warning = out.max_difference_quotient > lipschitz_bound;
  return out;
}

}  // namespace ndlab

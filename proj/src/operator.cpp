#include "ndlab/operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ndlab/error.hpp"

namespace ndlab {

std::string to_string(Scheme s) { return s == Scheme::Central ? "central" : "upwind"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "central") return Scheme::Central;
  if (s == "upwind" || s == "upwind_first_order") return Scheme::Upwind;
  throw Error(ErrorCode::ConfigError, "unknown scheme '" + s + "'");
}

namespace {

// 3x3 stencil indexed [dj+1][di+1].
using Stencil = std::array<std::array<double, 3>, 3>;

Stencil node_stencil(double a11, double a12, double a22, double b1, double b2, double c, double h, Scheme scheme) {
  Stencil w{};
  const double ih2 = 1.0 / (h * h);
  auto at = [&](int di, int dj) -> double& { return w[static_cast<std::size_t>(dj + 1)][static_cast<std::size_t>(di + 1)]; };

  const double m = std::abs(a12);
  at(1, 0) += (a11 - m) * ih2;
  at(-1, 0) += (a11 - m) * ih2;
  at(0, 1) += (a22 - m) * ih2;
  at(0, -1) += (a22 - m) * ih2;
  if (a12 >= 0.0) {
    at(1, 1) += m * ih2;
    at(-1, -1) += m * ih2;
  } else {
    at(-1, 1) += m * ih2;
    at(1, -1) += m * ih2;
  }
  at(0, 0) -= (2.0 * a11 + 2.0 * a22 - 2.0 * m) * ih2;

  if (scheme == Scheme::Central) {
    at(1, 0) += b1 / (2.0 * h);
    at(-1, 0) -= b1 / (2.0 * h);
    at(0, 1) += b2 / (2.0 * h);
    at(0, -1) -= b2 / (2.0 * h);
  } else {
    if (b1 >= 0.0) {
      at(1, 0) += b1 / h;
    } else {
      at(-1, 0) -= b1 / h;
    }
    at(0, 0) -= std::abs(b1) / h;
    if (b2 >= 0.0) {
      at(0, 1) += b2 / h;
    } else {
      at(0, -1) -= b2 / h;
    }
    at(0, 0) -= std::abs(b2) / h;
  }
  at(0, 0) += c;
  return w;
}

}  // namespace

DiscreteOperator assemble(std::shared_ptr<const DomainGrid> grid, const CoefficientField& field, Scheme scheme) {
  const DomainGrid& g = *grid;
  if (field.size() != g.num_nodes()) throw Error(ErrorCode::DimensionMismatch, "field does not match grid");
  if (field.c.size() && field.c.maxCoeff() > 0.0)
    throw Error(ErrorCode::InvalidCoefficient, "zeroth-order coefficient must satisfy c <= 0");
  const EllipticityCertificate cert = check_ellipticity(field, g, 8);
  if (!cert.pass)
    throw Error(ErrorCode::InvalidCoefficient,
                "ellipticity fails: min eigenvalue " + std::to_string(cert.min_eigenvalue) + " < lambda " +
                    std::to_string(field.lambda_lower));

  const auto ni = static_cast<Eigen::Index>(g.num_interior());
  const auto nb = static_cast<Eigen::Index>(g.num_boundary());
  std::vector<Eigen::Triplet<double>> inner, coupling;
  inner.reserve(static_cast<std::size_t>(ni) * 9);

  for (Eigen::Index row = 0; row < ni; ++row) {
    const GridNode& node = g.interior()[static_cast<std::size_t>(row)];
    const Stencil w = node_stencil(field.a11[row], field.a12[row], field.a22[row], field.b1[row], field.b2[row],
                                   field.c[row], g.h(), scheme);
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const double v = w[static_cast<std::size_t>(dj + 1)][static_cast<std::size_t>(di + 1)];
        if (v == 0.0 && !(di == 0 && dj == 0)) continue;
        const int k = g.find(node.i + di, node.j + dj);
        if (k < 0) throw Error(ErrorCode::DimensionMismatch, "stencil neighbour missing from grid");
        if (g.is_interior(static_cast<std::size_t>(k))) {
          inner.emplace_back(row, k, v);
        } else {
          coupling.emplace_back(row, k - ni, v);
        }
      }
  }

  DiscreteOperator op;
  op.grid_ = std::move(grid);
  op.scheme_ = scheme;
  op.interior_.resize(ni, ni);
  op.interior_.setFromTriplets(inner.begin(), inner.end());
  op.coupling_.resize(ni, nb);
  op.coupling_.setFromTriplets(coupling.begin(), coupling.end());
  op.interior_.makeCompressed();
  op.coupling_.makeCompressed();
  op.monotone_ = monotonicity_certificate(op).monotone ? Monotonicity::Certified : Monotonicity::Violated;
  return op;
}

Vector apply(const DiscreteOperator& op, const Vector& u, const Vector& g) {
  if (u.size() != op.size()) throw Error(ErrorCode::DimensionMismatch, "interior vector has wrong length");
  if (g.size() != op.boundary_coupling().cols())
    throw Error(ErrorCode::DimensionMismatch, "boundary vector has wrong length");
  return op.interior_matrix() * u + op.boundary_coupling() * g;
}

Vector apply(const DiscreteOperator& op, const Vector& u) {
  return apply(op, u, Vector::Zero(op.boundary_coupling().cols()));
}

MonotonicityReport monotonicity_certificate(const DiscreteOperator& op) {
  MonotonicityReport r;
  r.min_offdiagonal = std::numeric_limits<double>::infinity();
  r.max_diagonal = -std::numeric_limits<double>::infinity();
  r.slack = std::numeric_limits<double>::infinity();
  const SparseMatrix& a = op.interior_matrix();
  const SparseMatrix& b = op.boundary_coupling();
  for (Eigen::Index row = 0; row < a.rows(); ++row) {
    double row_sum = 0.0;
    double row_min = std::numeric_limits<double>::infinity();
    for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
      row_sum += it.value();
      if (it.col() == row) {
        r.max_diagonal = std::max(r.max_diagonal, it.value());
      } else {
        row_min = std::min(row_min, it.value());
      }
    }
    for (SparseMatrix::InnerIterator it(b, row); it; ++it) {
      row_sum += it.value();
      row_min = std::min(row_min, it.value());
    }
    if (row_min < r.min_offdiagonal) {
      r.min_offdiagonal = row_min;
      r.worst_node = static_cast<std::size_t>(row);
    }
    r.slack = std::min(r.slack, 0.0 - row_sum);
  }
  if (a.rows() == 0) r.min_offdiagonal = r.max_diagonal = r.slack = 0.0;
  if (!std::isfinite(r.min_offdiagonal)) r.min_offdiagonal = 0.0;
  r.monotone = r.min_offdiagonal >= 0.0 && r.max_diagonal <= 0.0;
  return r;
}

void write_coordinate_format(const DiscreteOperator& op, std::ostream& out) {
  char buf[96];
  auto dump = [&](const char* name, const SparseMatrix& m) {
    out << "# " << name << ' ' << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (Eigen::Index row = 0; row < m.outerSize(); ++row)
      for (SparseMatrix::InnerIterator it(m, row); it; ++it) {
        std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(it.row()),
                      static_cast<long long>(it.col()), it.value());
        out << buf;
      }
  };
  dump("interior", op.interior_matrix());
  dump("boundary_coupling", op.boundary_coupling());
}

}  // namespace ndlab

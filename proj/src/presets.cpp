#include "ndlab/presets.hpp"

#include "ndlab/error.hpp"

namespace ndlab {

namespace {

CoefficientExprs exprs(const char* a11, const char* a12, const char* a22, const char* b1, const char* b2,
                       const char* c) {
  return {CoeffExpr::parse(a11), CoeffExpr::parse(a12), CoeffExpr::parse(a22),
          CoeffExpr::parse(b1),  CoeffExpr::parse(b2),  CoeffExpr::parse(c)};
}

}  // namespace

const std::vector<CoefficientPreset>& coefficient_presets() {
  static const std::vector<CoefficientPreset> presets = {
      {"heat", "Laplacian: a = I, b = 0, c = 0", exprs("1", "0", "1", "0", "0", "0"), 1.0},
      {"drift", "a = I with strong drift b = (50, 0)", exprs("1", "0", "1", "50", "0", "0"), 1.0},
      {"damped", "a = I with absorption c = -5", exprs("1", "0", "1", "0", "0", "-5"), 1.0},
      {"anisotropic", "constant a = [[2, 0.5], [0.5, 1]]", exprs("2", "0.5", "1", "0", "0", "0"), 0.75},
      {"variable", "a11 = 1 + x^2/2, a12 = x y/4, a22 = 1 + y^2/2",
       exprs("1 + x^2/2", "x*y/4", "1 + y^2/2", "0", "0", "0"), 0.75},
      {"lipschitz-rough", "a11 = 1 + |x - 1/2|, Lipschitz but not C^1",
       exprs("1 + abs(x - 1/2)", "0", "1", "0", "0", "0"), 1.0},
  };
  return presets;
}

const CoefficientPreset& find_preset(std::string_view name) {
  for (const auto& p : coefficient_presets()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::ConfigError, "unknown coefficient preset '" + std::string(name) + "'");
}

const std::vector<CatalogDomain>& catalog_domains() {
  static const std::vector<CatalogDomain> domains = {
      {"unit_square", ShapeSpec::unit_square()},
      {"l_shape", ShapeSpec::l_shape()},
      {"disk", ShapeSpec::disk({0.5, 0.5}, 0.5)},
      {"punctured_disk", ShapeSpec::punctured_disk({0.5, 0.5}, 0.5, 0.0)},
  };
  return domains;
}

const CatalogDomain& find_domain(std::string_view name) {
  for (const auto& d : catalog_domains()) {
    if (d.name == name) return d;
  }
  throw Error(ErrorCode::ConfigError, "unknown domain '" + std::string(name) + "'");
}

}  // namespace ndlab

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ndlab/coefficient_field.hpp"
#include "ndlab/domain_grid.hpp"

namespace ndlab {

struct CoefficientPreset {
  std::string name;
  std::string description;
  CoefficientExprs exprs;
  double lambda = 1.0;  // declared ellipticity constant
};

const std::vector<CoefficientPreset>& coefficient_presets();
/// Throws ConfigError for unknown names.
const CoefficientPreset& find_preset(std::string_view name);

struct CatalogDomain {
  std::string name;
  ShapeSpec spec;
};

const std::vector<CatalogDomain>& catalog_domains();
/// Throws ConfigError for unknown names.
const CatalogDomain& find_domain(std::string_view name);

}  // namespace ndlab

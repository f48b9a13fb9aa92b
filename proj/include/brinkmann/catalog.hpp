#pragma once

// Named example spacetimes.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "brinkmann/spacetime.hpp"

namespace brinkmann {

using Params = std::map<std::string, std::string>;

struct CatalogParam {
  std::string name;
  std::string type;
  std::string default_value;
  std::string description;
};

struct CatalogEntry {
  std::string key;
  std::string description;
  std::vector<CatalogParam> params;
};

const std::vector<CatalogEntry>& catalog_entries();
std::vector<std::string> catalog_keys();

/// Spacetime document for a catalog entry. Throws CatalogError for unknown
/// names or invalid parameters.
nlohmann::json catalog_document(const std::string& name, const Params& params = {});

Spacetime build(const std::string& name, const Params& params = {});

/// "1,2;3,4" -> {{1,2},{3,4}}.
std::vector<std::vector<std::string>> split_matrix(const std::string& text);
std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace brinkmann

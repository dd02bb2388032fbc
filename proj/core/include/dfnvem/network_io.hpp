#pragma once

#include <optional>
#include <string>

#include "dfnvem/assembly.hpp"
#include "dfnvem/geometry.hpp"

namespace dfn {

// A network file: geometry, intersection properties and boundary data.
struct NetworkInput {
  FractureNetwork network;
  ProblemData data;
  std::optional<Model> model;
};

// Throws IoError when the file cannot be read, ConfigError on malformed content and the geometry
// errors of build_network. Boundary selectors that disagree on an edge raise ConflictingBC when
// the edge is queried.
NetworkInput parse_network(const std::string& text);
NetworkInput read_network(const std::string& path);

// Geometry and intersection properties only.
std::string network_to_json(const FractureNetwork& network);

}  // namespace dfn

#include "dfnvem/errors.hpp"

namespace dfn {

const char* module_name(Module m) {
  switch (m) {
    case Module::geometry: return "geometry";
    case Module::meshing: return "meshing";
    case Module::coarsening: return "coarsening";
    case Module::vem: return "vem";
    case Module::assembly: return "assembly";
    case Module::solver: return "solver";
    case Module::cases: return "cases";
    case Module::postprocess: return "postprocess";
    case Module::cli: return "cli";
  }
  return "unknown";
}

int exit_code_for(Module m) {
  switch (m) {
    case Module::geometry: return 3;
    case Module::meshing:
    case Module::coarsening: return 4;
    case Module::vem:
    case Module::assembly:
    case Module::solver: return 5;
    default: return 2;
  }
}

Error::Error(Module m, std::string kind, const std::string& what)
    : std::runtime_error(std::string("[") + module_name(m) + "] " + kind + ": " + what),
      module_(m),
      kind_(std::move(kind)) {}

}  // namespace dfn

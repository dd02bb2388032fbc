#pragma once

#include <stdexcept>
#include <string>

namespace dfn {

enum class Module { geometry, meshing, coarsening, vem, assembly, solver, cases, postprocess, cli };

const char* module_name(Module m);

// Process exit code used by the command line tool for errors raised in module m.
int exit_code_for(Module m);

class Error : public std::runtime_error {
public:
  Error(Module m, std::string kind, const std::string& what);

  Module module() const { return module_; }
  const std::string& kind() const { return kind_; }
  int exit_code() const { return exit_code_for(module_); }

private:
  Module module_;
  std::string kind_;
};

#define DFN_DECLARE_ERROR(Name, Mod)                                   \
  class Name : public Error {                                          \
  public:                                                              \
    explicit Name(const std::string& what) : Error(Mod, #Name, what) {} \
  };

DFN_DECLARE_ERROR(CollinearVertices, Module::geometry)
DFN_DECLARE_ERROR(NonPlanarPolygon, Module::geometry)
DFN_DECLARE_ERROR(CoplanarOverlap, Module::geometry)
DFN_DECLARE_ERROR(CollinearOverlap, Module::geometry)
DFN_DECLARE_ERROR(ConstraintConflict, Module::meshing)
DFN_DECLARE_ERROR(EmptyDomain, Module::meshing)
DFN_DECLARE_ERROR(MeshError, Module::meshing)
DFN_DECLARE_ERROR(InconsistentEndpoints, Module::meshing)
DFN_DECLARE_ERROR(DegenerateCell, Module::coarsening)
DFN_DECLARE_ERROR(SingularG, Module::vem)
DFN_DECLARE_ERROR(UnconstrainedPressure, Module::assembly)
DFN_DECLARE_ERROR(MissingIntersectionProps, Module::assembly)
DFN_DECLARE_ERROR(ConflictingBC, Module::assembly)
DFN_DECLARE_ERROR(SingularSystem, Module::solver)
DFN_DECLARE_ERROR(MissingExactSolution, Module::postprocess)
DFN_DECLARE_ERROR(IoError, Module::postprocess)
DFN_DECLARE_ERROR(ConfigError, Module::cli)

#undef DFN_DECLARE_ERROR

}  // namespace dfn

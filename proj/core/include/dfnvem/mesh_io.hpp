#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dfnvem/mesh.hpp"

namespace dfn {

// Plain text mesh:
//   dfnvem-mesh 1
//   nodes N      then N lines "x y" in frame coordinates
//   edges E      then E lines "n0 n1 kind tag side" (kind: 0 interior, 1 boundary, 2 trace)
//   cells C      then C lines "k e0 s0 ... e(k-1) s(k-1)"
void write_mesh(std::ostream& out, const PolyMesh& mesh);
PolyMesh read_mesh(std::istream& in);

// Several fracture meshes in one file, each preceded by "fracture i". Throws IoError.
void write_meshes(const std::string& path, const std::vector<PolyMesh>& meshes);
std::vector<PolyMesh> read_meshes(const std::string& path);

}  // namespace dfn

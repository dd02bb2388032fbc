#include "dfnvem/mesh_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

void expect(std::istream& in, const std::string& word) {
  std::string w;
  if (!(in >> w) || w != word) throw IoError("mesh file: expected '" + word + "'");
}

int count(std::istream& in, const std::string& word) {
  expect(in, word);
  int n = -1;
  if (!(in >> n) || n < 0) throw IoError("mesh file: bad count after '" + word + "'");
  return n;
}

}  // namespace

void write_mesh(std::ostream& out, const PolyMesh& m) {
  out.precision(17);
  out << "dfnvem-mesh 1\nnodes " << m.n_nodes() << '\n';
  for (const auto& p : m.nodes) out << p.x() << ' ' << p.y() << '\n';
  out << "edges " << m.n_edges() << '\n';
  for (const auto& e : m.edges) out << e.n0 << ' ' << e.n1 << ' ' << int(e.kind) << ' ' << e.tag << ' ' << e.side << '\n';
  out << "cells " << m.n_cells() << '\n';
  for (const auto& c : m.cells) {
    out << c.edges.size();
    for (size_t k = 0; k < c.edges.size(); ++k) out << ' ' << c.edges[k] << ' ' << c.signs[k];
    out << '\n';
  }
}

PolyMesh read_mesh(std::istream& in) {
  expect(in, "dfnvem-mesh");
  int version = 0;
  if (!(in >> version) || version != 1) throw IoError("mesh file: unsupported version");
  PolyMesh m;
  m.nodes.resize(count(in, "nodes"));
  for (auto& p : m.nodes)
    if (!(in >> p.x() >> p.y())) throw IoError("mesh file: truncated node table");
  m.edges.resize(count(in, "edges"));
  for (auto& e : m.edges) {
    int kind = 0;
    if (!(in >> e.n0 >> e.n1 >> kind >> e.tag >> e.side) || kind < 0 || kind > 2)
      throw IoError("mesh file: bad edge record");
    if (e.n0 < 0 || e.n1 < 0 || e.n0 >= m.n_nodes() || e.n1 >= m.n_nodes())
      throw IoError("mesh file: edge refers to a missing node");
    e.kind = EdgeKind(kind);
  }
  m.cells.resize(count(in, "cells"));
  for (auto& c : m.cells) {
    int k = 0;
    if (!(in >> k) || k < 3) throw IoError("mesh file: bad cell record");
    c.edges.resize(k);
    c.signs.resize(k);
    for (int i = 0; i < k; ++i) {
      if (!(in >> c.edges[i] >> c.signs[i])) throw IoError("mesh file: truncated cell record");
      if (c.edges[i] < 0 || c.edges[i] >= m.n_edges() || (c.signs[i] != 1 && c.signs[i] != -1))
        throw IoError("mesh file: bad cell edge");
    }
  }
  m.update_geometry();
  return m;
}

void write_meshes(const std::string& path, const std::vector<PolyMesh>& meshes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "fractures " << meshes.size() << '\n';
  for (size_t f = 0; f < meshes.size(); ++f) {
    out << "fracture " << f << '\n';
    write_mesh(out, meshes[f]);
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<PolyMesh> read_meshes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<PolyMesh> meshes(count(in, "fractures"));
  for (auto& m : meshes) {
    count(in, "fracture");
    m = read_mesh(in);
  }
  return meshes;
}

}  // namespace dfn

#include "dfnvem/coarsening.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

double half_transmissibility(const PolyMesh& m, int c, int e, const Mat2& lambda) {
  const Vec2 d = m.edge_midpoint(e) - m.centroid[c];
  const double d2 = d.squaredNorm();
  if (!(m.area[c] > 0) || d2 <= 1e-28 * m.diameter[c] * m.diameter[c])
    throw DegenerateCell("cell " + std::to_string(c) + " has zero area or centroid on an edge");
  return m.edge_length(e) * std::abs((lambda * d).dot(m.edge_normal(e))) / d2;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

SparseMatrix tpfa_matrix(const PolyMesh& m, const std::vector<Mat2>& lambda, const TpfaOptions& opt) {
  const auto ec = m.edge_cells();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> diag(m.n_cells(), 0.0);
  for (int e = 0; e < m.n_edges(); ++e) {
    const int l = ec[e][0], r = ec[e][1];
    if (l < 0) continue;
    if (r < 0 || m.edges[e].kind != EdgeKind::interior) {
      if (opt.closure) {
        diag[l] += half_transmissibility(m, l, e, lambda[l]);
        if (r >= 0) diag[r] += half_transmissibility(m, r, e, lambda[r]);
      }
      continue;
    }
    const double al = half_transmissibility(m, l, e, lambda[l]);
    const double ar = half_transmissibility(m, r, e, lambda[r]);
    const double t = al + ar > 0 ? al * ar / (al + ar) : 0.0;
    trip.emplace_back(l, r, -t);
    trip.emplace_back(r, l, -t);
    diag[l] += t;
    diag[r] += t;
  }
  for (int c = 0; c < m.n_cells(); ++c) trip.emplace_back(c, c, diag[c]);
  SparseMatrix A(m.n_cells(), m.n_cells());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

StrengthMatrix strength(const SparseMatrix& A, double eps) {
  StrengthMatrix s;
  s.A = A;
  const int n = int(A.rows());
  s.S.assign(n, {});
  s.ST.assign(n, {});
  for (int i = 0; i < n; ++i) {
    double maxneg = 0.0;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (it.col() != i && it.value() < 0) maxneg = std::max(maxneg, -it.value());
    if (maxneg == 0.0) continue;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (it.col() != i && it.value() < 0 && -it.value() >= eps * maxneg) s.S[i].push_back(int(it.col()));
  }
  for (int i = 0; i < n; ++i)
    for (int j : s.S[i]) s.ST[j].push_back(i);
  return s;
}

std::vector<CF> cf_split(const SparseMatrix& A, double eps, const std::vector<int>& forced) {
  const StrengthMatrix s = strength(A, eps);
  const int n = int(A.rows());
  std::vector<CF> st(n, CF::undecided);
  std::vector<int> lam(n, 0);
  for (int i = 0; i < n; ++i) lam[i] = int(s.ST[i].size());
  std::set<std::pair<int, int>> queue;  // (-lambda, index): begin() is the next pick
  for (int i = 0; i < n; ++i) queue.emplace(-lam[i], i);

  auto bump = [&](int k, int delta) {
    if (st[k] != CF::undecided) return;
    queue.erase({-lam[k], k});
    lam[k] += delta;
    queue.emplace(-lam[k], k);
  };
  auto claim = [&](int i) {
    queue.erase({-lam[i], i});
    st[i] = CF::coarse;
  };
  auto make_coarse = [&](int i) {
    claim(i);
    for (int k : s.S[i]) bump(k, -1);
    for (int j : s.ST[i]) {
      if (st[j] != CF::undecided) continue;
      queue.erase({-lam[j], j});
      st[j] = CF::fine;
      for (int k : s.S[j]) bump(k, 1);
    }
  };

  // All forced cells are claimed before any of them can turn another into a fine cell.
  std::vector<int> f;
  for (int i : forced)
    if (i >= 0 && i < n) f.push_back(i);
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  for (int i : f) claim(i);
  for (int i : f) make_coarse(i);
  for (int i = 0; i < n; ++i)
    if (st[i] == CF::undecided && s.S[i].empty() && s.ST[i].empty()) make_coarse(i);
  while (!queue.empty()) make_coarse(queue.begin()->second);
  return st;
}

std::vector<int> tip_nodes(const PolyMesh& m) {
  std::map<std::pair<int, int>, int> count;  // (line, node) -> trace edges touching it
  std::vector<char> on_boundary(m.nodes.size(), 0);
  for (const auto& e : m.edges) {
    if (e.kind == EdgeKind::trace) {
      ++count[{e.tag, e.n0}];
      ++count[{e.tag, e.n1}];
    } else if (e.kind == EdgeKind::boundary) {
      on_boundary[e.n0] = on_boundary[e.n1] = 1;
    }
  }
  const auto ec = m.edge_cells();
  for (int e = 0; e < m.n_edges(); ++e)
    if (ec[e][1] < 0 && m.edges[e].kind == EdgeKind::trace && ec[e][0] >= 0) {
      // A trace edge on the polygon boundary: its nodes are boundary nodes.
      on_boundary[m.edges[e].n0] = on_boundary[m.edges[e].n1] = 1;
    }
  std::vector<int> tips;
  for (const auto& [key, c] : count)
    if (c == 1 && !on_boundary[key.second]) tips.push_back(key.second);
  std::sort(tips.begin(), tips.end());
  tips.erase(std::unique(tips.begin(), tips.end()), tips.end());
  return tips;
}

std::vector<int> tip_cells(const PolyMesh& m) {
  const auto tips = tip_nodes(m);
  if (tips.empty()) return {};
  std::vector<char> is_tip(m.nodes.size(), 0);
  for (int t : tips) is_tip[t] = 1;
  std::vector<int> out;
  for (int c = 0; c < m.n_cells(); ++c) {
    bool touches = false, has_trace = false;
    for (int e : m.cells[c].edges) {
      const Edge& ed = m.edges[e];
      touches = touches || is_tip[ed.n0] || is_tip[ed.n1];
      has_trace = has_trace || ed.kind == EdgeKind::trace;
    }
    if (touches && has_trace) out.push_back(c);
  }
  return out;
}

PolyMesh merge_cells(const PolyMesh& m, const std::vector<int>& coarse_of, int n_coarse) {
  PolyMesh out;
  out.nodes = m.nodes;
  out.edges = m.edges;
  std::vector<std::vector<int>> members(n_coarse);
  for (int c = 0; c < m.n_cells(); ++c) members[coarse_of[c]].push_back(c);
  out.cells.resize(n_coarse);
  for (int g = 0; g < n_coarse; ++g) {
    std::map<int, std::pair<int, int>> seen;  // edge -> (count, sign)
    std::vector<int> order;
    for (int c : members[g]) {
      const Cell& cell = m.cells[c];
      for (size_t k = 0; k < cell.edges.size(); ++k) {
        auto [it, fresh] = seen.emplace(cell.edges[k], std::make_pair(0, cell.signs[k]));
        if (fresh) order.push_back(cell.edges[k]);
        ++it->second.first;
      }
    }
    for (int e : order) {
      if (seen[e].first != 1) continue;
      out.cells[g].edges.push_back(e);
      out.cells[g].signs.push_back(seen[e].second);
    }
  }
  out.compact();
  out.update_geometry();
  return out;
}

CoarseResult agglomerate(const PolyMesh& mesh, const std::vector<Mat2>& lambda, int c_depth, double eps,
                         const TpfaOptions& opt) {
  CoarseResult res;
  res.mesh = mesh;
  res.lambda = lambda;
  res.partition.coarse_of.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) res.partition.coarse_of[c] = c;

  for (int level = 0; level < c_depth; ++level) {
    const PolyMesh& m = res.mesh;
    const int n = m.n_cells();
    const SparseMatrix A = tpfa_matrix(m, res.lambda, opt);
    const StrengthMatrix s = strength(A, eps);
    const std::vector<CF> cf = cf_split(A, eps, tip_cells(m));

    // Reference direction per line so sides are comparable across its edges.
    std::map<int, Vec2> line_dir;
    for (const auto& e : m.edges)
      if (e.kind == EdgeKind::trace && !line_dir.count(e.tag)) line_dir[e.tag] = m.nodes[e.n1] - m.nodes[e.n0];
    // Per cell: (line, side) pairs of its trace edges.
    std::vector<std::vector<std::pair<int, int>>> sides(n);
    for (int c = 0; c < n; ++c) {
      const Cell& cell = m.cells[c];
      for (size_t k = 0; k < cell.edges.size(); ++k) {
        const Edge& e = m.edges[cell.edges[k]];
        if (e.kind != EdgeKind::trace) continue;
        const Vec2 inward = -cell.signs[k] * m.edge_normal(cell.edges[k]);
        sides[c].emplace_back(e.tag, cross2(line_dir[e.tag], inward) > 0 ? 1 : -1);
      }
    }

    std::vector<int> group(n, -1);
    std::vector<std::map<int, int>> group_sides;
    auto compatible = [&](int c, int g) {
      for (const auto& [line, side] : sides[c]) {
        auto it = group_sides[g].find(line);
        if (it != group_sides[g].end() && it->second != side) return false;
      }
      return true;
    };
    auto join = [&](int c, int g) {
      group[c] = g;
      for (const auto& [line, side] : sides[c]) group_sides[g][line] = side;
    };
    auto new_group = [&](int c) {
      group_sides.emplace_back();
      join(c, int(group_sides.size()) - 1);
    };
    for (int c = 0; c < n; ++c)
      if (cf[c] == CF::coarse) new_group(c);

    auto coupling = [&](int i, int j) { return -A.coeff(i, j); };
    for (int c = 0; c < n; ++c) {
      if (cf[c] != CF::fine) continue;
      int best = -1;
      double bw = 0.0;
      for (int j : s.S[c]) {
        if (cf[j] != CF::coarse || !compatible(c, group[j])) continue;
        const double w = coupling(c, j);
        if (best < 0 || w > bw || (w == bw && j < best)) {
          best = j;
          bw = w;
        }
      }
      if (best < 0) {
        for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
          const int j = int(it.col());
          if (j == c || it.value() >= 0 || cf[j] != CF::coarse || !compatible(c, group[j])) continue;
          const double w = -it.value();
          if (best < 0 || w > bw || (w == bw && j < best)) {
            best = j;
            bw = w;
          }
        }
      }
      if (best >= 0) join(c, group[best]);
      else new_group(c);
    }
    const int ng = int(group_sides.size());
    if (ng == n) break;

    PolyMesh coarse = merge_cells(m, group, ng);
    std::vector<Mat2> lam(ng, Mat2::Zero());
    std::vector<double> area(ng, 0.0);
    for (int c = 0; c < n; ++c) {
      lam[group[c]] += m.area[c] * res.lambda[c];
      area[group[c]] += m.area[c];
    }
    for (int g = 0; g < ng; ++g) lam[g] /= area[g];
    for (auto& c : res.partition.coarse_of) c = group[c];
    res.mesh = std::move(coarse);
    res.lambda = std::move(lam);
    res.partition.levels = level + 1;
  }
  res.partition.members.assign(res.mesh.n_cells(), {});
  for (int c = 0; c < mesh.n_cells(); ++c) res.partition.members[res.partition.coarse_of[c]].push_back(c);
  return res;
}

}  // namespace dfn

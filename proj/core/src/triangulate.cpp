#include "dfnvem/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

using LD = long double;

LD orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (LD(b.x()) - a.x()) * (LD(c.y()) - a.y()) - (LD(b.y()) - a.y()) * (LD(c.x()) - a.x());
}

LD incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const LD adx = LD(a.x()) - d.x(), ady = LD(a.y()) - d.y();
  const LD bdx = LD(b.x()) - d.x(), bdy = LD(b.y()) - d.y();
  const LD cdx = LD(c.x()) - d.x(), cdy = LD(c.y()) - d.y();
  return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
         (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
}

// Incremental Delaunay triangulation with Lawson flips.
class Triangulation {
public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb{-1, -1, -1};  // nb[i] lies across the edge opposite v[i]
    bool alive = true;
  };

  std::vector<Vec2> pts;
  std::vector<Tri> tris;

  Triangulation(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double r = std::max((hi - lo).norm(), 1e-300);
    scale_ = r;
    eps_ = 1e-13 * r;
    pts.push_back(c + Vec2(-60 * r, -40 * r));
    pts.push_back(c + Vec2(60 * r, -40 * r));
    pts.push_back(c + Vec2(0, 80 * r));
    tris.push_back(Tri{{0, 1, 2}});
  }

  static bool is_super(int v) { return v < 3; }

  int insert(const Vec2& p) {
    int t = -1, edge = -1, dup = -1;
    locate(p, t, edge, dup);
    if (dup >= 0) return dup;
    const int pi = int(pts.size());
    pts.push_back(p);
    std::vector<int> created;
    if (edge < 0) split3(t, pi, created);
    else split_edge(t, edge, pi, created);
    legalize(pi, created);
    last_ = created.front();
    return pi;
  }

  std::vector<std::array<int, 3>> alive_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris)
      if (t.alive) out.push_back(t.v);
    return out;
  }

private:
  double scale_ = 1.0, eps_ = 1e-13;
  int last_ = 0;

  double edge_dist(const Vec2& a, const Vec2& b, const Vec2& p) const {
    const double len = (b - a).norm();
    return double(orient(a, b, p)) / len;
  }

  bool classify(int t, const Vec2& p, int& edge, int& dup, int& out_edge) const {
    const Tri& T = tris[t];
    edge = -1;
    dup = -1;
    out_edge = -1;
    for (int k = 0; k < 3; ++k)
      if ((pts[T.v[k]] - p).norm() <= eps_) {
        dup = T.v[k];
        return true;
      }
    int zeros = 0;
    for (int i = 0; i < 3; ++i) {
      const double d = edge_dist(pts[T.v[(i + 1) % 3]], pts[T.v[(i + 2) % 3]], p);
      if (d < -eps_) {
        out_edge = i;
        return false;
      }
      if (d <= eps_) {
        edge = i;
        ++zeros;
      }
    }
    if (zeros > 1) edge = -1;
    return true;
  }

  void locate(const Vec2& p, int& t, int& edge, int& dup) {
    t = (last_ < int(tris.size()) && tris[last_].alive) ? last_ : -1;
    if (t < 0)
      for (size_t i = tris.size(); i-- > 0;)
        if (tris[i].alive) {
          t = int(i);
          break;
        }
    const size_t max_steps = 4 * tris.size() + 16;
    for (size_t step = 0; step < max_steps; ++step) {
      int out = -1;
      if (classify(t, p, edge, dup, out)) return;
      // Check the other edges as well so the walk does not oscillate.
      const Tri& T = tris[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (out + k + int(step)) % 3;
        if (edge_dist(pts[T.v[(i + 1) % 3]], pts[T.v[(i + 2) % 3]], p) < -eps_ && T.nb[i] >= 0) {
          next = T.nb[i];
          break;
        }
      }
      if (next < 0) break;
      t = next;
    }
    for (size_t i = 0; i < tris.size(); ++i) {
      if (!tris[i].alive) continue;
      int out = -1;
      if (classify(int(i), p, edge, dup, out)) {
        t = int(i);
        return;
      }
    }
    throw MeshError("point location failed");
  }

  static bool has_vertex(const Tri& t, int v) { return t.v[0] == v || t.v[1] == v || t.v[2] == v; }

  void connect(const std::vector<int>& ids) {
    for (int x : ids) {
      if (x < 0) continue;
      for (int y : ids) {
        if (y < 0 || y == x) continue;
        Tri& X = tris[x];
        const Tri& Y = tris[y];
        for (int i = 0; i < 3; ++i)
          if (has_vertex(Y, X.v[(i + 1) % 3]) && has_vertex(Y, X.v[(i + 2) % 3])) X.nb[i] = y;
      }
    }
  }

  int make(int t, std::array<int, 3> v) {
    if (t < 0) {
      t = int(tris.size());
      tris.push_back(Tri{v});
    } else {
      tris[t] = Tri{v};
    }
    return t;
  }

  void split3(int t, int p, std::vector<int>& created) {
    const Tri old = tris[t];
    const int a = old.v[0], b = old.v[1], c = old.v[2];
    const int t0 = make(t, {a, b, p});
    const int t1 = make(-1, {b, c, p});
    const int t2 = make(-1, {c, a, p});
    created = {t0, t1, t2};
    connect({t0, t1, t2, old.nb[0], old.nb[1], old.nb[2]});
  }

  void split_edge(int t, int i, int p, std::vector<int>& created) {
    const Tri T = tris[t];
    const int w = T.v[i], u = T.v[(i + 1) % 3], v = T.v[(i + 2) % 3];
    const int n = T.nb[i];
    std::vector<int> ids;
    const int t0 = make(t, {w, u, p});
    const int t1 = make(-1, {w, p, v});
    created = {t0, t1};
    ids = {t0, t1, T.nb[(i + 1) % 3], T.nb[(i + 2) % 3]};
    if (n >= 0) {
      const Tri N = tris[n];
      int x = -1;
      for (int k = 0; k < 3; ++k)
        if (N.v[k] != u && N.v[k] != v) x = N.v[k];
      const int t2 = make(n, {x, v, p});
      const int t3 = make(-1, {x, p, u});
      created.push_back(t2);
      created.push_back(t3);
      ids.push_back(t2);
      ids.push_back(t3);
      for (int k = 0; k < 3; ++k)
        if (N.nb[k] != t) ids.push_back(N.nb[k]);
    }
    connect(ids);
  }

  void legalize(int p, const std::vector<int>& start) {
    std::vector<int> stack(start.begin(), start.end());
    size_t guard = 0;
    while (!stack.empty()) {
      if (++guard > 100000000) throw MeshError("flip cascade did not terminate");
      const int t = stack.back();
      stack.pop_back();
      Tri& T = tris[t];
      int k = -1;
      for (int j = 0; j < 3; ++j)
        if (T.v[j] == p) k = j;
      if (k < 0) continue;
      const int n = T.nb[k];
      if (n < 0) continue;
      const int u = T.v[(k + 1) % 3], v = T.v[(k + 2) % 3];
      const Tri N = tris[n];
      int d = -1;
      for (int j = 0; j < 3; ++j)
        if (N.v[j] != u && N.v[j] != v) d = N.v[j];
      if (incircle(pts[p], pts[u], pts[v], pts[d]) <= 0) continue;
      // The quadrilateral p,u,d,v must be convex for the flip to be valid.
      if (orient(pts[p], pts[u], pts[d]) <= 0 || orient(pts[p], pts[d], pts[v]) <= 0) continue;
      std::vector<int> ids = {t, n};
      for (int j = 0; j < 3; ++j) {
        if (T.nb[j] != n) ids.push_back(T.nb[j]);
        if (N.nb[j] != t) ids.push_back(N.nb[j]);
      }
      make(t, {p, u, d});
      make(n, {p, d, v});
      connect(ids);
      stack.push_back(t);
      stack.push_back(n);
    }
  }
};

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
}

struct Segment {
  int a, b;
  EdgeKind kind;
  int tag;
};

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
  if (points.size() < 3) return {};
  Vec2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Triangulation tr(lo, hi);
  std::vector<int> id;
  for (const auto& p : points) id.push_back(tr.insert(p));
  std::vector<int> back(tr.pts.size(), -1);
  for (size_t i = 0; i < id.size(); ++i) back[id[i]] = int(i);
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tr.alive_triangles()) {
    if (Triangulation::is_super(t[0]) || Triangulation::is_super(t[1]) || Triangulation::is_super(t[2]))
      continue;
    out.push_back({back[t[0]], back[t[1]], back[t[2]]});
  }
  return out;
}

PolyMesh triangulate_polygon(const std::vector<Vec2>& polygon, const std::vector<TraceSegment>& traces,
                             double h, double tol, const TriangulateOptions& opt) {
  if (polygon.size() < 3 || std::abs(polygon_signed_area(polygon)) <= tol * tol)
    throw EmptyDomain("polygon has no area");
  if (!(h > 0)) throw MeshError("h_target must be positive");
  const size_t ns = polygon.size();

  // Constraint pieces: polygon sides then traces, each with its split parameters.
  struct Piece {
    Vec2 a, b;
    EdgeKind kind;
    int tag;
    std::vector<double> cuts;
  };
  std::vector<Piece> pieces;
  for (size_t s = 0; s < ns; ++s)
    pieces.push_back({polygon[s], polygon[(s + 1) % ns], EdgeKind::boundary, int(s), {}});
  for (const auto& tr : traces) {
    if ((tr.b - tr.a).norm() <= tol) continue;
    if (!point_in_polygon(polygon, tr.a, tol) || !point_in_polygon(polygon, tr.b, tol))
      throw ConstraintConflict("trace of line " + std::to_string(tr.line) + " leaves the polygon");
    pieces.push_back({tr.a, tr.b, EdgeKind::trace, tr.line, {}});
  }
  for (size_t i = 0; i < pieces.size(); ++i) {
    for (size_t j = i + 1; j < pieces.size(); ++j) {
      Piece& P = pieces[i];
      Piece& Q = pieces[j];
      if (P.kind == EdgeKind::boundary && Q.kind == EdgeKind::boundary) continue;
      const Vec2 r = P.b - P.a, s = Q.b - Q.a;
      const double lr = r.norm(), ls = s.norm();
      const double den = cross2(r, s);
      if (std::abs(den) <= 1e-12 * lr * ls) {
        const double dist = std::abs(cross2(r, Q.a - P.a)) / lr;
        if (dist > tol) continue;
        const double t0 = (Q.a - P.a).dot(r) / (lr * lr), t1 = (Q.b - P.a).dot(r) / (lr * lr);
        const double lo = std::max(0.0, std::min(t0, t1)), hi = std::min(1.0, std::max(t0, t1));
        if ((hi - lo) * lr > tol) throw ConstraintConflict("overlapping collinear constraints");
        continue;
      }
      const double t = cross2(Q.a - P.a, s) / den;
      const double u = cross2(Q.a - P.a, r) / den;
      const double et = tol / lr, eu = tol / ls;
      if (t < -et || t > 1 + et || u < -eu || u > 1 + eu) {
        if (P.kind == EdgeKind::trace && Q.kind == EdgeKind::trace && segment_distance(P.a, P.b, Q.a, Q.b) <= tol)
          throw ConstraintConflict("traces closer than tolerance without intersecting");
        continue;
      }
      if (t > et && t < 1 - et) P.cuts.push_back(t);
      if (u > eu && u < 1 - eu) Q.cuts.push_back(u);
    }
  }

  Vec2 lo = polygon[0], hi = polygon[0];
  for (const auto& p : polygon) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Triangulation tr(lo, hi);
  std::vector<Vec2> pslg;
  std::vector<int> pslg_id;
  auto add_point = [&](const Vec2& p) {
    for (size_t i = 0; i < pslg.size(); ++i)
      if ((pslg[i] - p).norm() <= tol) return pslg_id[i];
    pslg.push_back(p);
    pslg_id.push_back(tr.insert(p));
    return pslg_id.back();
  };

  std::vector<Segment> segs;
  for (auto& P : pieces) {
    std::vector<double> ts = P.cuts;
    ts.push_back(0.0);
    ts.push_back(1.0);
    std::sort(ts.begin(), ts.end());
    const double len = (P.b - P.a).norm();
    std::vector<double> uniq;
    for (double t : ts)
      if (uniq.empty() || (t - uniq.back()) * len > tol) uniq.push_back(t);
    if (uniq.back() < 1.0) uniq.back() = 1.0;
    for (size_t k = 0; k + 1 < uniq.size(); ++k) {
      const Vec2 a = P.a + uniq[k] * (P.b - P.a), b = P.a + uniq[k + 1] * (P.b - P.a);
      const int n = std::max(1, int(std::ceil((b - a).norm() / h - 1e-9)));
      int prev = add_point(a);
      for (int m = 1; m <= n; ++m) {
        const int cur = m == n ? add_point(b) : add_point(a + (double(m) / n) * (b - a));
        if (cur != prev) segs.push_back({prev, cur, P.kind, P.tag});
        prev = cur;
      }
    }
  }

  // Interior points on an equilateral lattice, away from all constraints.
  const double dy = h * std::sqrt(3.0) / 2.0;
  const double clear = opt.lattice_clearance * h;
  for (int j = 0;; ++j) {
    const double y = lo.y() + (j + 0.5) * dy;
    if (y >= hi.y()) break;
    for (int i = 0;; ++i) {
      const double x = lo.x() + (i + 0.25 + 0.5 * (j % 2)) * h;
      if (x >= hi.x()) break;
      const Vec2 p(x, y);
      if (!point_in_polygon(polygon, p, 0.0)) continue;
      bool ok = true;
      for (const auto& P : pieces)
        if (point_segment_distance(p, P.a, P.b) < clear) {
          ok = false;
          break;
        }
      if (ok) tr.insert(p);
    }
  }

  auto edges_present = [&]() {
    std::unordered_set<uint64_t> set;
    for (const auto& t : tr.tris)
      if (t.alive)
        for (int k = 0; k < 3; ++k) set.insert(edge_key(t.v[k], t.v[(k + 1) % 3]));
    return set;
  };
  auto split_segment = [&](size_t s) {
    Segment sg = segs[s];
    const int m = tr.insert(0.5 * (tr.pts[sg.a] + tr.pts[sg.b]));
    segs[s].b = m;
    segs.push_back({m, sg.b, sg.kind, sg.tag});
  };
  auto recover = [&]() {
    for (int round = 0; round < 200; ++round) {
      const auto present = edges_present();
      bool missing = false;
      const size_t n = segs.size();
      for (size_t s = 0; s < n; ++s)
        if (!present.count(edge_key(segs[s].a, segs[s].b))) {
          split_segment(s);
          missing = true;
        }
      if (!missing) return;
    }
    throw MeshError("constraint recovery did not converge");
  };
  auto inside = [&](const std::array<int, 3>& t) {
    if (Triangulation::is_super(t[0]) || Triangulation::is_super(t[1]) || Triangulation::is_super(t[2]))
      return false;
    const Vec2 c = (tr.pts[t[0]] + tr.pts[t[1]] + tr.pts[t[2]]) / 3.0;
    return point_in_polygon(polygon, c, 0.0);
  };

  recover();
  const double hmax = opt.max_diameter_factor * h;
  for (int round = 0; round < opt.max_refine_rounds; ++round) {
    std::vector<Vec2> targets;
    for (const auto& t : tr.alive_triangles()) {
      if (!inside(t)) continue;
      double longest = 0;
      for (int k = 0; k < 3; ++k) longest = std::max(longest, (tr.pts[t[k]] - tr.pts[t[(k + 1) % 3]]).norm());
      if (longest > hmax) targets.push_back((tr.pts[t[0]] + tr.pts[t[1]] + tr.pts[t[2]]) / 3.0);
    }
    if (targets.empty()) break;
    for (const auto& c : targets) {
      size_t enc = segs.size();
      for (size_t s = 0; s < segs.size() && enc == segs.size(); ++s) {
        const Vec2 a = tr.pts[segs[s].a], b = tr.pts[segs[s].b];
        if ((c - 0.5 * (a + b)).norm() < 0.5 * (b - a).norm()) enc = s;
      }
      if (enc < segs.size()) split_segment(enc);
      else tr.insert(c);
    }
    recover();
  }

  std::vector<std::array<int, 3>> kept;
  for (const auto& t : tr.alive_triangles())
    if (inside(t)) kept.push_back(t);
  if (kept.empty()) throw EmptyDomain("no triangles inside polygon");

  std::vector<int> remap(tr.pts.size(), -1);
  std::vector<Vec2> nodes;
  for (auto& t : kept)
    for (int& v : t) {
      if (remap[v] < 0) {
        remap[v] = int(nodes.size());
        nodes.push_back(tr.pts[v]);
      }
      v = remap[v];
    }
  PolyMesh mesh = mesh_from_triangles(nodes, kept);
  std::map<uint64_t, const Segment*> seg_of;
  for (const auto& s : segs)
    if (remap[s.a] >= 0 && remap[s.b] >= 0) seg_of[edge_key(remap[s.a], remap[s.b])] = &s;
  for (auto& e : mesh.edges) {
    auto it = seg_of.find(edge_key(e.n0, e.n1));
    if (it == seg_of.end()) continue;
    e.kind = it->second->kind;
    e.tag = it->second->tag;
  }
  const auto ec = mesh.edge_cells();
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (ec[e][1] < 0 && mesh.edges[e].kind != EdgeKind::boundary)
      throw MeshError("boundary edge without constraint tag");
  }
  for (const auto& s : segs)
    if (remap[s.a] < 0 || remap[s.b] < 0) throw MeshError("constraint vertex outside the mesh");
  return mesh;
}

PolyMesh triangulate(const Fracture& fracture, const std::vector<IntersectionLine>& lines, double h, double tol,
                     const TriangulateOptions& opt) {
  std::vector<TraceSegment> traces;
  for (const auto& l : lines) {
    if (std::find(l.parents.begin(), l.parents.end(), fracture.id) == l.parents.end()) continue;
    traces.push_back({fracture.frame.to_local(l.a), fracture.frame.to_local(l.b), l.id});
  }
  return triangulate_polygon(fracture.polygon, traces, h, tol, opt);
}

}  // namespace dfn

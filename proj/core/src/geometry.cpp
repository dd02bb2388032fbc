#include "dfnvem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross_properly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol) {
  const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
  const double sa = tol * (b - a).norm(), sc = tol * (d - c).norm();
  return ((d1 > sa && d2 < -sa) || (d1 < -sa && d2 > sa)) &&
         ((d3 > sc && d4 < -sc) || (d3 < -sc && d4 > sc));
}

// Parameters where the line q0 + t*dir meets the polygon boundary.
void boundary_crossings(const std::vector<Vec2>& poly, const Vec2& q0, const Vec2& dir, double tol,
                        std::vector<double>& out) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& r = poly[(i + 1) % n];
    const Vec2 e = r - p;
    const double len = e.norm();
    const double denom = cross2(dir, e);
    if (std::abs(denom) <= 1e-14 * len) {
      if (std::abs(cross2(dir, p - q0)) <= tol) {
        out.push_back((p - q0).dot(dir));
        out.push_back((r - q0).dot(dir));
      }
      continue;
    }
    const double u = cross2(p - q0, dir) / denom;
    const double ut = tol / len;
    if (u < -ut || u > 1.0 + ut) continue;
    out.push_back(cross2(p - q0, e) / denom);
  }
}

}  // namespace

Frame build_frame(const std::vector<Vec3>& v, double tol_plane) {
  if (v.size() < 3) throw CollinearVertices("fewer than three vertices");
  Vec3 normal = Vec3::Zero();
  double scale = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec3& p = v[i];
    const Vec3& q = v[(i + 1) % v.size()];
    normal += p.cross(q);
    scale = std::max(scale, (q - v[0]).norm());
  }
  if (scale == 0.0 || normal.norm() <= 1e-12 * scale * scale)
    throw CollinearVertices("polygon vertices are collinear");
  Frame f;
  f.origin = v[0];
  f.n = normal.normalized();
  for (size_t i = 0; i < v.size(); ++i) {
    Vec3 e = v[(i + 1) % v.size()] - v[i];
    e -= e.dot(f.n) * f.n;
    if (e.norm() > 1e-12 * scale) {
      f.t1 = e.normalized();
      break;
    }
  }
  f.t2 = f.n.cross(f.t1);
  // Newell normal is the least squares plane normal for planar data; check deviation against the centroid plane.
  Vec3 c = Vec3::Zero();
  for (const auto& p : v) c += p;
  c /= double(v.size());
  double dev = 0.0;
  for (const auto& p : v) dev = std::max(dev, std::abs((p - c).dot(f.n)));
  if (dev > tol_plane) throw NonPlanarPolygon("max deviation " + std::to_string(dev));
  return f;
}

double polygon_signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

double Fracture::area() const { return std::abs(polygon_signed_area(polygon)); }

Fracture make_fracture(int id, std::vector<Vec3> vertices, double aperture, const Mat2& k, double tol_plane) {
  Fracture f;
  f.id = id;
  f.frame = build_frame(vertices, tol_plane);
  f.vertices = std::move(vertices);
  f.aperture = aperture;
  f.k = k;
  for (const auto& p : f.vertices) f.polygon.push_back(f.frame.to_local(p));
  return f;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double l2 = e.squaredNorm();
  double t = l2 > 0 ? (p - a).dot(e) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * e - p).norm();
}

double distance_to_polygon_boundary(const std::vector<Vec2>& poly, const Vec2& p) {
  double d = std::numeric_limits<double>::max();
  for (size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p, double tol) {
  if (distance_to_polygon_boundary(poly, p) <= tol) return true;
  bool inside = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double default_tolerance(const std::vector<Fracture>& fractures) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = -lo;
  for (const auto& f : fractures)
    for (const auto& v : f.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  if (fractures.empty()) return 1e-9;
  return 1e-9 * std::max((hi - lo).norm(), 1e-300);
}

double FractureNetwork::lambda_hat(int line) const {
  const auto& l = lines.at(line);
  if (!l.k_hat) throw MissingIntersectionProps("line " + std::to_string(line) + " has no k_hat");
  double d = 1.0;
  for (size_t m = 0; m < std::min<size_t>(2, l.parents.size()); ++m) d *= fractures.at(l.parents[m]).aperture;
  return d * *l.k_hat;
}

double FractureNetwork::lambda_tilde(int line, int fracture) const {
  const auto& l = lines.at(line);
  if (!l.k_tilde) throw MissingIntersectionProps("line " + std::to_string(line) + " has no k_tilde");
  return *l.k_tilde / fractures.at(fracture).aperture;
}

std::optional<IntersectionLine> intersect_fractures(const Fracture& a, const Fracture& b, double tol) {
  const Vec3& na = a.frame.n;
  const Vec3& nb = b.frame.n;
  const Vec3 dir = na.cross(nb);
  if (dir.norm() < 1e-10) {
    if (std::abs((b.frame.origin - a.frame.origin).dot(na)) > tol) return std::nullopt;
    std::vector<Vec2> pb;
    for (const auto& v : b.vertices) pb.push_back(a.frame.to_local(v));
    auto strictly_inside = [&](const std::vector<Vec2>& poly, const Vec2& p) {
      return point_in_polygon(poly, p, 0.0) && distance_to_polygon_boundary(poly, p) > tol;
    };
    bool overlap = false;
    for (const auto& p : pb) overlap = overlap || strictly_inside(a.polygon, p);
    for (const auto& p : a.polygon) overlap = overlap || strictly_inside(pb, p);
    for (size_t i = 0; i < a.polygon.size() && !overlap; ++i)
      for (size_t j = 0; j < pb.size() && !overlap; ++j)
        overlap = segments_cross_properly(a.polygon[i], a.polygon[(i + 1) % a.polygon.size()], pb[j],
                                          pb[(j + 1) % pb.size()], tol);
    if (overlap)
      throw CoplanarOverlap("fractures " + std::to_string(a.id) + " and " + std::to_string(b.id));
    return std::nullopt;
  }
  const Vec3 d = dir.normalized();
  Mat3 m;
  m.row(0) = na.transpose();
  m.row(1) = nb.transpose();
  m.row(2) = d.transpose();
  const Vec3 rhs(na.dot(a.frame.origin), nb.dot(b.frame.origin), d.dot(a.frame.origin));
  const Vec3 x0 = m.fullPivLu().solve(rhs);

  std::vector<double> ts;
  for (const Fracture* f : {&a, &b})
    boundary_crossings(f->polygon, f->frame.to_local(x0), f->frame.vector_to_local(d), tol, ts);
  if (ts.size() < 2) return std::nullopt;
  std::sort(ts.begin(), ts.end());
  std::vector<double> uniq;
  for (double t : ts)
    if (uniq.empty() || t - uniq.back() > tol) uniq.push_back(t);

  auto inside_both = [&](double t) {
    const Vec3 x = x0 + t * d;
    return point_in_polygon(a.polygon, a.frame.to_local(x), tol) &&
           point_in_polygon(b.polygon, b.frame.to_local(x), tol);
  };
  double best_lo = 0, best_hi = 0, cur_lo = 0;
  bool open = false;
  for (size_t i = 0; i + 1 < uniq.size(); ++i) {
    const bool in = inside_both(0.5 * (uniq[i] + uniq[i + 1]));
    if (in && !open) {
      cur_lo = uniq[i];
      open = true;
    }
    if (open && (!in || i + 2 == uniq.size())) {
      const double hi = in ? uniq[i + 1] : uniq[i];
      if (hi - cur_lo > best_hi - best_lo) {
        best_lo = cur_lo;
        best_hi = hi;
      }
      open = false;
    }
  }
  if (best_hi - best_lo <= tol) return std::nullopt;

  IntersectionLine line;
  line.a = x0 + best_lo * d;
  line.b = x0 + best_hi * d;
  // Deterministic orientation: lexicographically smaller endpoint first.
  if (std::lexicographical_compare(line.b.data(), line.b.data() + 3, line.a.data(), line.a.data() + 3)) {
    std::swap(line.a, line.b);
  }
  line.parents = {a.id, b.id};
  classify_endpoints(line, {&a, &b}, tol);
  return line;
}

std::optional<IntersectionPoint> intersect_lines(const IntersectionLine& a, const IntersectionLine& b,
                                                 double tol) {
  const Vec3 d1 = a.b - a.a, d2 = b.b - b.a;
  const double l1 = d1.norm(), l2 = d2.norm();
  const Vec3 u1 = d1 / l1, u2 = d2 / l2;
  const Vec3 w = a.a - b.a;
  const Vec3 c = u1.cross(u2);
  if (c.norm() < 1e-10) {
    if ((w - w.dot(u1) * u1).norm() > tol) return std::nullopt;
    const double s0 = (b.a - a.a).dot(u1), s1 = (b.b - a.a).dot(u1);
    const double lo = std::max(0.0, std::min(s0, s1)), hi = std::min(l1, std::max(s0, s1));
    if (hi - lo > tol) throw CollinearOverlap("lines " + std::to_string(a.id) + " and " + std::to_string(b.id));
    return std::nullopt;
  }
  // Closest points of the two infinite lines.
  const double bb = u1.dot(u2);
  const double dd = u1.dot(w), ee = u2.dot(w);
  const double den = 1.0 - bb * bb;
  const double s = (bb * ee - dd) / den;
  const double t = (ee - bb * dd) / den;
  if (s < -tol || s > l1 + tol || t < -tol || t > l2 + tol) return std::nullopt;
  const Vec3 p = a.a + s * u1, q = b.a + t * u2;
  if ((p - q).norm() > tol) return std::nullopt;
  IntersectionPoint ip;
  ip.x = 0.5 * (p + q);
  ip.lines = {a.id, b.id};
  return ip;
}

void classify_endpoints(IntersectionLine& line, const std::vector<const Fracture*>& parents, double tol) {
  for (int e = 0; e < 2; ++e) {
    const Vec3& x = e == 0 ? line.a : line.b;
    bool on_all = true;
    for (const Fracture* f : parents)
      on_all = on_all && distance_to_polygon_boundary(f->polygon, f->frame.to_local(x)) <= tol;
    line.kind[e] = on_all ? EndpointKind::boundary : EndpointKind::immersed;
  }
}

std::vector<IntersectionPoint> intersection_points(const std::vector<IntersectionLine>& lines, double tol) {
  std::vector<IntersectionPoint> points;
  for (size_t i = 0; i < lines.size(); ++i) {
    for (size_t j = i + 1; j < lines.size(); ++j) {
      auto p = intersect_lines(lines[i], lines[j], tol);
      if (!p) continue;
      bool merged = false;
      for (auto& ex : points) {
        if ((ex.x - p->x).norm() > tol) continue;
        for (int l : p->lines)
          if (std::find(ex.lines.begin(), ex.lines.end(), l) == ex.lines.end()) ex.lines.push_back(l);
        merged = true;
        break;
      }
      if (!merged) {
        p->id = int(points.size());
        points.push_back(*p);
      }
    }
  }
  for (auto& p : points) std::sort(p.lines.begin(), p.lines.end());
  return points;
}

FractureNetwork build_network(std::vector<Fracture> fractures, double tol) {
  FractureNetwork net;
  net.tol = tol > 0 ? tol : default_tolerance(fractures);
  for (size_t i = 0; i < fractures.size(); ++i) fractures[i].id = int(i);
  net.fractures = std::move(fractures);
  const auto& fr = net.fractures;
  for (size_t i = 0; i < fr.size(); ++i) {
    for (size_t j = i + 1; j < fr.size(); ++j) {
      auto l = intersect_fractures(fr[i], fr[j], net.tol);
      if (!l) continue;
      bool merged = false;
      for (auto& ex : net.lines) {
        const bool same = ((ex.a - l->a).norm() <= net.tol && (ex.b - l->b).norm() <= net.tol) ||
                          ((ex.a - l->b).norm() <= net.tol && (ex.b - l->a).norm() <= net.tol);
        if (!same) continue;
        for (int p : l->parents)
          if (std::find(ex.parents.begin(), ex.parents.end(), p) == ex.parents.end()) ex.parents.push_back(p);
        merged = true;
        break;
      }
      if (!merged) {
        l->id = int(net.lines.size());
        net.lines.push_back(*l);
      }
    }
  }
  for (auto& l : net.lines) {
    std::vector<const Fracture*> parents;
    for (int p : l.parents) parents.push_back(&net.fractures[p]);
    classify_endpoints(l, parents, net.tol);
  }
  net.points = intersection_points(net.lines, net.tol);
  return net;
}

}  // namespace dfn

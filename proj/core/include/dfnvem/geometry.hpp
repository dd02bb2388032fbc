#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dfn {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

struct Frame {
  Vec3 origin = Vec3::Zero();
  Vec3 t1 = Vec3::UnitX();
  Vec3 t2 = Vec3::UnitY();
  Vec3 n = Vec3::UnitZ();

  Vec2 to_local(const Vec3& x) const { return {(x - origin).dot(t1), (x - origin).dot(t2)}; }
  Vec3 to_global(const Vec2& q) const { return origin + q.x() * t1 + q.y() * t2; }
  Vec3 vector_to_global(const Vec2& v) const { return v.x() * t1 + v.y() * t2; }
  Vec2 vector_to_local(const Vec3& v) const { return {v.dot(t1), v.dot(t2)}; }
  Mat3 normal_projection() const { return n * n.transpose(); }
  Mat3 tangential_projection() const { return Mat3::Identity() - normal_projection(); }
};

// Newell normal, first non-degenerate edge as t1. Throws CollinearVertices or NonPlanarPolygon.
Frame build_frame(const std::vector<Vec3>& vertices, double tol_plane);

struct Fracture {
  int id = 0;
  std::vector<Vec3> vertices;
  std::vector<Vec2> polygon;  // vertices in frame coordinates, counter-clockwise
  double aperture = 1.0;
  Mat2 k = Mat2::Identity();  // tangential permeability in frame coordinates
  Frame frame;

  Mat2 lambda() const { return aperture * k; }
  double area() const;
};

Fracture make_fracture(int id, std::vector<Vec3> vertices, double aperture = 1.0,
                       const Mat2& k = Mat2::Identity(), double tol_plane = 1e-9);

enum class EndpointKind { boundary, immersed };

struct IntersectionLine {
  int id = 0;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  std::vector<int> parents;  // fracture indices, usually two
  std::optional<double> k_hat;
  std::optional<double> k_tilde;
  std::array<EndpointKind, 2> kind{EndpointKind::boundary, EndpointKind::boundary};

  double length() const { return (b - a).norm(); }
  Vec3 tangent() const { return (b - a).normalized(); }
  Vec3 at(double s) const { return a + s * tangent(); }
  double param(const Vec3& x) const { return (x - a).dot(tangent()); }
};

struct IntersectionPoint {
  int id = 0;
  Vec3 x = Vec3::Zero();
  std::vector<int> lines;
};

struct FractureNetwork {
  std::vector<Fracture> fractures;
  std::vector<IntersectionLine> lines;
  std::vector<IntersectionPoint> points;
  double tol = 1e-9;

  // Effective tangential permeability of a line: product of the first two parent apertures times k_hat.
  double lambda_hat(int line) const;
  // Effective normal permeability towards one parent fracture.
  double lambda_tilde(int line, int fracture) const;
};

// Relative tolerance: 1e-9 times the bounding box diagonal.
double default_tolerance(const std::vector<Fracture>& fractures);

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p, double tol);
double distance_to_polygon_boundary(const std::vector<Vec2>& poly, const Vec2& p);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double polygon_signed_area(const std::vector<Vec2>& poly);

// An endpoint touches the boundary when it lies on the boundary of every parent; otherwise it is
// a tip inside at least one of them.
void classify_endpoints(IntersectionLine& line, const std::vector<const Fracture*>& parents, double tol);

std::optional<IntersectionLine> intersect_fractures(const Fracture& a, const Fracture& b, double tol);
std::optional<IntersectionPoint> intersect_lines(const IntersectionLine& a, const IntersectionLine& b,
                                                 double tol);

// Meeting points of the lines, merged within tol.
std::vector<IntersectionPoint> intersection_points(const std::vector<IntersectionLine>& lines, double tol);

// Computes all lines and points. Lines coinciding within tol are merged with a longer parent list.
FractureNetwork build_network(std::vector<Fracture> fractures, double tol = 0.0);

}  // namespace dfn

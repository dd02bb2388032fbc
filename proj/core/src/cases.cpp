#include "dfnvem/cases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

constexpr double pi = std::numbers::pi;

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

// Eight-sided approximation of an ellipse centred at y = 1/2 in the plane spanned by `axis` and y.
std::vector<Vec3> ellipse(const Vec3& axis) {
  std::vector<Vec3> v;
  for (int k = 0; k < 8; ++k) {
    const double th = k * pi / 4;
    v.push_back(std::cos(th) * axis + Vec3(0, 0.5 + 0.5 * std::sin(th), 0));
  }
  return v;
}

EdgeBC dirichlet(double v) { return {BCType::dirichlet, v}; }

int line_between(const FractureNetwork& net, int a, int b) {
  for (const auto& l : net.lines)
    if (std::find(l.parents.begin(), l.parents.end(), a) != l.parents.end() &&
        std::find(l.parents.begin(), l.parents.end(), b) != l.parents.end())
      return l.id;
  throw ConfigError("fractures " + std::to_string(a) + " and " + std::to_string(b) + " do not intersect");
}

// Two ellipses x = 0 (fracture 0) and z = 0 (fracture 1) meeting along the y axis.
FractureNetwork ellipse_network() {
  std::vector<Fracture> fr;
  fr.push_back(make_fracture(0, ellipse(Vec3::UnitZ())));
  fr.push_back(make_fracture(1, ellipse(Vec3::UnitX())));
  return build_network(std::move(fr));
}

// Exact fields of the ellipse pair; w is the coordinate normal to the trace inside each fracture.
void ellipse_exact(BenchmarkCase& c, double zeta) {
  auto shift = [zeta](int f, const Vec3& x) {
    return f == 0 ? std::abs(x.z()) - 1.0 : std::abs(x.x()) + zeta;
  };
  c.exact.p = [shift](int f, const Vec3& x) {
    const double w = shift(f, x);
    return 4 * x.y() * (1 - x.y()) * w * w;
  };
  c.exact.u = [shift](int f, const Vec3& x) {
    const double w = shift(f, x), y = x.y();
    const double uy = -4 * (1 - 2 * y) * w * w;
    const double un = -8 * y * (1 - y) * w;
    return f == 0 ? Vec3(0, uy, un * sgn(x.z())) : Vec3(un * sgn(x.x()), uy, 0);
  };
  c.data.f = [shift](int f, const Vec3& x) {
    const double w = shift(f, x);
    return 8 * w * w - 8 * x.y() * (1 - x.y());
  };
  auto p = c.exact.p;
  c.data.edge_bc = [p](int f, int, const Vec3& x) { return dirichlet(p(f, x)); };
}

// Uniform points inside a fracture polygon, mapped to 3D.
std::vector<Vec3> sample_fracture(const Fracture& fr, int n, std::mt19937_64& rng) {
  Vec2 lo = fr.polygon[0], hi = fr.polygon[0];
  for (const auto& q : fr.polygon) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  const double margin = 1e-2 * (hi - lo).norm();
  std::vector<Vec3> out;
  for (int tries = 0; int(out.size()) < n && tries < 1000 * n; ++tries) {
    const Vec2 q(ux(rng), uy(rng));
    if (point_in_polygon(fr.polygon, q, 0.0) && distance_to_polygon_boundary(fr.polygon, q) > margin)
      out.push_back(fr.frame.to_global(q));
  }
  return out;
}

double distance_to_line(const IntersectionLine& l, const Vec3& x) {
  const double s = std::clamp(l.param(x), 0.0, l.length());
  return (l.at(s) - x).norm();
}

// Fourth-order central difference of g along direction d.
template <class G>
auto derivative(const G& g, const Vec3& x, const Vec3& d, double h) {
  return (-g(x + 2 * h * d) + 8.0 * g(x + h * d) - 8.0 * g(x - h * d) + g(x - 2 * h * d)) / (12 * h);
}

}  // namespace

const char* family_name(MeshFamily f) {
  switch (f) {
    case MeshFamily::cartesian: return "cartesian";
    case MeshFamily::triangular: return "triangular";
    case MeshFamily::random: return "random";
    case MeshFamily::coarse: return "coarse";
  }
  return "?";
}

MeshFamily parse_family(const std::string& name) {
  for (auto f : {MeshFamily::cartesian, MeshFamily::triangular, MeshFamily::random, MeshFamily::coarse})
    if (name == family_name(f)) return f;
  throw ConfigError("unknown mesh family '" + name + "'");
}

BenchmarkCase case_single_fracture() {
  BenchmarkCase c;
  c.name = "single";
  const double s = std::sqrt(0.5);
  std::vector<Fracture> fr;
  fr.push_back(make_fracture(0, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, s, s), Vec3(0, s, s)}));
  c.network = build_network(std::move(fr));
  c.model = Model::cc;
  c.exact.p = [](int, const Vec3& x) {
    return x.x() * x.x() * x.z() + 4 * x.y() * x.y() * std::sin(pi * x.y()) - 3 * std::pow(x.z(), 3);
  };
  c.exact.u = [](int, const Vec3& x) {
    const double y = x.y(), z = x.z();
    const double t = 0.5 * (9 * z * z - x.x() * x.x()) - 4 * y * std::sin(pi * y) - 2 * pi * y * y * std::cos(pi * y);
    return Vec3(-2 * x.x() * z, t, t);
  };
  c.data.f = [](int, const Vec3& x) {
    const double y = x.y();
    return 7 * x.z() - 4 * std::sin(pi * y) + 2 * pi * pi * y * y * std::sin(pi * y) - 8 * pi * y * std::cos(pi * y);
  };
  auto p = c.exact.p;
  c.data.edge_bc = [p](int f, int, const Vec3& x) { return dirichlet(p(f, x)); };
  c.families = {MeshFamily::cartesian, MeshFamily::coarse, MeshFamily::triangular, MeshFamily::random};
  c.coarse_base = MeshFamily::cartesian;
  c.c_depth = 2;
  c.h0 = 0.1;
  return c;
}

BenchmarkCase case_two_fractures(double zeta) {
  if (zeta != 1.0 && zeta != -1.0) throw ConfigError("zeta must be 1 or -1");
  BenchmarkCase c;
  c.name = "two-fractures";
  c.network = ellipse_network();
  c.model = Model::cc;
  ellipse_exact(c, zeta);
  c.families = {MeshFamily::triangular, MeshFamily::coarse};
  c.coarse_base = MeshFamily::triangular;
  c.c_depth = 2;
  c.h0 = 0.25;
  return c;
}

BenchmarkCase case_intersection_flow() {
  BenchmarkCase c;
  c.name = "intersection-flow";
  c.network = ellipse_network();
  for (auto& l : c.network.lines) {
    l.k_hat = 1.0;
    l.k_tilde = 8.0;
  }
  c.model = Model::dc;
  ellipse_exact(c, -1.0);
  c.exact.p_hat = [](int, const Vec3& x) { return 5 * x.y() * (1 - x.y()); };
  c.exact.u_hat = [net = c.network](int l, const Vec3& x) {
    return -net.lambda_hat(l) * Vec3(0, 5 - 10 * x.y(), 0).dot(net.lines[l].tangent());
  };
  c.data.f_hat = [](int, const Vec3& x) { return 10 + 32 * x.y() * (1 - x.y()); };
  auto ph = c.exact.p_hat;
  c.data.endpoint_bc = [ph](int l, int, const Vec3& x) { return EndpointBC{EndpointType::dirichlet, ph(l, x)}; };
  c.families = {MeshFamily::triangular, MeshFamily::coarse};
  c.coarse_base = MeshFamily::triangular;
  c.c_depth = 2;
  c.h0 = 0.25;
  return c;
}

BenchmarkCase case_four_fractures() {
  BenchmarkCase c;
  c.name = "four-fractures";
  const double nu = 1.0 / (5.0 * std::sqrt(2.0));
  auto rotate = [](std::vector<Vec3> v, double angle, const Vec3& at, const Vec3& dir) {
    const Eigen::AngleAxisd r(angle, dir.normalized());
    for (auto& x : v) x = at + r * (x - at);
    return v;
  };
  std::vector<Fracture> fr;
  fr.push_back(make_fracture(0, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 0, 1), Vec3(0, 0, 1)}));
  fr.push_back(make_fracture(1, rotate({Vec3(0, 0, -0.2), Vec3(0.5, 0, -0.7), Vec3(1, 0, -0.2), Vec3(0.5, 0, 0.3)},
                                       2 * pi / 3, Vec3(0.5, 0, 0), Vec3(0, 0, 1))));
  const auto v3 = rotate({Vec3(nu, 0, 0.5 + nu), Vec3(0.5 - nu, 0, 0.5 + nu), Vec3(0.5 - nu, 0, 1 + nu),
                          Vec3(nu, 0, 1 + nu)},
                         pi / 6, Vec3(0.5, 0, 0.5), Vec3(1, 0, -1));
  fr.push_back(make_fracture(2, v3));
  // Mirror image of the third fracture under x -> 1 - x, so that it meets the first one along x = z.
  std::vector<Vec3> v4;
  for (auto it = v3.rbegin(); it != v3.rend(); ++it) v4.push_back(Vec3(1 - it->x(), it->y(), it->z()));
  fr.push_back(make_fracture(3, v4));
  c.network = build_network(std::move(fr));
  auto& net = c.network;
  for (auto& l : net.lines) {
    l.k_hat = 1.0;
    l.k_tilde = 1.0;
  }
  net.lines[line_between(net, 0, 1)].k_tilde = 1e-7;
  net.lines[line_between(net, 0, 2)].k_hat = 1e-10;
  net.lines[line_between(net, 0, 3)].k_hat = 1e10;
  c.model = Model::dc;

  const Vec3 source(0.5, 0, 0.5);
  std::vector<Vec3> outlet(net.fractures.size(), source);
  for (size_t f = 1; f < net.fractures.size(); ++f)
    for (const auto& v : net.fractures[f].vertices)
      if ((v - source).norm() > (outlet[f] - source).norm()) outlet[f] = v;
  c.data.point_sources = {PointSource{0, source, 1.0}};
  c.data.edge_bc = [outlet](int f, int, const Vec3& x) {
    if (f > 0 && (x - outlet[f]).norm() < 0.15) return dirichlet(0.0);
    return EdgeBC{};
  };
  c.families = {MeshFamily::triangular, MeshFamily::coarse};
  c.coarse_base = MeshFamily::triangular;
  c.c_depth = 2;
  c.h0 = 0.1;
  return c;
}

BenchmarkCase make_case(const std::string& name) {
  if (name == "single") return case_single_fracture();
  if (name == "two-fractures") return case_two_fractures(1.0);
  if (name == "intersection-flow") return case_intersection_flow();
  if (name == "four-fractures") return case_four_fractures();
  throw ConfigError("unknown case '" + name + "'");
}

std::vector<std::string> case_names() { return {"single", "two-fractures", "intersection-flow", "four-fractures"}; }

double level_size(const BenchmarkCase& c, int level) {
  if (level < 1) throw ConfigError("levels start at 1");
  return c.h0 / double(1 << (level - 1));
}

ResidualCheck strong_residual(const BenchmarkCase& c, int n, uint64_t seed) {
  ResidualCheck r;
  const auto& net = c.network;
  std::mt19937_64 rng(seed);
  const double d = 1e-3;
  if (c.exact.fracture()) {
    for (const auto& fr : net.fractures) {
      const int f = fr.id;
      auto p = [&](const Vec3& x) { return c.exact.p(f, x); };
      auto u = [&](const Vec3& x) { return Vec3(c.exact.u(f, x)); };
      for (const Vec3& x : sample_fracture(fr, n, rng)) {
        // Stencils must not straddle a trace, where the exact fields may have kinks.
        bool near = false;
        for (const auto& l : net.lines) near = near || distance_to_line(l, x) < 5 * d;
        if (near) continue;
        const Vec3 t[2] = {fr.frame.t1, fr.frame.t2};
        double div = 0;
        Vec2 grad;
        for (int i = 0; i < 2; ++i) {
          div += t[i].dot(derivative(u, x, t[i], d));
          grad[i] = derivative(p, x, t[i], d);
        }
        const double source = c.data.f ? c.data.f(f, x) : 0.0;
        const Vec3 ux = u(x);
        const Vec2 darcy = fr.frame.vector_to_local(ux) + fr.lambda() * grad;
        r.divergence = std::max(r.divergence, std::abs(div - source));
        r.darcy = std::max({r.darcy, darcy.norm(), std::abs(ux.dot(fr.frame.n))});
        ++r.samples;
      }
    }
  }
  if (c.exact.line()) {
    std::uniform_real_distribution<double> us(0.05, 0.95);
    for (const auto& l : net.lines) {
      auto ph = [&](const Vec3& x) { return c.exact.p_hat(l.id, x); };
      for (int k = 0; k < n; ++k) {
        const Vec3 x = l.at(us(rng) * l.length());
        const double res = c.exact.u_hat(l.id, x) + net.lambda_hat(l.id) * derivative(ph, x, l.tangent(), d);
        r.line_darcy = std::max(r.line_darcy, std::abs(res));
        ++r.samples;
      }
    }
  }
  return r;
}

}  // namespace dfn

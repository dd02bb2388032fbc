#include "dfnvem/network_io.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "dfnvem/errors.hpp"
#include "json.hpp"

namespace dfn {

namespace {

using json = nlohmann::json;

Vec3 vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + " must be an array of three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

struct Selector {
  std::vector<int> sides;
  bool all = false;
  std::optional<Vec3> near;
  double radius = 0;
  std::optional<std::pair<Vec3, Vec3>> box;
  EdgeBC bc;

  bool matches(int side, const Vec3& x) const {
    if (all) return true;
    for (int s : sides)
      if (s == side) return true;
    if (near && (x - *near).norm() <= radius) return true;
    if (box) {
      const auto& [lo, hi] = *box;
      return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    }
    return false;
  }
};

BCType bc_type(const std::string& s) {
  if (s == "dirichlet") return BCType::dirichlet;
  if (s == "neumann") return BCType::neumann;
  throw ConfigError("unknown boundary condition type '" + s + "'");
}

Selector parse_selector(const json& j) {
  Selector s;
  s.bc.type = bc_type(j.at("type").get<std::string>());
  s.bc.value = j.value("value", 0.0);
  if (j.contains("sides")) s.sides = j["sides"].get<std::vector<int>>();
  s.all = j.value("all", false);
  if (j.contains("near")) {
    s.near = vec3(j["near"], "near");
    s.radius = j.at("radius").get<double>();
  }
  if (j.contains("box")) {
    const auto& b = j["box"];
    if (!b.is_array() || b.size() != 2) throw ConfigError("box must hold two corners");
    s.box = std::make_pair(vec3(b[0], "box corner"), vec3(b[1], "box corner"));
  }
  if (!s.all && s.sides.empty() && !s.near && !s.box) throw ConfigError("boundary entry selects no edges");
  return s;
}

EndpointBC parse_endpoint(const json& j) {
  const std::string t = j.at("type").get<std::string>();
  if (t == "tip") return {EndpointType::tip, 0.0};
  if (t == "dirichlet") return {EndpointType::dirichlet, j.value("value", 0.0)};
  throw ConfigError("unknown endpoint type '" + t + "'");
}

NetworkInput parse(const json& root) {
  if (!root.is_object() || !root.contains("fractures") || !root["fractures"].is_array())
    throw ConfigError("network file needs a 'fractures' array");
  NetworkInput in;
  if (root.contains("model")) {
    const std::string m = root["model"].get<std::string>();
    if (m == "cc") in.model = Model::cc;
    else if (m == "dc") in.model = Model::dc;
    else throw ConfigError("unknown model '" + m + "'");
  }

  std::vector<Fracture> fractures;
  std::map<int, int> index;
  std::vector<std::vector<Selector>> selectors;
  std::vector<double> source;
  const double tol_plane = root.value("plane_tolerance", 1e-9);
  for (const auto& jf : root["fractures"]) {
    const int id = jf.value("id", int(fractures.size()));
    if (index.count(id)) throw ConfigError("duplicate fracture id " + std::to_string(id));
    std::vector<Vec3> v;
    for (const auto& p : jf.at("vertices")) v.push_back(vec3(p, "vertex"));
    Mat2 k = Mat2::Identity();
    if (jf.contains("k_tangential")) {
      const auto kt = jf["k_tangential"].get<std::vector<double>>();
      if (kt.size() != 3) throw ConfigError("k_tangential must be [kxx, kxy, kyy]");
      k << kt[0], kt[1], kt[1], kt[2];
    }
    const double aperture = jf.value("aperture", 1.0);
    if (!(aperture > 0)) throw ConfigError("aperture must be positive");
    index[id] = int(fractures.size());
    fractures.push_back(make_fracture(int(fractures.size()), v, aperture, k, tol_plane));
    std::vector<Selector> sel;
    if (jf.contains("boundary"))
      for (const auto& jb : jf["boundary"]) sel.push_back(parse_selector(jb));
    selectors.push_back(std::move(sel));
    source.push_back(jf.value("source", 0.0));
  }
  auto fracture_index = [&](int id) {
    auto it = index.find(id);
    if (it == index.end()) throw ConfigError("unknown fracture id " + std::to_string(id));
    return it->second;
  };

  in.network = build_network(std::move(fractures), root.value("tolerance", 0.0));
  FractureNetwork& net = in.network;

  std::optional<double> def_hat, def_tilde;
  if (root.contains("defaults")) {
    const auto& d = root["defaults"];
    if (d.contains("k_hat")) def_hat = d["k_hat"].get<double>();
    if (d.contains("k_tilde")) def_tilde = d["k_tilde"].get<double>();
  }
  for (auto& l : net.lines) {
    l.k_hat = def_hat;
    l.k_tilde = def_tilde;
  }

  std::map<int, std::array<EndpointBC, 2>> endpoints;
  bool moved = false;
  if (root.contains("intersections")) {
    for (const auto& ji : root["intersections"]) {
      const auto ids = ji.at("fractures").get<std::vector<int>>();
      if (ids.size() != 2) throw ConfigError("an intersection names exactly two fractures");
      const int a = fracture_index(ids[0]), b = fracture_index(ids[1]);
      IntersectionLine* line = nullptr;
      for (auto& l : net.lines) {
        const auto& p = l.parents;
        if (std::find(p.begin(), p.end(), a) != p.end() && std::find(p.begin(), p.end(), b) != p.end()) line = &l;
      }
      if (ji.contains("a") != ji.contains("b")) throw ConfigError("intersection override needs both 'a' and 'b'");
      if (ji.contains("a")) {
        if (!line) {
          IntersectionLine l;
          l.id = int(net.lines.size());
          l.parents = {a, b};
          l.k_hat = def_hat;
          l.k_tilde = def_tilde;
          net.lines.push_back(l);
          line = &net.lines.back();
        }
        line->a = vec3(ji["a"], "a");
        line->b = vec3(ji["b"], "b");
        if (!(line->length() > net.tol)) throw ConfigError("degenerate intersection override");
        for (int e = 0; e < 2; ++e) {
          const Vec3 x = e == 0 ? line->a : line->b;
          for (int f : line->parents) {
            const Fracture& fr = net.fractures[f];
            if (!point_in_polygon(fr.polygon, fr.frame.to_local(x), net.tol))
              throw ConfigError("intersection override leaves fracture " + std::to_string(f));
          }
        }
        std::vector<const Fracture*> parents;
        for (int f : line->parents) parents.push_back(&net.fractures[f]);
        classify_endpoints(*line, parents, net.tol);
        moved = true;
      }
      if (!line) throw ConfigError("fractures " + std::to_string(ids[0]) + " and " + std::to_string(ids[1]) +
                                   " do not intersect");
      if (ji.contains("k_hat")) line->k_hat = ji["k_hat"].get<double>();
      if (ji.contains("k_tilde")) line->k_tilde = ji["k_tilde"].get<double>();
      if ((line->k_hat && !(*line->k_hat > 0)) || (line->k_tilde && !(*line->k_tilde > 0)))
        throw ConfigError("k_hat and k_tilde must be positive");
      if (ji.contains("endpoints")) {
        const auto& je = ji["endpoints"];
        if (!je.is_array() || je.size() != 2) throw ConfigError("endpoints must list two entries");
        std::array<EndpointBC, 2> e{parse_endpoint(je[0]), parse_endpoint(je[1])};
        endpoints[line->id] = e;
      }
    }
  }
  if (moved) net.points = intersection_points(net.lines, net.tol);

  const auto bc = std::make_shared<std::vector<std::vector<Selector>>>(std::move(selectors));
  in.data.edge_bc = [bc](int f, int side, const Vec3& x) {
    const Selector* hit = nullptr;
    for (const auto& s : (*bc)[f]) {
      if (!s.matches(side, x)) continue;
      if (hit && (hit->bc.type != s.bc.type || hit->bc.value != s.bc.value))
        throw ConflictingBC("two boundary entries of fracture " + std::to_string(f) + " disagree on side " +
                            std::to_string(side));
      hit = &s;
    }
    return hit ? hit->bc : EdgeBC{};
  };
  in.data.endpoint_bc = [endpoints](int l, int end, const Vec3&) {
    auto it = endpoints.find(l);
    return it == endpoints.end() ? EndpointBC{} : it->second[end];
  };
  bool any_source = false;
  for (double s : source) any_source = any_source || s != 0.0;
  if (any_source) in.data.f = [source](int f, const Vec3&) { return source[f]; };
  if (root.contains("sources"))
    for (const auto& js : root["sources"])
      in.data.point_sources.push_back(
          {fracture_index(js.at("fracture").get<int>()), vec3(js.at("x"), "source position"), js.value("q", 1.0)});
  return in;
}

}  // namespace

NetworkInput parse_network(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed network JSON: ") + e.what());
  }
  try {
    return parse(root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid network JSON: ") + e.what());
  }
}

NetworkInput read_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string network_to_json(const FractureNetwork& net) {
  json root;
  root["fractures"] = json::array();
  for (const auto& f : net.fractures) {
    json jf;
    jf["id"] = f.id;
    jf["vertices"] = json::array();
    for (const auto& v : f.vertices) jf["vertices"].push_back(to_json(v));
    jf["aperture"] = f.aperture;
    jf["k_tangential"] = {f.k(0, 0), f.k(0, 1), f.k(1, 1)};
    root["fractures"].push_back(jf);
  }
  root["intersections"] = json::array();
  for (const auto& l : net.lines) {
    if (l.parents.size() < 2) continue;
    json ji;
    ji["fractures"] = {l.parents[0], l.parents[1]};
    if (l.k_hat) ji["k_hat"] = *l.k_hat;
    if (l.k_tilde) ji["k_tilde"] = *l.k_tilde;
    root["intersections"].push_back(ji);
  }
  return root.dump(2);
}

}  // namespace dfn

#include <gtest/gtest.h>

#include <filesystem>

#include "dfnvem/errors.hpp"
#include "dfnvem/network_io.hpp"

using namespace dfn;

namespace {

const char* two_planes = R"({
  "model": "dc",
  "defaults": {"k_hat": 2.0, "k_tilde": 3.0},
  "fractures": [
    {"id": 10, "vertices": [[0,0,0.5],[1,0,0.5],[1,1,0.5],[0,1,0.5]], "aperture": 0.1,
     "k_tangential": [2, 0.5, 1], "source": 1.5,
     "boundary": [{"type": "dirichlet", "value": 1, "sides": [0]},
                  {"type": "neumann", "value": -0.25, "near": [1, 1, 0.5], "radius": 0.2}]},
    {"id": 20, "vertices": [[0.5,0,0],[0.5,1,0],[0.5,1,1],[0.5,0,1]], "aperture": 0.2,
     "boundary": [{"type": "dirichlet", "value": 0, "all": true}]}
  ],
  "intersections": [
    {"fractures": [10, 20], "k_tilde": 5.0,
     "endpoints": [{"type": "dirichlet", "value": 4}, {"type": "tip"}]}
  ],
  "sources": [{"fracture": 20, "x": [0.5, 0.5, 0.5], "q": 2}]
})";

}  // namespace

TEST(NetworkIo, ParsesGeometryPropertiesAndData) {
  const NetworkInput in = parse_network(two_planes);
  ASSERT_EQ(in.network.fractures.size(), 2u);
  ASSERT_EQ(in.network.lines.size(), 1u);
  EXPECT_EQ(in.model, Model::dc);
  const auto& f0 = in.network.fractures[0];
  EXPECT_EQ(f0.id, 0);  // file ids are references only; fractures are numbered by position
  EXPECT_EQ(f0.aperture, 0.1);
  EXPECT_NEAR(f0.k(0, 1), 0.5, 1e-15);
  const auto& l = in.network.lines[0];
  EXPECT_EQ(l.k_hat, 2.0);
  EXPECT_EQ(l.k_tilde, 5.0);
  EXPECT_NEAR(in.network.lambda_hat(0), 0.1 * 0.2 * 2.0, 1e-15);

  EXPECT_EQ(in.data.f(0, Vec3::Zero()), 1.5);
  EXPECT_EQ(in.data.f(1, Vec3::Zero()), 0.0);
  const EdgeBC side0 = in.data.edge_bc(0, 0, Vec3(0.5, 0, 0.5));
  EXPECT_EQ(side0.type, BCType::dirichlet);
  EXPECT_EQ(side0.value, 1.0);
  const EdgeBC corner = in.data.edge_bc(0, 1, Vec3(1, 0.9, 0.5));
  EXPECT_EQ(corner.type, BCType::neumann);
  EXPECT_EQ(corner.value, -0.25);
  EXPECT_EQ(in.data.edge_bc(0, 1, Vec3(1, 0.2, 0.5)).type, BCType::neumann);
  EXPECT_EQ(in.data.edge_bc(0, 1, Vec3(1, 0.2, 0.5)).value, 0.0);
  EXPECT_EQ(in.data.edge_bc(1, 2, Vec3(0.5, 1, 0.5)).type, BCType::dirichlet);
  EXPECT_EQ(in.data.endpoint_bc(0, 0, Vec3::Zero()).type, EndpointType::dirichlet);
  EXPECT_EQ(in.data.endpoint_bc(0, 0, Vec3::Zero()).value, 4.0);
  EXPECT_EQ(in.data.endpoint_bc(0, 1, Vec3::Zero()).type, EndpointType::tip);
  ASSERT_EQ(in.data.point_sources.size(), 1u);
  EXPECT_EQ(in.data.point_sources[0].fracture, 1);
  EXPECT_EQ(in.data.point_sources[0].q, 2.0);
}

TEST(NetworkIo, MalformedInputIsAConfigError) {
  EXPECT_THROW(parse_network("{"), ConfigError);
  EXPECT_THROW(parse_network("{}"), ConfigError);
  EXPECT_THROW(parse_network(R"({"fractures": [{"id": 0, "vertices": [[0,0],[1,0],[1,1]]}]})"), ConfigError);
  EXPECT_THROW(parse_network(R"({"model": "xx", "fractures": []})"), ConfigError);
  EXPECT_THROW(parse_network(R"({"fractures": [{"id": 0, "vertices": [[0,0,0],[1,0,0],[1,1,0]], "aperture": -1}]})"),
               ConfigError);
  EXPECT_THROW(parse_network(R"({"fractures": [{"id": 0, "vertices": [[0,0,0],[1,0,0],[1,1,0]],
                                  "boundary": [{"type": "robin", "all": true}]}]})"),
               ConfigError);
  EXPECT_THROW(parse_network(R"({"fractures": [{"id": 0, "vertices": [[0,0,0],[1,0,0],[1,1,0]],
                                  "boundary": [{"type": "dirichlet"}]}]})"),
               ConfigError);
}

TEST(NetworkIo, GeometryErrorsPropagate) {
  EXPECT_THROW(parse_network(R"({"fractures": [{"id": 0, "vertices": [[0,0,0],[1,1,1],[2,2,2]]}]})"),
               CollinearVertices);
}

TEST(NetworkIo, OverlappingSelectorsMustAgree) {
  const NetworkInput in = parse_network(R"({"fractures": [{"id": 0, "vertices": [[0,0,0],[1,0,0],[1,1,0],[0,1,0]],
      "boundary": [{"type": "dirichlet", "value": 1, "all": true}, {"type": "dirichlet", "value": 2, "sides": [1]}]}]})");
  EXPECT_NO_THROW(in.data.edge_bc(0, 0, Vec3(0.5, 0, 0)));
  EXPECT_THROW(in.data.edge_bc(0, 1, Vec3(1, 0.5, 0)), ConflictingBC);
}

TEST(NetworkIo, UnknownIntersectionRejected) {
  EXPECT_THROW(parse_network(R"({"fractures": [
      {"id": 0, "vertices": [[0,0,0],[1,0,0],[1,1,0],[0,1,0]]},
      {"id": 1, "vertices": [[0,0,5],[1,0,5],[1,1,5],[0,1,5]]}],
      "intersections": [{"fractures": [0, 1], "k_hat": 1}]})"),
               ConfigError);
}

TEST(NetworkIo, JsonRoundTrip) {
  const NetworkInput in = parse_network(two_planes);
  const NetworkInput back = parse_network(network_to_json(in.network));
  ASSERT_EQ(back.network.fractures.size(), in.network.fractures.size());
  for (size_t f = 0; f < in.network.fractures.size(); ++f) {
    const auto& a = in.network.fractures[f];
    const auto& b = back.network.fractures[f];
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.aperture, b.aperture);
    EXPECT_EQ(a.k, b.k);
    ASSERT_EQ(a.vertices.size(), b.vertices.size());
    for (size_t k = 0; k < a.vertices.size(); ++k) EXPECT_EQ(a.vertices[k], b.vertices[k]);
  }
  ASSERT_EQ(back.network.lines.size(), 1u);
  EXPECT_EQ(back.network.lines[0].k_hat, 2.0);
  EXPECT_EQ(back.network.lines[0].k_tilde, 5.0);
}

TEST(NetworkIo, MissingFileIsAnIoError) {
  EXPECT_THROW(read_network("/nonexistent/network.json"), IoError);
}

TEST(NetworkIo, BundledLatticeNetwork) {
  const NetworkInput in = read_network(std::string(DFNVEM_DATA_DIR) + "/networks/lattice11.json");
  EXPECT_EQ(in.network.fractures.size(), 11u);
  EXPECT_GE(in.network.lines.size(), 20u);
  EXPECT_FALSE(in.network.points.empty());
  EXPECT_EQ(in.model, Model::cc);
  for (const auto& l : in.network.lines) {
    EXPECT_EQ(l.k_hat, 1.0);
    EXPECT_EQ(l.k_tilde, 1.0);
  }
}

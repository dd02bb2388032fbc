// One line per acceptance criterion; exit status 1 when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "checks.hpp"
#include "dfnvem/network_io.hpp"

using namespace dfn;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt("%.3f", v[i]);
  return s + "]";
}

// Least-squares slope of log(err) against log(h) over the last n levels.
double fitted_order(const std::vector<ErrorReport>& ladder, double ErrorReport::*err, double ErrorReport::*h,
                    size_t n) {
  const size_t k0 = ladder.size() - std::min(n, ladder.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(ladder.size() - k0);
  for (size_t k = k0; k < ladder.size(); ++k) {
    const double x = std::log(ladder[k].*h), y = std::log(ladder[k].*err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

bool within(const std::vector<double>& v, double lo, double hi) {
  for (double x : v)
    if (!(x >= lo && x <= hi)) return false;
  return true;
}

Verdict criterion1() {
  Verdict v;
  const double ep[] = {4.099e-2, 1.061e-2, 2.682e-3, 6.728e-4};
  const double eu[] = {1.936e-1, 5.923e-2, 1.715e-2, 4.807e-3};
  const auto t = Clock::now();
  const Ladder l = convergence(case_single_fracture(), MeshFamily::cartesian, 4);
  const double secs = since(t);
  for (int k = 0; k < 4; ++k) {
    const double rp = std::abs(l.levels[k].err_p - ep[k]) / ep[k];
    const double ru = std::abs(l.levels[k].err_u - eu[k]) / eu[k];
    v.require(rp <= 0.05, "err_p L" + std::to_string(k + 1) + " off by " + fmt("%.1f%%", 100 * rp));
    v.require(ru <= 0.10, "err_u L" + std::to_string(k + 1) + " off by " + fmt("%.1f%%", 100 * ru));
  }
  // Orders from level 3 on compare levels 2-3 and 3-4.
  const std::vector<double> late(l.orders.p.begin() + 1, l.orders.p.end());
  v.require(within(late, 1.9, 2.1), "p orders " + list(late));
  v.require(secs < 30, "runtime " + fmt("%.1fs", secs));
  v.detail = "err_p " + fmt("%.4e", l.levels[0].err_p) + ".." + fmt("%.4e", l.levels[3].err_p) + " err_u " +
             fmt("%.4e", l.levels[0].err_u) + ".." + fmt("%.4e", l.levels[3].err_u) + " orders_p " + list(l.orders.p) +
             " " + fmt("%.1fs", secs) + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict criterion2() {
  Verdict v;
  std::string info;
  for (auto [family, ulo, uhi] : {std::tuple{MeshFamily::triangular, 0.8, 1.2}, std::tuple{MeshFamily::random, 0.75, 1.1}}) {
    const Ladder l = convergence(case_single_fracture(), family, 5);
    const std::string name = family_name(family);
    v.require(within(l.orders.p, 1.7, 2.2), name + " p orders " + list(l.orders.p));
    v.require(within(l.orders.u, ulo, uhi), name + " u orders " + list(l.orders.u));
    info += name + " p " + list(l.orders.p) + " u " + list(l.orders.u) + " ";
  }
  v.detail = info + (v.pass ? "" : "| " + v.detail);
  return v;
}

// Fracture criteria shared by the two-fracture and intersection-flow ladders.
void fracture_trends(Verdict& v, const Ladder& l, const std::string& name, std::string& info) {
  const double op = fitted_order(l.levels, &ErrorReport::err_p, &ErrorReport::h_avg, 3);
  const double ou = fitted_order(l.levels, &ErrorReport::err_u, &ErrorReport::h_avg, 3);
  v.require(std::abs(op - 2) <= 0.25, name + " p order " + fmt("%.3f", op));
  v.require(std::abs(ou - 1) <= 0.25, name + " u order " + fmt("%.3f", ou));
  info += name + " p " + fmt("%.3f", op) + " u " + fmt("%.3f", ou);
}

Verdict criterion3() {
  Verdict v;
  std::string info;
  for (MeshFamily family : {MeshFamily::triangular, MeshFamily::coarse}) {
    const Ladder l = convergence(case_two_fractures(1.0), family, 5);
    const std::string name = family_name(family);
    fracture_trends(v, l, name, info);
    std::vector<double> maxp;
    for (const auto& r : l.levels) maxp.push_back(r.max_p);
    bool monotone = true;
    for (size_t k = 1; k < maxp.size(); ++k) monotone = monotone && maxp[k] > maxp[k - 1] && maxp[k] <= 4.0 + 1e-6;
    v.require(monotone, name + " max p not monotone toward 4: " + list(maxp));
    v.require(4.0 - maxp.back() < 4.0 - maxp.front(), name + " max p gap does not shrink");
    info += " max_p " + list(maxp) + " ";
  }
  v.detail = info + (v.pass ? "" : "| " + v.detail);
  return v;
}

Verdict criterion4() {
  Verdict v;
  std::string info;
  const Ladder l = convergence(case_intersection_flow(), MeshFamily::triangular, 5);
  fracture_trends(v, l, "triangular", info);
  const double oph = fitted_order(l.levels, &ErrorReport::err_p_hat, &ErrorReport::h_line, 3);
  const double ouh = fitted_order(l.levels, &ErrorReport::err_u_hat, &ErrorReport::h_line, 3);
  v.require(std::abs(oph - 2) <= 0.25, "p_hat order " + fmt("%.3f", oph));
  v.require(ouh >= 1.5, "u_hat order " + fmt("%.3f", ouh));
  v.detail = info + " p_hat " + fmt("%.3f", oph) + " u_hat " + fmt("%.3f", ouh) + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto t = Clock::now();
  std::string info;
  double patch = 0;
  for (auto [family, h] : {std::pair{MeshFamily::cartesian, 0.1}, std::pair{MeshFamily::triangular, 0.1},
                           std::pair{MeshFamily::coarse, 0.05}}) {
    const check::PatchResult r = check::patch_test(family, h);
    patch = std::max({patch, r.pressure, r.flux});
  }
  v.require(patch <= 1e-10, "patch " + fmt("%.2e", patch));

  const double cons = check::consistency_defect(200, 11);
  v.require(cons <= 1e-12, "consistency " + fmt("%.2e", cons));

  double cell = 0, iface = 0, resid = 0;
  for (const auto& c : {case_single_fracture(), case_two_fractures(1.0), case_intersection_flow()}) {
    const RunResult r = run_case(c, MeshFamily::triangular, 2);
    const check::Conservation k = check::conservation(r, c.network, c.model);
    cell = std::max(cell, k.cell);
    iface = std::max(iface, k.interface);
    resid = std::max(resid, k.residual);
  }
  v.require(cell <= 1e-10, "cell balance " + fmt("%.2e", cell));
  v.require(iface <= 1e-10, "interface balance " + fmt("%.2e", iface));

  const double d1 = check::closed_form_1d_defect(10, 5);
  v.require(d1 <= 1e-15, "1D matrices " + fmt("%.2e", d1));

  const check::CoarseningReport cr = check::coarsening_properties(50, 3);
  v.require(cr.failures == 0, std::to_string(cr.failures) + " coarsening failures, " + cr.first_failure);

  const double lim = check::dc_cc_limit(1e12, 2);
  v.require(lim < 1e-4, "dc-cc limit " + fmt("%.2e", lim));

  const double secs = since(t);
  v.require(secs < 10, "runtime " + fmt("%.1fs", secs));
  info = "patch " + fmt("%.1e", patch) + " consistency " + fmt("%.1e", cons) + " cell " + fmt("%.1e", cell) +
         " interface " + fmt("%.1e", iface) + " 1D " + fmt("%.1e", d1) + " coarsening " +
         std::to_string(cr.meshes - cr.failures) + "/" + std::to_string(cr.meshes) + " dc-cc " + fmt("%.1e", lim) +
         " " + fmt("%.1fs", secs);
  v.detail = info + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict criterion6() {
  Verdict v;
  const BenchmarkCase c = case_four_fractures();
  // Cell sampling on non-mirrored meshes adds an O(h) gap; level 3 resolves it below the bound.
  const RunResult r = run_case(c, MeshFamily::triangular, 3);
  const auto& net = c.network;
  const auto& meshes = r.mesh.mesh.fractures;

  const double mean2 = check::mean_pressure(meshes[1], r.solution.pressure[1]);
  v.require(std::abs(mean2) <= 1e-4, "second fracture mean pressure " + fmt("%.2e", mean2));

  const double q3 = check::max_line_flux(r.solution, check::line_between(net, 0, 2));
  const double q4 = check::max_line_flux(r.solution, check::line_between(net, 0, 3));
  v.require(q4 >= 100 * q3, "line flux ratio " + fmt("%.2e", q4 / q3));

  double pmin = 1e300, pmax = -1e300;
  for (const auto& p : r.solution.pressure) {
    pmin = std::min(pmin, p.minCoeff());
    pmax = std::max(pmax, p.maxCoeff());
  }
  // Points of the third fracture halfway between its centroid and its vertices, mirrored into the fourth.
  const Fracture& f3 = net.fractures[2];
  const Fracture& f4 = net.fractures[3];
  Vec3 centre = Vec3::Zero();
  for (const auto& x : f3.vertices) centre += x / double(f3.vertices.size());
  double worst = 0;
  int samples = 0;
  for (const auto& x : f3.vertices) {
    const Vec3 a = 0.5 * (centre + x);
    const Vec3 b(1 - a.x(), a.y(), a.z());
    const int c3 = check::locate(meshes[2], f3, a), c4 = check::locate(meshes[3], f4, b);
    if (c3 < 0 || c4 < 0) continue;
    worst = std::max(worst, std::abs(r.solution.pressure[2][c3] - r.solution.pressure[3][c4]));
    ++samples;
  }
  v.require(samples == int(f3.vertices.size()), "sample points not located");
  v.require(worst <= 1e-2 * (pmax - pmin), "mirrored pressure gap " + fmt("%.2e", worst / (pmax - pmin)));
  v.detail = "mean p(2) " + fmt("%.1e", mean2) + " flux ratio " + fmt("%.1e", q4 / q3) + " mirrored gap " +
             fmt("%.1e", worst / (pmax - pmin)) + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict criterion7() {
  Verdict v;
  const NetworkInput in = read_network(std::string(DFNVEM_DATA_DIR) + "/networks/lattice11.json");
  v.require(in.network.fractures.size() >= 10, "fewer than 10 fractures");
  MeshOptions opt;
  opt.family = MeshFamily::triangular;
  opt.h = 0.1;
  const RunResult r = run(in.network, in.model.value_or(Model::cc), in.data, opt);
  v.require(r.solve.residual < 1e-10, "residual " + fmt("%.2e", r.solve.residual));
  v.require(r.balance.imbalance() < 1e-8, "flux imbalance " + fmt("%.2e", r.balance.imbalance()));
  v.require(r.balance.inflow > 0, "no flow through the network");

  opt.family = MeshFamily::coarse;
  opt.coarse_base = MeshFamily::triangular;
  opt.c_depth = 2;
  const MeshResult m = build_mesh(in.network, opt);
  long fine = 0, coarse = 0;
  for (size_t f = 0; f < m.mesh.fractures.size(); ++f) {
    fine += m.fine_cells[f];
    coarse += m.mesh.fractures[f].n_cells();
  }
  const double reduction = 1.0 - double(coarse) / double(fine);
  v.require(reduction >= 0.5, "cell reduction " + fmt("%.2f", reduction));
  v.detail = std::to_string(in.network.fractures.size()) + " fractures residual " + fmt("%.1e", r.solve.residual) +
             " imbalance " + fmt("%.1e", r.balance.imbalance()) + " cells " + std::to_string(fine) + " -> " +
             std::to_string(coarse) + (v.pass ? "" : " | " + v.detail);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"single fracture cartesian values", criterion1},   {"single fracture triangular/random orders", criterion2},
      {"two fractures cc trends", criterion3},            {"intersection flow dc trends", criterion4},
      {"property suite", criterion5},                     {"four fracture example", criterion6},
      {"imported 10+ fracture network", criterion7}};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("criterion %zu %s: %s  (%s)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}

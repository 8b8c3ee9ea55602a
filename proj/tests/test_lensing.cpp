#include "horizon/lensing.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace horizon;

namespace {

// Straight in along +x, then straight out turned by angle_deg toward the hole.
CentroidTrack kinked_track(const LensingConfig& cfg, double angle_deg) {
  CentroidTrack tr;
  const double v = 0.4, th = angle_deg * pi / 180.0, tk = 130.0;
  for (int i = 0; i <= 260; ++i) {
    const double t = i;
    double x = cfg.x0 + v * std::min(t, tk), y = cfg.y0();
    if (t > tk) {
      x += v * std::cos(th) * (t - tk);
      y -= cfg.side * v * std::sin(th) * (t - tk);
    }
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.y.push_back(y);
    tr.r.push_back(std::hypot(x - cfg.cx, y - cfg.cy()));
    tr.captured.push_back(0.0);
    tr.edge.push_back(0.0);
  }
  return tr;
}

}  // namespace

TEST_CASE("geometry for the two sides is mirrored") {
  LensingConfig up, down;
  down.side = -1;
  CHECK(up.y0() == doctest::Approx(up.ny - 1 - down.y0()));
  CHECK(up.cy() == doctest::Approx(up.ny - 1 - down.cy()));
  CHECK(up.y0() - up.cy() == doctest::Approx(up.b));
  CHECK(up.r_s() == up.gamma);
}

TEST_CASE("centroid of a weighted pair and with a mask") {
  const int nx = 4, ny = 3;
  std::vector<double> d(nx * ny, 0.0);
  d[1 + nx * 0] = 1.0;
  d[3 + nx * 2] = 3.0;
  const Point p = centroid(d, nx, ny);
  CHECK(p.x == doctest::Approx(2.5));
  CHECK(p.y == doctest::Approx(1.5));
  std::vector<unsigned char> mask(nx * ny, 1);
  mask[3 + nx * 2] = 0;
  const Point q = centroid(d, nx, ny, mask);
  CHECK(q.x == doctest::Approx(1.0));
  CHECK(q.y == doctest::Approx(0.0));
}

TEST_CASE("bending angle of a synthetic kinked track") {
  for (int side : {1, -1}) {
    LensingConfig cfg;
    cfg.side = side;
    cfg.gamma = 5.0;
    for (double a : {0.0, 3.0, 12.0, -4.0}) {
      const Deflection d = deflection_metrics(kinked_track(cfg, a), cfg);
      REQUIRE(d.defined);
      CHECK(d.bending_deg == doctest::Approx(a).epsilon(1e-9).scale(1));
      CHECK_FALSE(d.captured);
    }
  }
}

TEST_CASE("capture makes the angle undefined and ranks above any angle") {
  LensingConfig cfg;
  cfg.gamma = 40.0;  // r_s beyond the closest approach of the synthetic track
  const Deflection d = deflection_metrics(kinked_track(cfg, 10.0), cfg);
  CHECK(d.captured);
  CHECK_FALSE(d.defined);
  CHECK(bending_rank(d) == std::numeric_limits<double>::infinity());
  Deflection open;
  open.defined = true;
  open.bending_deg = 7.0;
  CHECK(bending_rank(open) == 7.0);
  CHECK(std::isnan(bending_rank(Deflection{})));
}

TEST_CASE("mirror mismatch of exact mirror tracks is zero") {
  LensingConfig up, down;
  down.side = -1;
  const CentroidTrack a = kinked_track(up, 8.0), b = kinked_track(down, 8.0);
  CHECK(mirror_mismatch(a, b, up.ny) < 1e-12);
  CHECK(mirror_mismatch(a, a, up.ny) > 1.0);
}

TEST_CASE("mirror mismatch stops at t_max") {
  LensingConfig up, down;
  down.side = -1;
  const CentroidTrack a = kinked_track(up, 8.0);
  CentroidTrack b = kinked_track(down, 8.0);
  const std::size_t cut = b.t.size() / 2;
  for (std::size_t i = cut; i < b.t.size(); ++i) b.y[i] += 3.0;
  CHECK(mirror_mismatch(a, b, up.ny) == doctest::Approx(3.0));
  CHECK(mirror_mismatch(a, b, up.ny, b.t[cut]) < 1e-12);
  CHECK(mirror_mismatch(a, b, up.ny, b.t[cut] + 1e-9) == doctest::Approx(3.0));
}

TEST_CASE("lens config validation") {
  LensingConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.b = 250;  // launch line off the grid
  CHECK_THROWS_AS(cfg.validate(), FieldError);
  LensSweepConfig s;
  CHECK_NOTHROW(s.validate());
  s.gammas.clear();
  CHECK_THROWS_AS(s.validate(), FieldError);
}

TEST_CASE("flat lattice keeps a small packet straight") {
  LensingConfig cfg;
  cfg.nx = 100;
  cfg.ny = 80;
  cfg.gamma = 0.0;
  cfg.b = 10.0;
  cfg.cx = 50.0;
  cfg.x0 = 30.0;
  cfg.sigma = 5.0;
  cfg.t_end = 80.0;
  cfg.pre_window = 20.0;
  cfg.post_window = 20.0;
  cfg.snapshot_times = {0.0, 80.0};
  const LensingRun run = run_lensing(cfg);
  CHECK(run.valid);
  CHECK(run.energy_drift < 1e-3);
  CHECK(run.snapshots.size() == 2);
  const Deflection d = deflection_metrics(run.track, cfg);
  CHECK(d.max_deviation < 1.0);
  CHECK(run.track.x.back() > run.track.x.front() + 10.0);
}

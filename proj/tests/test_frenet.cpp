#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "raceduel/feasibility.hpp"
#include "raceduel/frenet.hpp"

using namespace raceduel;
using doctest::Approx;

namespace {

struct BoundaryGen {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> pos{-7.0, 7.0}, vel{-15.0, 15.0}, acc{-25.0, 25.0},
      horizon{0.5, 5.0}, spos{0.0, 200.0}, svel{0.0, 85.0};
  explicit BoundaryGen(unsigned seed) : rng(seed) {}
  KinematicPoint lateral() { return {pos(rng), vel(rng), acc(rng)}; }
  KinematicPoint longitudinal() { return {spos(rng), svel(rng), acc(rng)}; }
};

}  // namespace

TEST_SUITE("frenet") {

TEST_CASE("quintic examples") {
  auto q = solve_quintic({0, 0, 0}, {0, 0, 0}, 2.5);
  for (double c : q.coefficients()) CHECK(c == 0.0);

  q = solve_quintic({2, 0, 0}, {2, 0, 0}, 2.5);
  CHECK(q.coefficients()[0] == 2.0);
  for (std::size_t i = 1; i < 6; ++i) CHECK(q.coefficients()[i] == Approx(0.0));

  q = solve_quintic({0, 0, 0}, {4, 0, 0}, 2.5);
  const auto ref = oracle::quintic({0, 0, 0}, {4, 0, 0}, 2.5L);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(q.coefficients()[i] == Approx(static_cast<double>(ref[i])).epsilon(1e-12));
  }
  CHECK(q.position(1.25) == Approx(2.0).epsilon(1e-12));
  CHECK(q.position(2.5) == Approx(4.0).epsilon(1e-12));
}

TEST_CASE("quartic examples") {
  auto q = solve_quartic({0, 50, 0}, 50.0, 0.0, 2.5);
  CHECK(q.coefficients()[1] == 50.0);
  CHECK(q.position(2.0) == Approx(100.0).epsilon(1e-14));
  CHECK(q.acceleration(1.0) == Approx(0.0));

  q = solve_quartic({0, 0, 0}, 0.0, 0.0, 2.5);
  for (double c : q.coefficients()) CHECK(c == 0.0);

  q = solve_quartic({0, 50, 0}, 60.0, 0.0, 2.5);
  const auto ref = oracle::quartic({0, 50, 0}, 60.0L, 0.0L, 2.5L);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(q.coefficients()[i] == Approx(static_cast<double>(ref[i])).epsilon(1e-12));
  }
  CHECK(q.velocity(2.5) == Approx(60.0).epsilon(1e-12));
  CHECK(std::abs(q.acceleration(2.5)) < 1e-12);
}

TEST_CASE("non-positive horizons are rejected") {
  CHECK_THROWS_AS(solve_quintic({0, 0, 0}, {1, 0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_quartic({0, 0, 0}, 1.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("closed-form coefficients agree with a generic linear solve") {
  BoundaryGen gen(21);
  for (int i = 0; i < 200; ++i) {
    const auto a = gen.lateral(), b = gen.lateral();
    const double T = gen.horizon(gen.rng);
    const auto q = solve_quintic(a, b, T);
    const auto ref = oracle::quintic(a, b, T);
    for (std::size_t k = 0; k < 6; ++k) {
      const double scale = std::max(1.0, std::abs(static_cast<double>(ref[k])));
      REQUIRE(std::abs(q.coefficients()[k] - static_cast<double>(ref[k])) <= 1e-9 * scale);
    }
    const auto l = gen.longitudinal();
    const double v = gen.svel(gen.rng);
    const auto qq = solve_quartic(l, v, 0.0, T);
    const auto rq = oracle::quartic(l, v, 0.0L, T);
    for (std::size_t k = 0; k < 5; ++k) {
      const double scale = std::max(1.0, std::abs(static_cast<double>(rq[k])));
      REQUIRE(std::abs(qq.coefficients()[k] - static_cast<double>(rq[k])) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("boundary conditions are reproduced") {
  BoundaryGen gen(7);
  for (int i = 0; i < 1000; ++i) {
    const auto a = gen.lateral(), b = gen.lateral();
    const double T = gen.horizon(gen.rng);
    const auto q = solve_quintic(a, b, T);
    REQUIRE(std::abs(q.position(0) - a.pos) <= 1e-9);
    REQUIRE(std::abs(q.velocity(0) - a.vel) <= 1e-9);
    REQUIRE(std::abs(q.acceleration(0) - a.acc) <= 1e-9);
    REQUIRE(std::abs(q.position(T) - b.pos) <= 1e-9);
    REQUIRE(std::abs(q.velocity(T) - b.vel) <= 1e-9);
    REQUIRE(std::abs(q.acceleration(T) - b.acc) <= 1e-9);

    const auto s = gen.longitudinal();
    const double v = gen.svel(gen.rng), acc = gen.acc(gen.rng);
    const auto r = solve_quartic(s, v, acc, T);
    REQUIRE(std::abs(r.position(0) - s.pos) <= 1e-9);
    REQUIRE(std::abs(r.velocity(0) - s.vel) <= 1e-9);
    REQUIRE(std::abs(r.acceleration(0) - s.acc) <= 1e-9);
    REQUIRE(std::abs(r.velocity(T) - v) <= 1e-9);
    REQUIRE(std::abs(r.acceleration(T) - acc) <= 1e-9);
  }
}

TEST_CASE("jerk of the quintic is not beaten by a same-boundary perturbation") {
  BoundaryGen gen(99);
  std::uniform_real_distribution<double> eps(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const auto a = gen.lateral(), b = gen.lateral();
    const double T = 2.5;
    const auto q = solve_quintic(a, b, T);
    std::array<oracle::Real, 9> base{};
    for (std::size_t k = 0; k < 6; ++k) base[k] = q.coefficients()[k];
    // t^3 (T - t)^3 (c0 + c1 t + c2 t^2) keeps position, velocity and
    // acceleration at both ends.
    const oracle::Real c0 = eps(gen.rng), c1 = eps(gen.rng), c2 = eps(gen.rng);
    std::array<oracle::Real, 9> bump{};
    const std::array<oracle::Real, 4> cube{T * T * T, -3 * T * T, 3 * T, -1};  // (T - t)^3
    for (std::size_t m = 0; m < 4; ++m) {
      bump[3 + m] += c0 * cube[m];
      bump[4 + m] += c1 * cube[m];
      bump[5 + m] += c2 * cube[m];
    }
    auto other = base;
    for (std::size_t k = 0; k < 9; ++k) other[k] += bump[k];
    REQUIRE(std::fabs(oracle::eval(other, T) - b.pos) < 1e-9);
    REQUIRE(std::fabs(oracle::eval(other, T, 2) - b.acc) < 1e-9);
    const auto j_opt = oracle::squared_jerk(base, T);
    const auto j_alt = oracle::squared_jerk(other, T);
    REQUIRE(j_opt <= j_alt);
  }
}

TEST_CASE("jerk of the quartic is not beaten with the end position left free") {
  BoundaryGen gen(5);
  std::uniform_real_distribution<double> eps(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const auto s = gen.longitudinal();
    const double v = gen.svel(gen.rng);
    const double T = 2.5;
    const auto q = solve_quartic(s, v, 0.0, T);
    std::array<oracle::Real, 8> base{};
    for (std::size_t k = 0; k < 5; ++k) base[k] = q.coefficients()[k];
    // t^3 (T - t)^3 (c0 + c1 t) leaves both ends untouched; c3 * g(t) with
    // g = x3 t^3 + x4 t^4 + x5 t^5, g(T) = 1, g'(T) = g''(T) = 0 moves the
    // free end position only.
    const oracle::Real c0 = eps(gen.rng), c1 = eps(gen.rng), c3 = 5.0 * eps(gen.rng);
    std::array<oracle::Real, 8> bump{};
    const std::array<oracle::Real, 4> cube{T * T * T, -3 * T * T, 3 * T, -1};
    for (std::size_t m = 0; m < 4; ++m) {
      bump[3 + m] += c0 * cube[m];
      bump[4 + m] += c1 * cube[m];
    }
    std::array<std::array<oracle::Real, 3>, 3> sys{};
    std::array<oracle::Real, 3> rhs{1.0L, 0.0L, 0.0L};
    for (int k = 0; k < 3; ++k) {
      for (int p = 0; p < 3; ++p) sys[k][p] = oracle::monomial(3 + p, k, T);
    }
    const auto g = oracle::solve_linear<3>(sys, rhs);
    for (int p = 0; p < 3; ++p) bump[3 + p] += c3 * g[p];
    auto other = base;
    for (std::size_t k = 0; k < 8; ++k) other[k] += bump[k];
    REQUIRE(std::fabs(oracle::eval(other, 0.0L, 1) - s.vel) < 1e-9);
    REQUIRE(std::fabs(oracle::eval(other, T, 1) - v) < 1e-9);
    REQUIRE(std::fabs(oracle::eval(other, T, 2)) < 1e-9);
    REQUIRE(oracle::squared_jerk(base, T) <= oracle::squared_jerk(other, T));
  }
}

TEST_CASE("end-state grid") {
  const TrackModel track;
  const SamplingConfig cfg;
  const auto grid = sample_end_states(track, cfg);
  REQUIRE(grid.lateral.size() == 20);
  REQUIRE(grid.speeds.size() == 40);
  CHECK(grid.size() == 800);
  CHECK(grid.lateral.front() == Approx(-6.535).epsilon(1e-12));
  CHECK(grid.lateral.back() == Approx(6.535).epsilon(1e-12));
  CHECK(grid.speeds.front() == 0.0);
  CHECK(grid.speeds.back() == 85.0);
  for (std::size_t i = 0; i < 10; ++i) CHECK(grid.lateral[i] == -grid.lateral[19 - i]);
  for (std::size_t i = 1; i < 20; ++i) {
    CHECK(grid.lateral[i] - grid.lateral[i - 1] == Approx(13.07 / 19).epsilon(1e-9));
  }

  const auto e = grid.at(41);  // speed index 2, lateral index 1
  CHECK(e.n == grid.lateral[1]);
  CHECK(e.s_dot == grid.speeds[2]);
  CHECK(e.n_dot == 0.0);
  CHECK(e.n_ddot == 0.0);

  const auto again = sample_end_states(track, cfg);
  CHECK(again.lateral == grid.lateral);
  CHECK(again.speeds == grid.speeds);
}

TEST_CASE("linspace") {
  const auto v = linspace(-1.0, 1.0, 5);
  REQUIRE(v.size() == 5);
  CHECK(v[0] == -1.0);
  CHECK(v[2] == 0.0);
  CHECK(v[4] == 1.0);
  CHECK(linspace(3.0, 4.0, 1) == std::vector<double>{3.0});
}

TEST_CASE("straight coasting trajectory") {
  const TrackModel track;
  const auto lat = solve_quintic({0, 0, 0}, {0, 0, 0}, 2.5);
  const auto lon = solve_quartic({0, 50, 0}, 50.0, 0.0, 2.5);
  const auto traj = assemble(lat, lon, track, 51);
  REQUIRE(traj.size() == 51);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& p = traj.points[k];
    CHECK(p.t == Approx(0.05 * static_cast<double>(k)).epsilon(1e-14));
    CHECK(p.heading == 0.0);
    CHECK(p.curvature == 0.0);
    CHECK(p.a_lat == 0.0);
    CHECK(p.v == Approx(50.0));
    CHECK(p.x == p.s);
    CHECK(p.y == p.n);
  }
}

TEST_CASE("lane shift trajectory stays within bounds") {
  const TrackModel track;
  const auto lat = solve_quintic({0, 0, 0}, {4, 0, 0}, 2.5);
  const auto lon = solve_quartic({0, 50, 0}, 50.0, 0.0, 2.5);
  const auto traj = assemble(lat, lon, track, 51);
  double max_n = 0.0;
  for (const auto& p : traj.points) {
    max_n = std::max(max_n, std::abs(p.n));
    CHECK(within_bounds(track, p.n, 0.965));
  }
  CHECK(max_n == Approx(4.0).epsilon(1e-12));
  CHECK(traj.points.back().n == Approx(4.0).epsilon(1e-12));
  CHECK(check_bounds(traj, track, 1.93).feasible);
}

TEST_CASE("trajectory channels follow the planar definitions") {
  const TrackModel track;
  BoundaryGen gen(31);
  for (int i = 0; i < 50; ++i) {
    const auto lat = solve_quintic(gen.lateral(), gen.lateral(), 2.5);
    const auto lon = solve_quartic({0, 40, 0}, gen.svel(gen.rng), 0.0, 2.5);
    for (const auto& p : assemble(lat, lon, track, 51).points) {
      const double v = std::hypot(p.s_dot, p.n_dot);
      REQUIRE(p.v == Approx(v).epsilon(1e-12));
      REQUIRE(p.heading == Approx(std::atan2(p.n_dot, p.s_dot)).epsilon(1e-12));
      if (v > kMinCurvatureSpeed) {
        const double cross = p.s_dot * p.n_ddot - p.n_dot * p.s_ddot;
        REQUIRE(p.curvature == Approx(cross / (v * v * v)).epsilon(1e-10));
        REQUIRE(p.a_lat == Approx(v * v * p.curvature).epsilon(1e-10));
        REQUIRE(p.a_lon == Approx((p.s_dot * p.s_ddot + p.n_dot * p.n_ddot) / v).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("assemble rejects mismatched horizons") {
  const TrackModel track;
  CHECK_THROWS_AS(assemble(solve_quintic({0, 0, 0}, {1, 0, 0}, 2.5),
                           solve_quartic({0, 1, 0}, 1.0, 0.0, 2.0), track, 51),
                  std::invalid_argument);
}

TEST_CASE("candidate set matches connect + assemble for every candidate") {
  const TrackModel track;
  const SamplingConfig cfg;
  const FrenetState start{12.0, 48.0, 1.5, -0.8, 0.6, -0.3};
  const CandidateSet set(start, sample_end_states(track, cfg), cfg, track);
  REQUIRE(set.size() == 800);
  Trajectory scratch;
  for (std::size_t c = 0; c < set.size(); c += 7) {
    const auto curves = connect(start, set.end_state(c), cfg);
    const auto ref = assemble(curves.lateral, curves.longitudinal, track, cfg.points);
    const auto got = set.trajectory(c);
    set.assemble_kinematics_into(c, scratch);
    REQUIRE(got.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
      REQUIRE(got.points[k].s == ref.points[k].s);
      REQUIRE(got.points[k].n == ref.points[k].n);
      REQUIRE(got.points[k].heading == ref.points[k].heading);
      REQUIRE(got.points[k].a_lat == ref.points[k].a_lat);
      REQUIRE(scratch.points[k].a_lon == ref.points[k].a_lon);
      REQUIRE(scratch.points[k].curvature == ref.points[k].curvature);
    }
    const bool lateral_ok = set.lateral_within_bounds(set.grid().lateral_index(c), cfg.vehicle_width);
    REQUIRE(lateral_ok == check_bounds(ref, track, cfg.vehicle_width).feasible);
  }
}

TEST_CASE("curve pair state follows the curves") {
  const SamplingConfig cfg;
  const FrenetState start{0.0, 50.0, 0.0, 0.0, 0.0, 0.0};
  const auto pair = connect(start, {3.0, 0.0, 0.0, 60.0}, cfg);
  const auto st0 = pair.state_at(0.0);
  CHECK(st0.s == 0.0);
  CHECK(st0.s_dot == 50.0);
  CHECK(st0.n == 0.0);
  const auto stT = pair.state_at(2.5);
  CHECK(stT.n == Approx(3.0).epsilon(1e-12));
  CHECK(stT.s_dot == Approx(60.0).epsilon(1e-12));
}

}

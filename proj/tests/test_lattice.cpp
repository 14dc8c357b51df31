#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "rilab/lattice.hpp"
#include "rilab/rng.hpp"

using namespace rilab;

TEST_CASE("point arithmetic and norms") {
  Point a{1, -2, 3};
  Point b{4, 0, -1};
  CHECK((a + b) == Point{5, -2, 2});
  CHECK((a - b) == Point{-3, -2, 4});
  CHECK(a.norm_linf() == 3);
  CHECK(a.norm_l1() == 6);
  CHECK(a.norm_l2() == doctest::Approx(std::sqrt(14.0)));
  CHECK(Point{0, 0} < Point{0, 1});
  CHECK(Point{-1, 5} < Point{0, -9});
}

TEST_CASE("window site indexing is the lexicographic bijection") {
  Window w(Point::zero(2), 1);
  CHECK(w.site_count() == 9);
  CHECK(w.index_of(Point{-1, -1}) == 0);
  CHECK(w.index_of(Point{1, 1}) == 8);
  CHECK(w.site(0) == Point{-1, -1});
  CHECK(w.site(4) == Point{0, 0});

  // bijection + ordering on a random off-center window
  Window w3(Point{5, -7, 2}, 3);
  auto sites = w3.sites();
  REQUIRE(static_cast<std::int64_t>(sites.size()) == w3.site_count());
  for (std::int64_t i = 0; i < w3.site_count(); ++i) {
    CHECK(w3.index_of(sites[static_cast<std::size_t>(i)]) == i);
    if (i > 0) CHECK(sites[static_cast<std::size_t>(i - 1)] < sites[static_cast<std::size_t>(i)]);
  }
  CHECK_THROWS_AS(w3.index_of(Point{5, -7, 6}), std::invalid_argument);
  CHECK_THROWS_AS(w3.site(w3.site_count()), std::invalid_argument);
}

TEST_CASE("window overflow is a checked error") {
  CHECK_THROWS_AS(Window(Point::zero(6), 2'000'000), std::overflow_error);
}

TEST_CASE("box indexing matches window semantics") {
  Box b = Box::cube(Point{-1, -1}, 3);
  Window w(Point::zero(2), 1);
  REQUIRE(b.site_count() == w.site_count());
  for (std::int64_t i = 0; i < b.site_count(); ++i) CHECK(b.site(i) == w.site(i));
  CHECK(!b.contains(Point{2, 0}));
  CHECK(b.contains(Point{1, 1}));
}

TEST_CASE("sphere and smaller ball partition the ball") {
  for (int d = 1; d <= 3; ++d) {
    for (std::int64_t r = 1; r <= 3; ++r) {
      auto ball = ball_points(d, r);
      auto inner = ball_points(d, r - 1);
      auto shell = sphere_points(d, r);
      CHECK(ball.size() == inner.size() + shell.size());
      std::set<Point> all(ball.begin(), ball.end());
      for (const auto& p : inner) CHECK(all.count(p) == 1);
      for (const auto& p : shell) {
        CHECK(all.count(p) == 1);
        CHECK(p.norm_linf() == r);
      }
    }
  }
  CHECK(sphere_points(3, 1).size() == 26);
  CHECK(ball_points(2, 0).size() == 1);
}

TEST_CASE("neighbors are the 2d unit steps") {
  auto nb = neighbors(Point{0, 0, 0});
  CHECK(nb.size() == 6);
  for (const auto& q : nb) CHECK(q.norm_l1() == 1);
}

TEST_CASE("scale system validation and checked arithmetic") {
  ScaleSystem s(3, 10, 1032, 516);
  CHECK(s.length(0) == 10);
  CHECK(s.length(1) == 10320);
  CHECK_THROWS_AS(s.length(6), std::overflow_error);
  CHECK_THROWS_AS(ScaleSystem(3, 1, 10, 9), std::invalid_argument);   // r < 10 in strict mode
  CHECK_THROWS_AS(ScaleSystem(3, 1, 18, 10), std::invalid_argument);  // 2r > l0 in strict mode
  CHECK_NOTHROW(ScaleSystem(2, 1, 10, 5, /*strict=*/false));
  CHECK_THROWS_AS(ScaleSystem(3, 0, 10, 5, false), std::invalid_argument);
}

TEST_CASE("level boxes partition the parent box") {
  ScaleSystem s(2, 2, 3, 1, /*strict=*/false);
  // B_{1,0} has side L1 = 6 and must split into l0^d = 9 level-0 boxes
  Box parent = s.level_box(1, Point::zero(2));
  std::set<Point> seen;
  for (const Point& p : parent.sites()) {
    Point anchor = s.level_floor(p, 0);
    CHECK(parent.contains(anchor));
    seen.insert(anchor);
    CHECK(s.level_box(0, anchor).contains(p));
  }
  CHECK(seen.size() == 9);
}

TEST_CASE("level floor rounds toward minus infinity") {
  ScaleSystem s(2, 5, 4, 1, false);
  CHECK(s.level_floor(Point{-1, -1}, 0) == Point{-5, -5});
  CHECK(s.level_floor(Point{4, 5}, 0) == Point{0, 5});
  CHECK(s.level_floor(Point{-21, 19}, 1) == Point{-40, 0});
}

TEST_CASE("trace path worked example") {
  ScaleSystem s(2, 2, 4, 1, false);
  LatticePath walk = {Point{0, 0}, Point{1, 0}, Point{2, 0}, Point{2, 1}};
  LatticePath tr = trace_path(walk, s);
  REQUIRE(tr.size() == 2);
  CHECK(tr[0] == Point{0, 0});
  CHECK(tr[1] == Point{2, 0});
}

TEST_CASE("trace of a walk that never leaves its box is a single box") {
  ScaleSystem s(2, 3, 4, 1, false);
  LatticePath walk = {Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}, Point{0, 0}};
  LatticePath tr = trace_path(walk, s);
  REQUIRE(tr.size() == 1);
  CHECK(tr[0] == Point{0, 0});
}

TEST_CASE("trace path rejects non-nearest-neighbor input") {
  ScaleSystem s(2, 2, 4, 1, false);
  CHECK_THROWS_AS(trace_path({Point{0, 0}, Point{1, 1}}, s), std::invalid_argument);
  CHECK_THROWS_AS(trace_path({}, s), std::invalid_argument);
}

TEST_CASE("trace of random walks is a nearest-neighbor path on the coarse lattice") {
  Rng rng(derive_seed(20260815, "lattice.trace"));
  for (int rep = 0; rep < 20; ++rep) {
    int d = 2 + static_cast<int>(rng.uniform_int(2));
    std::int64_t L0 = 1 + static_cast<std::int64_t>(rng.uniform_int(4));
    ScaleSystem s(d, L0, 4, 1, false);
    LatticePath walk{Point::zero(d)};
    for (int i = 0; i < 2000; ++i) {
      Point p = walk.back();
      int axis = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
      p.v[axis] += rng.uniform_int(2) == 0 ? -1 : 1;
      walk.push_back(p);
    }
    LatticePath tr = trace_path(walk, s);
    CHECK(is_nn_path(tr, L0));
    // every trace point is the level-0 anchor of some walk point
    std::set<Point> anchors;
    for (const Point& p : walk) anchors.insert(s.level_floor(p, 0));
    for (const Point& y : tr) CHECK(anchors.count(y) == 1);
    // first trace point is the anchor of the start
    CHECK(tr.front() == s.level_floor(walk.front(), 0));
  }
}

#include <cmath>

#include "doctest.h"

#include "jsq/errors.hpp"
#include "jsq/grid_path.hpp"
#include "jsq/scaling.hpp"
#include "jsq/step_path.hpp"

namespace {

jsq::StepPath two_level_path() {
  jsq::StepPath p(2, 2.0);
  const std::int32_t s0[] = {100, 0}, s1[] = {100, 10}, s2[] = {90, 10};
  p.push(0.0, s0);
  p.push(0.5, s1);
  p.push(1.25, s2);
  return p;
}

}  // namespace

TEST_CASE("step path lookup is right-continuous") {
  const auto p = two_level_path();
  CHECK(p.index_at(0.0) == 0);
  CHECK(p.index_at(0.4999) == 0);
  CHECK(p.index_at(0.5) == 1);
  CHECK(p.index_at(1.25) == 2);
  CHECK(p.index_at(2.0) == 2);
  CHECK(p.value_at(0.75, 1) == 10);
  CHECK_THROWS_AS((void)p.index_at(2.5), jsq::GridOutOfRange);
  CHECK_THROWS_AS((void)p.index_at(-0.1), jsq::GridOutOfRange);
}

TEST_CASE("grid spec covering a span") {
  const auto g = jsq::GridSpec::covering(0.0, 1.0, 0.1);
  CHECK(g.count == 11);
  CHECK(g.end() == doctest::Approx(1.0));
  CHECK(jsq::GridSpec::covering(0.0, 0.0, 0.1).count == 1);
  CHECK_THROWS_AS((jsq::GridSpec{0.0, 0.0, 3}.validate()), jsq::PreconditionViolation);
  CHECK_THROWS_AS((jsq::GridSpec{0.0, 0.1, 0}.validate()), jsq::PreconditionViolation);
}

TEST_CASE("diffusion scaling samples the path on the grid") {
  const auto p = two_level_path();
  const auto x = jsq::scale_diffusion(p, 100, jsq::GridSpec{0.0, 0.25, 9});
  REQUIRE(x.rows() == 9);
  REQUIRE(x.cols() == 2);
  CHECK(x.at(0, 0) == 0.0);
  CHECK(x.at(1, 1) == 0.0);
  CHECK(x.at(2, 1) == 1.0);   // t = 0.5 is a jump time
  CHECK(x.at(5, 0) == -1.0);  // t = 1.25
  CHECK(x.at(8, 0) == -1.0);
  const auto psi = jsq::scale_fluid(p, 100, jsq::GridSpec{0.0, 0.25, 9});
  CHECK(psi.at(8, 0) == doctest::Approx(0.9));
  CHECK(psi.at(8, 1) == doctest::Approx(0.1));
}

TEST_CASE("scaling rejects grids beyond the path") {
  const auto p = two_level_path();
  CHECK_THROWS_AS(jsq::scale_diffusion(p, 100, jsq::GridSpec{0.0, 0.5, 6}), jsq::GridOutOfRange);
  CHECK_THROWS_AS(jsq::scale_fluid(p, 100, jsq::GridSpec{-0.5, 0.5, 2}), jsq::GridOutOfRange);
}

TEST_CASE("scale and unscale are inverse on count states") {
  const std::vector<std::int32_t> q{9990, 250, 3, 0};
  const auto x = jsq::scale_state(q, 10000);
  CHECK(x[0] == doctest::Approx(-0.1));
  CHECK(x[1] == doctest::Approx(2.5));
  CHECK(jsq::unscale_diffusion(x, 10000).q == q);
}

TEST_CASE("grid path columns and distances") {
  jsq::GridPath a(jsq::GridSpec{0.0, 1.0, 3}, 2);
  const std::vector<double> c{1.0, 2.0, 3.0};
  a.set_column(1, c);
  CHECK(a.column(1) == c);
  auto b = jsq::GridPath::from_column(a.grid(), c);
  CHECK(b.cols() == 1);
  jsq::GridPath d = a;
  d.at(2, 1) = 3.5;
  CHECK(jsq::sup_distance(a, d) == 0.5);
  CHECK_THROWS_AS(jsq::sup_distance(a, b), jsq::MismatchedInputs);
}

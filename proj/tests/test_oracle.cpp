#include <cmath>
#include <vector>

#include "doctest.h"
#include "nonmarkov/errors.hpp"
#include "nonmarkov/greens.hpp"
#include "nonmarkov/oracle.hpp"

using namespace nonmarkov;
using namespace nonmarkov::oracle;

namespace {
const BathParams kWeak = BathParams::from_critical_ratio(0.5, 5.0, 2.0);
const BathParams kStrong = BathParams::from_critical_ratio(1.5, 5.0, 2.0);

double max_u_error(const BathParams& p, std::size_t modes, double t_max) {
  DiscreteBathOptions opt;
  opt.n_modes = modes;
  const DiscretizedBath bath(p, opt);
  std::vector<double> times;
  for (int k = 0; k <= int(t_max * 2); ++k) times.push_back(0.5 * k);
  const auto traj = bath.propagate(times, p.temp);
  const auto u = greens::solve_u_ide(greens::TimeGrid::covering(0.01, t_max), p);
  double worst = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    worst = std::max(worst, std::abs(u.at_time(times[k]) - traj.u[k]));
  }
  return worst;
}
}  // namespace

TEST_CASE("dimension guard") {
  DiscreteBathOptions opt;
  opt.n_modes = 10000;
  CHECK_THROWS_AS(DiscretizedBath(kWeak, opt), ConfigError);
}

TEST_CASE("geometry of the discretization") {
  DiscreteBathOptions opt;
  opt.n_modes = 100;
  const DiscretizedBath bath(kWeak, opt);
  CHECK(bath.dimension() == 101);
  CHECK(bath.mode_spacing() == doctest::Approx(20.0 * 5.0 / 100));
}

TEST_CASE("propagator starts from the identity and stays a contraction") {
  DiscreteBathOptions opt;
  opt.n_modes = 300;
  const DiscretizedBath bath(kStrong, opt);
  const std::vector<double> times = {0.0, 1.0, 5.0, 10.0};
  const auto traj = bath.propagate(times, 2.0);
  CHECK(std::abs(traj.u[0] - Complex{1.0, 0.0}) < 1e-12);
  CHECK(std::abs(traj.v_at(0, 0)) < 1e-12);
  for (std::size_t a = 0; a < times.size(); ++a) {
    CHECK(std::abs(traj.u[a]) <= 1.0 + 1e-12);
    for (std::size_t b = 0; b < times.size(); ++b) {
      CHECK(std::abs(traj.v_at(a, b) - std::conj(traj.v_at(b, a))) < 1e-12);
    }
  }
}

TEST_CASE("oracle converges towards the integro-differential solution") {
  // short window: before the finite-size recurrence time 2 pi / dw
  const double e_small = max_u_error(kWeak, 250, 10.0);
  const double e_large = max_u_error(kWeak, 1000, 10.0);
  CHECK(e_large < e_small);
  CHECK(e_large < 2e-3);
}

TEST_CASE("oracle bound state sits at the localized pole") {
  DiscreteBathOptions opt;
  opt.n_modes = 800;
  const DiscretizedBath bath(kStrong, opt);
  const auto mode = greens::find_localized_mode(kStrong);
  CHECK(bath.lowest_eigenvalue() == doctest::Approx(mode->omega_b).epsilon(5e-3));
}

TEST_CASE("end-corrected weights reduce the strong-coupling u error") {
  DiscreteBathOptions plain, corrected;
  plain.n_modes = corrected.n_modes = 600;
  corrected.end_correction = true;
  const auto mode = greens::find_localized_mode(kStrong);
  const double e_plain = std::abs(DiscretizedBath(kStrong, plain).lowest_eigenvalue() - mode->omega_b);
  const double e_corr = std::abs(DiscretizedBath(kStrong, corrected).lowest_eigenvalue() - mode->omega_b);
  CHECK(e_corr < e_plain);
}

#include "spillover/mackinnon.hpp"

#include <array>
#include <limits>

#include "spillover/error.hpp"
#include "spillover/stats.hpp"

namespace spillover {

namespace {

// Response-surface coefficients, MacKinnon (1994) Table 3/4, for one and two
// variables. Small-p polynomials are quadratic, large-p cubic.
struct Surface {
  double tau_min, tau_star, tau_max;
  std::array<double, 3> small;
  std::array<double, 4> large;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<Surface, 2> kNone = {{
    {-19.04, -1.04, kInf, {0.6344, 1.2378, 3.2496e-2}, {0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2}},
    {-19.62, -1.53, 1.51, {1.9129, 1.3857, 3.5322e-2}, {1.5578, 8.558e-1, -2.083e-1, -3.3549e-2}},
}};
constexpr std::array<Surface, 2> kConstant = {{
    {-18.83, -1.61, 2.74, {2.1659, 1.4412, 3.8269e-2}, {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2}},
    {-18.86, -2.62, 0.92, {2.92, 1.5012, 3.9796e-2}, {2.1945, 6.4695e-1, -2.9198e-1, -4.2377e-2}},
}};
constexpr std::array<Surface, 2> kTrend = {{
    {-16.18, -2.89, 0.7, {3.2512, 1.6047, 4.9588e-2}, {2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2}},
    {-21.15, -3.19, 0.63, {3.6646, 1.5419, 3.6448e-2}, {2.85, 5.272e-1, -3.6622e-1, -5.1695e-2}},
}};

}  // namespace

MacKinnonP mackinnon_p(double statistic, Deterministic deterministic, int n_variables) {
  if (n_variables < 1 || n_variables > 2)
    throw ParameterError("MacKinnon surfaces are tabulated here for 1 or 2 variables");
  const auto& table = deterministic == Deterministic::none       ? kNone
                      : deterministic == Deterministic::constant ? kConstant
                                                                 : kTrend;
  const Surface& s = table[static_cast<std::size_t>(n_variables - 1)];
  if (statistic > s.tau_max) return {1.0, true};
  if (statistic < s.tau_min) return {0.0, true};
  const double t = statistic;
  double z = 0.0;
  if (t <= s.tau_star)
    z = s.small[0] + s.small[1] * t + s.small[2] * t * t;
  else
    z = s.large[0] + s.large[1] * t + s.large[2] * t * t + s.large[3] * t * t * t;
  return {stats::normal_cdf(z), false};
}

}  // namespace spillover

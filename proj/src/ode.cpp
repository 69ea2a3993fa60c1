#include "fheom/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fheom {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Coefficients of the fourth-order continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

[[noreturn]] void solver_failure(const std::string& what, double t, double h) {
  std::ostringstream os;
  os.precision(6);
  os << what << " at t=" << t << " (step " << h << ")";
  fail(ErrorCode::solver, os.str());
}

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < err.size(); ++k) {
    const double sc = atol + rtol * std::max(std::abs(y0[k]), std::abs(y1[k]));
    const double r = std::abs(err[k]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / std::max<Eigen::Index>(err.size(), 1));
}

bool finite(const Vec& v) { return v.allFinite(); }

// Coefficients of the interpolant over one accepted step.
struct DenseStep {
  Vec r1, r2, r3, r4, r5;

  void fit(const Vec& y0, const Vec& y1, double h, const Vec& k1, const Vec& k3, const Vec& k4,
           const Vec& k5, const Vec& k6, const Vec& k7) {
    r1 = y0;
    r2 = y1 - y0;
    r3 = h * k1 - r2;
    r4 = r2 - h * k7 - r3;
    r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  }

  Vec at(double theta) const {
    const double th1 = 1.0 - theta;
    return r1 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)));
  }
};

}  // namespace

std::vector<Vec> integrate(const Rhs& f, const Vec& y0, std::span<const double> t_grid,
                           const IntegratorOptions& opts, IntegratorStats* stats) {
  if (t_grid.empty()) return {};
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0))
    fail(ErrorCode::invalid_argument, "integrator tolerances must be positive");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] >= t_grid[k - 1]))
      fail(ErrorCode::invalid_argument, "time grid must be non-decreasing");
  if (!finite(y0)) fail(ErrorCode::solver, "initial state is not finite");

  IntegratorStats local;
  IntegratorStats& st = stats ? *stats : local;
  std::vector<Vec> out;
  out.reserve(t_grid.size());

  double t = t_grid.front();
  const double t_end = t_grid.back();
  Vec y = y0;
  Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()), k6(y.size()),
      k7(y.size()), ytmp(y.size()), ynew(y.size()), err(y.size());
  DenseStep interp;
  f(t, y, k1);
  ++st.rhs_calls;

  std::size_t next = 0;
  while (next < t_grid.size() && t_grid[next] <= t) out.push_back(y), ++next;
  if (next == t_grid.size()) return out;

  const double span = t_end - t;
  double h = opts.initial_step;
  if (h <= 0.0) {
    const double y_norm = error_norm(y, y, y, opts.rtol, opts.atol);
    const double f_norm = error_norm(k1, y, y, opts.rtol, opts.atol);
    h = (y_norm < 1e-5 || f_norm < 1e-5) ? 1e-6 : 0.01 * y_norm / f_norm;
    h = std::min(h, span);
  }
  const double h_max = opts.max_step > 0.0 ? opts.max_step : span;

  while (next < t_grid.size()) {
    if (st.accepted + st.rejected >= opts.max_steps) solver_failure("step budget exhausted", t, h);
    h = std::min({h, h_max, t_end - t});
    if (h < 1e-14 * std::max(1.0, std::abs(t))) solver_failure("step size underflow", t, h);

    ytmp = y + h * (a21 * k1);
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, ynew, k7);
    st.rhs_calls += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!finite(ynew) || !finite(k7)) solver_failure("non-finite state", t, h);
    const double en = error_norm(err, y, ynew, opts.rtol, opts.atol);

    if (en <= 1.0) {
      ++st.accepted;
      const double t_new = (t_end - (t + h) <= 1e-15 * std::max(1.0, std::abs(t_end))) ? t_end : t + h;
      bool fitted = false;
      while (next < t_grid.size() && t_grid[next] <= t_new) {
        if (t_grid[next] == t_new) {
          out.push_back(ynew);
        } else {
          if (!fitted) interp.fit(y, ynew, t_new - t, k1, k3, k4, k5, k6, k7), fitted = true;
          out.push_back(interp.at((t_grid[next] - t) / (t_new - t)));
        }
        ++next;
      }
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);
      const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= factor;
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
  }
  return out;
}

}  // namespace fheom

#ifndef ESPIDER_NUMERIC_HPP
#define ESPIDER_NUMERIC_HPP

#include <functional>
#include <vector>

namespace espider::num {

/// Compensated (Kahan) accumulator for plain-double sums.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

/// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
/// min_depth forces the first subdivision levels so narrowly
/// concentrated integrands are not missed by the opening stencil.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth = 40, int min_depth = 4);

/// Natural cubic spline through (x_i, y_i); x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives
};

struct GoldenResult {
  double x;
  double fx;
};

/// Golden-section maximization of f on [a, b] to x-tolerance tol.
GoldenResult golden_max(const std::function<double(double)>& f, double a,
                        double b, double tol);

/// Worker count: min(hardware, ESPIDER_THREADS if set), at least 1.
int worker_count();

/// Runs fn(i) for i in [0, n) on worker_count() threads. Results must be
/// written to preallocated slots so the outcome is order-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace espider::num

#endif

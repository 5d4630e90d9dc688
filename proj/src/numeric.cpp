#include "espider/numeric.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace espider::num {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double m, double fm, double whole,
             double tol, int depth, int force) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (force <= 0 && (depth <= 0 || std::fabs(delta) <= 15.0 * tol))
    return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1,
               force - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1,
               force - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth, int min_depth) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth, min_depth);
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("CubicSpline: need >= 2 matching nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("CubicSpline: x must be strictly increasing");
  m_.assign(n, 0.0);
  if (n == 2) return;
  // Tridiagonal solve for natural second derivatives.
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  diag[0] = 1.0;
  diag[n - 1] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    diag[i] = 2.0 * (hl + hr);
    upper[i] = hr;
    rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
  }
  // Forward elimination (lower entry at row i is hl).
  for (std::size_t i = 2; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1];
    double w = hl / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    if (i == 1) break;
  }
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  if (x <= x_.front()) x = x_.front();
  if (x >= x_.back()) x = x_.back();
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (x_[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  double h = x_[hi] - x_[lo];
  double a = (x_[hi] - x) / h, b = (x - x_[lo]) / h;
  return a * y_[lo] + b * y_[hi] +
         ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
}

GoldenResult golden_max(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("ESPIDER_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < hw) hw = cap;
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next(0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace espider::num

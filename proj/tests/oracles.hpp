// Test-side numerical oracles, kept independent of the library solvers: the
// quadrature, differentiation, matrix exponential and least-squares fits here
// never call into qsm numerics.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Fourth-order central difference.
inline double derivative(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

// Matrix exponential by scaling-and-squaring over a plain Taylor series.
template <class Mat>
Mat expm(const Mat& a) {
  const double norm = a.cwiseAbs().maxCoeff() * a.rows();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const Mat b = a * scale;
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = (term * b / static_cast<double>(k)).eval();
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

// Least-squares fit of y ~ c t^p + d t^{p+1}; returns c.  Including the next
// power removes the leading truncation bias of the estimate.
inline double fit_two_term(const std::vector<double>& t, const std::vector<double>& y, int power) {
  if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("fit: bad input");
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double tp = std::pow(t[i], power);
    const double tq = tp * t[i];
    a11 += tp * tp;
    a12 += tp * tq;
    a22 += tq * tq;
    b1 += tp * y[i];
    b2 += tq * y[i];
  }
  const double det = a11 * a22 - a12 * a12;
  return (b1 * a22 - b2 * a12) / det;
}

// Single-power least squares y ~ c t^p; returns c.
inline double fit_single_term(const std::vector<double>& t, const std::vector<double>& y,
                              int power) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double tp = std::pow(t[i], power);
    num += tp * y[i];
    den += tp * tp;
  }
  return num / den;
}

// Log-spaced sample points for the short-time fits.
inline std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

}  // namespace oracles

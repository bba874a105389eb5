#pragma once

// Canonical per-component formulas. The graph evaluator, the linear-program
// evaluator, and every batch kernel route through these exact expressions so
// that all paths produce bit-identical doubles.

#include <cmath>

namespace warp::ops {

inline double neg(double a) { return -a; }
inline double add(double a, double b) { return a + b; }
inline double sub(double a, double b) { return a - b; }
inline double mul(double a, double b) { return a * b; }
inline double div(double a, double b) { return a / b; }

// a<b?a:b / a>b?a:b match the x86 vmin/vmax select semantics exactly,
// including the signed-zero and NaN cases.
inline double min_(double a, double b) { return a < b ? a : b; }
inline double max_(double a, double b) { return a > b ? a : b; }

inline double abs_(double a) { return std::fabs(a); }
inline double floor_(double a) { return std::floor(a); }
inline double fract(double a) { return a - std::floor(a); }
inline double mod(double x, double y) { return x - y * std::floor(x / y); }
inline double clamp(double x, double lo, double hi) { return min_(max_(x, lo), hi); }
inline double mix(double x, double y, double t) { return x * (1.0 - t) + y * t; }
inline double step(double edge, double x) { return x < edge ? 0.0 : 1.0; }
inline double sign(double x) {
  return (x > 0.0 ? 1.0 : 0.0) - (x < 0.0 ? 1.0 : 0.0);
}

inline double dot2(double ax, double ay, double bx, double by) {
  return ax * bx + ay * by;
}
inline double dot3(double ax, double ay, double az, double bx, double by, double bz) {
  return (ax * bx + ay * by) + az * bz;
}
inline double dot4(double ax, double ay, double az, double aw,
                   double bx, double by, double bz, double bw) {
  return ((ax * bx + ay * by) + az * bz) + aw * bw;
}

inline double cross_x(double ay, double az, double by, double bz) { return ay * bz - az * by; }
inline double cross_y(double ax, double az, double bx, double bz) { return az * bx - ax * bz; }
inline double cross_z(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

}  // namespace warp::ops

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "primespan/special.hpp"
#include "primespan/windows.hpp"

namespace primespan {

// Roots of delta*log(delta) - delta + 1 = 1/t on either side of 1.
struct ImplicitSolution {
  double t = 0.0;
  double delta_plus = 0.0, delta_minus = 0.0;
  double u_plus = 0.0, u_minus = 0.0;           // t * delta
  double residual_plus = 0.0, residual_minus = 0.0;
};

namespace detail {

inline double delta_equation(double d, double target) {
  return d * std::log(d) - d + 1.0 - target;
}

// Bisection to ulp resolution; the equation is monotone on each side of 1.
inline double delta_bisect(double lo, double hi, double target, bool increasing) {
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double g = detail::delta_equation(mid, target);
    bool low_side = increasing ? g < 0.0 : g > 0.0;
    (low_side ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline ImplicitSolution solve_delta(double t) {
  if (!(t > 0.0)) throw std::domain_error("solve_delta: t > 0 required");
  ImplicitSolution out;
  out.t = t;
  double target = 1.0 / t;
  // Upper root: g increases from -1/t at delta = 1.
  double hi = 2.718281828459045;
  while (detail::delta_equation(hi, target) < 0.0) hi *= 2.0;
  out.delta_plus = detail::delta_bisect(1.0, hi, target, true);
  out.residual_plus = detail::delta_equation(out.delta_plus, target);
  // Lower root exists only for t > 1 (g(0+) = 1 - 1/t must be positive).
  if (t > 1.0) {
    out.delta_minus = detail::delta_bisect(1e-300, 1.0, target, false);
    out.residual_minus = detail::delta_equation(out.delta_minus, target);
  }
  out.u_plus = t * out.delta_plus;
  out.u_minus = t * out.delta_minus;
  return out;
}

inline double L_pred(double x, double y) {
  double lx = std::log(x);
  if (!(y >= lx) || !(y < lx * lx))
    throw std::domain_error("L_pred: y in [log x, (log x)^2) required");
  return lx / std::log(lx * lx / y);
}

// Variant driven by lambda = y/(log x)^2; singular at lambda = 1/e.
inline double L_pred_refined(double x, double y) {
  double lx = std::log(x);
  double lambda = y / (lx * lx);
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw std::domain_error("L_pred_refined: y/(log x)^2 in (0,1) required");
  double s = std::log(1.0 / lambda);
  double denom = s - 1.0 - std::log(s);  // log((1/lambda)/(e*s))
  if (!(denom > 0.0))
    throw std::domain_error("L_pred_refined: degenerate at y = (log x)^2/e");
  return lx / denom;
}

struct SievePrediction {
  uint64_t x = 0;
  uint64_t y = 0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double M_pred = 0.0;
  double m_pred = 0.0;
};

inline SievePrediction make_sieve_prediction(uint64_t x, uint64_t y, double c_plus,
                                             double c_minus) {
  if (x < 3 || y == 0 || !(c_plus > 0.0) || !(c_minus > 0.0))
    throw std::domain_error("make_sieve_prediction: bad parameters");
  double lx = std::log(static_cast<double>(x));
  double t = static_cast<double>(y) / (lx * lx);
  SievePrediction p{x, y, c_plus, c_minus, 0.0, 0.0};
  p.M_pred = solve_delta(c_plus * t).u_plus * lx;
  p.m_pred = c_minus * t > 1.0 ? solve_delta(c_minus * t).u_minus * lx : 0.0;
  return p;
}

// Piecewise large-deviation thresholds for B(N, 1/L) against a 1/x budget.
// The low cutoff for k_minus is L*log x, or the exact-mean version
// log x / (-log(1 - 1/L)) when refined.
inline double k_plus(int64_t N, double L, double x, bool refined_cutoff = false) {
  if (N < 1 || !(L > 1.0) || !(x > 2.718281828459045))
    throw std::domain_error("k_plus: need N >= 1, L > 1, x > e");
  double lx = std::log(x);
  double Nd = static_cast<double>(N);
  // Slack keeps exact boundary cases (N log L = log x) in the first range.
  if (Nd * std::log(L) <= lx * (1.0 + 1e-12)) return Nd;
  double cutoff = refined_cutoff ? lx / (-std::log1p(-1.0 / L)) : L * lx;
  if (Nd >= 0.05 * cutoff) {
    double lambda = Nd / (L * lx);
    return solve_delta(lambda).delta_plus * Nd / L;
  }
  return lx / std::log(L * lx / Nd);
}

inline double k_minus(int64_t N, double L, double x, bool refined_cutoff = false) {
  if (N < 1 || !(L > 1.0) || !(x > 2.718281828459045))
    throw std::domain_error("k_minus: need N >= 1, L > 1, x > e");
  double lx = std::log(x);
  double Nd = static_cast<double>(N);
  double cutoff = refined_cutoff ? lx / (-std::log1p(-1.0 / L)) : L * lx;
  if (Nd <= cutoff) return 0.0;
  double lambda = Nd / (L * lx);
  return solve_delta(lambda).delta_minus * Nd / L;
}

inline double relative_entropy(double a, double p) {
  if (!(p > 0.0) || !(p < 1.0) || !(a >= 0.0) || !(a <= 1.0))
    throw std::domain_error("relative_entropy: p in (0,1), a in [0,1] required");
  if (a == 0.0) return -std::log1p(-p);
  if (a == 1.0) return -std::log(p);
  return a * std::log(a / p) + (1.0 - a) * std::log((1.0 - a) / (1.0 - p));
}

struct TailBracket {
  double lower = 0.0;
  double upper = 0.0;
};

// Two-sided bound on P(Y >= k) for k above the mean N/L.
inline TailBracket hoeffding_tail(int64_t N, double L, int64_t k) {
  if (N < 1 || !(L > 1.0) || k < 0 || k > N)
    throw std::domain_error("hoeffding_tail: k in [0,N], L > 1 required");
  double Nd = static_cast<double>(N), kd = static_cast<double>(k);
  if (!(kd > Nd / L))
    throw std::domain_error("hoeffding_tail: k above the mean N/L required");
  double D = relative_entropy(kd / Nd, 1.0 / L);
  TailBracket b;
  b.upper = std::exp(-Nd * D);
  b.lower = k == N ? 0.0 : b.upper / std::sqrt(8.0 * kd * (1.0 - kd / Nd));
  return b;
}

enum class LogMode { raw, refined };

struct MomentPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

// Predicted window mean and variance; the refined mode replaces log x by
// log(4x/e) everywhere the count scale enters.
inline MomentPrediction ms_variance(double x, double y, LogMode mode) {
  double lam = mode == LogMode::raw ? std::log(x) : std::log(4.0 * x / 2.718281828459045);
  MomentPrediction mp;
  mp.mean = y / lam;
  mp.variance = mp.mean * std::log(2.0 * std::exp(-kEulerGamma) * x / (3.141592653589793 * y)) / lam;
  return mp;
}

enum class GapModel { cramer, granville, halfloglog, cadwell, bestfit };

struct BestFitParams {
  double a = 1.0, b = 0.0, c = 0.0;
};

inline double predicted_max_gap(double x, GapModel model, BestFitParams fit = {},
                                double c_minus = c_minus_default()) {
  if (!(x > 15.15426224147926))  // e^e
    throw std::domain_error("predicted_max_gap: x > e^e required");
  double lx = std::log(x), llx = std::log(lx);
  switch (model) {
    case GapModel::cramer: return lx * lx;
    case GapModel::granville: return lx * lx / c_minus;
    case GapModel::halfloglog: return lx * (lx - 0.5 * llx) / c_minus;
    case GapModel::cadwell: return std::log(4.0 * x / 2.718281828459045) * (lx - llx + kEulerGamma);
    case GapModel::bestfit: return lx * (fit.a * lx + fit.b * llx + fit.c);
  }
  throw std::domain_error("predicted_max_gap: unknown model");
}

struct GapCurveFit {
  double a = 1.0;  // held fixed
  double b = 0.0, c = 0.0;
  double rss = 0.0;
};

struct GapCurvePoint {
  double p = 0.0;
  double gap = 0.0;
};

// Least squares for gap ~ log p * (a log p + b loglog p + c) with a fixed:
// two free coefficients against features log p * loglog p and log p.
inline GapCurveFit best_fit_gap_curve(const std::vector<GapCurvePoint>& points, double a_fixed) {
  if (points.size() < 3)
    throw std::invalid_argument("best_fit_gap_curve: at least 3 records required");
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (const auto& pt : points) {
    if (!(pt.p > 15.15426224147926))
      throw std::invalid_argument("best_fit_gap_curve: p > e^e required");
    double lp = std::log(pt.p), llp = std::log(lp);
    double f1 = lp * llp, f2 = lp;
    double target = pt.gap - a_fixed * lp * lp;
    s11 += f1 * f1; s12 += f1 * f2; s22 += f2 * f2;
    r1 += f1 * target; r2 += f2 * target;
  }
  double det = s11 * s22 - s12 * s12;
  double scale = s11 * s22;
  if (!(std::fabs(det) > 1e-12 * std::max(scale, 1e-300)))
    throw std::invalid_argument("best_fit_gap_curve: degenerate design matrix");
  GapCurveFit fit;
  fit.a = a_fixed;
  fit.b = (r1 * s22 - r2 * s12) / det;
  fit.c = (s11 * r2 - s12 * r1) / det;
  for (const auto& pt : points) {
    double lp = std::log(pt.p), llp = std::log(lp);
    double model = lp * (a_fixed * lp + fit.b * llp + fit.c);
    double e = pt.gap - model;
    fit.rss += e * e;
  }
  return fit;
}

inline GapCurveFit best_fit_gap_curve(const std::vector<GapRecord>& records, double a_fixed) {
  std::vector<GapCurvePoint> pts;
  pts.reserve(records.size());
  for (const auto& rec : records)
    pts.push_back({static_cast<double>(rec.p), static_cast<double>(rec.gap)});
  return best_fit_gap_curve(pts, a_fixed);
}

inline double rho_plus_ratio(double t, double c_plus) {
  if (!(t > 0.0) || !(c_plus > 0.0))
    throw std::domain_error("rho_plus_ratio: t > 0, c_plus > 0 required");
  return solve_delta(2.0 * c_plus * t).u_plus / solve_delta(c_plus * t).u_plus;
}

inline double rho_plus_ratio(double t) { return rho_plus_ratio(t, c_plus_default()); }

struct ExponentPair {
  double binom = 0.0;
  double normal = 0.0;
};

// Rate exponents for P(Y >= kappa * mean): true binomial vs normal surrogate.
inline ExponentPair normal_vs_binomial_exponent(double kappa) {
  if (!(kappa >= 1.0))
    throw std::domain_error("normal_vs_binomial_exponent: kappa >= 1 required");
  return {kappa * (std::log(kappa) - 1.0) + 1.0, 0.5 * (kappa - 1.0) * (kappa - 1.0)};
}

}  // namespace primespan

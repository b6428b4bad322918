#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace primespan {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243104;

namespace detail {

// Prefix integrals I[k] = integral of the sampled function over the first k
// panels, spacing h.  Fourth order: cubic opening panel, composite Simpson
// for even k, Simpson plus a 3/8 tail for odd k >= 3.
inline std::vector<double> cumulative_prefix(const std::vector<double>& g, double h) {
  std::size_t n = g.size();
  std::vector<double> I(n, 0.0);
  if (n >= 4)
    I[1] = h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
  else if (n >= 2)
    I[1] = h * (g[0] + g[1]) / 2.0;
  for (std::size_t k = 2; k < n; k += 2)
    I[k] = I[k - 2] + h / 3.0 * (g[k - 2] + 4.0 * g[k - 1] + g[k]);
  for (std::size_t k = 3; k < n; k += 2)
    I[k] = I[k - 3] + 3.0 * h / 8.0 * (g[k - 3] + 3.0 * g[k - 2] + 3.0 * g[k - 1] + g[k]);
  return I;
}

// Values on the grid u = i*h, i in [0, n]; cubic (Catmull-Rom) point reads.
struct DelayDeck {
  double h = 1e-3;
  std::vector<double> v;

  double at(double u) const {
    double x = u / h;
    long n = static_cast<long>(v.size()) - 1;
    long i = static_cast<long>(std::floor(x));
    i = std::max(1L, std::min(n - 2, i));
    double t = x - static_cast<double>(i);
    double vm1 = v[i - 1], v0 = v[i], v1 = v[i + 1], v2 = v[i + 2];
    double a = v0;
    double b = (v1 - vm1) / 2.0;
    double c = vm1 - 2.5 * v0 + 2.0 * v1 - 0.5 * v2;
    double d = -0.5 * vm1 + 1.5 * v0 - 1.5 * v1 + 0.5 * v2;
    return ((d * t + c) * t + b) * t + a;
  }
};

template <class Fn>
inline double golden_min(Fn&& fn, double lo, double hi, double xatol) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > xatol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = fn(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Memoized grids for the four delay-differential functions, advanced one unit
// interval at a time so every integrand sample lies on already-computed
// ground.  Built once; reads afterwards are pure.
class SpecialFnTable {
 public:
  explicit SpecialFnTable(double u_max = 50.0, double step = 1e-3)
      : u_max_(u_max), h_(step) {
    if (!(u_max >= 5.0) || !(step > 0.0) || !(step <= 0.01))
      throw std::domain_error("SpecialFnTable: need u_max >= 5 and 0 < step <= 0.01");
    build();
  }

  double u_max() const { return u_max_; }
  double step() const { return h_; }

  // Exact closed forms cover [0,2]; the grid takes over beyond.
  double rho(double u) const {
    require(u, 0.0, "rho");
    if (u <= 1.0) return 1.0;
    if (u <= 2.0) return 1.0 - std::log(u);
    return std::max(rho_.at(u), 0.0);
  }

  // Closed forms on [1,3].
  double omega(double u) const {
    require(u, 1.0, "omega");
    if (u <= 2.0) return 1.0 / u;
    if (u <= 3.0) return (1.0 + std::log(u - 1.0)) / u;
    return omega_.at(u);
  }

  // f vanishes on (0,2]; both tend to 1, returned as such past the grid.
  double f(double u) const {
    if (!(u > 0.0)) throw std::domain_error("f: u > 0 required");
    if (u <= 2.0) return 0.0;
    if (u > u_max_) return 1.0;
    return f_.at(u);
  }

  double F(double u) const {
    if (!(u > 0.0)) throw std::domain_error("F: u > 0 required");
    if (u <= 3.0) return 2.0 * std::exp(kEulerGamma) / u;
    if (u > u_max_) return 1.0;
    return F_.at(u);
  }

 private:
  double u_max_, h_;
  detail::DelayDeck rho_, omega_, f_, F_;

  void require(double u, double lo, const char* who) const {
    if (!(u >= lo) || u > u_max_) throw std::domain_error(std::string(who) + ": u outside domain");
  }

  void build() {
    // A few spare grid points past u_max keep the cubic reads interior.
    long n1 = std::lround(1.0 / h_);
    long nb = std::lround(u_max_ / h_) + 10;
    rho_.h = omega_.h = f_.h = F_.h = h_;

    // rho' (u) = -rho(u-1)/u, rho = 1 on [0,1].
    rho_.v.assign(nb + 1, 0.0);
    for (long i = 0; i <= n1; ++i) rho_.v[i] = 1.0;
    for (long a = n1; a < nb;) {
      long b = std::min(a + n1, nb);
      std::vector<double> g(b - a + 1);
      for (long j = 0; j <= b - a; ++j)
        g[j] = rho_.v[a + j - n1] / (static_cast<double>(a + j) * h_);
      auto I = detail::cumulative_prefix(g, h_);
      for (long j = 1; j <= b - a; ++j) rho_.v[a + j] = rho_.v[a] - I[j];
      a = b;
    }

    // (u omega)'(u) = omega(u-1), omega = 1/u on [1,2].
    omega_.v.assign(nb + 1, 0.0);
    for (long i = n1; i <= 2 * n1; ++i) omega_.v[i] = 1.0 / (static_cast<double>(i) * h_);
    for (long a = 2 * n1; a < nb;) {
      long b = std::min(a + n1, nb);
      std::vector<double> g(b - a + 1);
      for (long j = 0; j <= b - a; ++j) g[j] = omega_.v[a + j - n1];
      auto I = detail::cumulative_prefix(g, h_);
      double Wa = static_cast<double>(a) * h_ * omega_.v[a];
      for (long j = 1; j <= b - a; ++j)
        omega_.v[a + j] = (Wa + I[j]) / (static_cast<double>(a + j) * h_);
      a = b;
    }

    // Coupled pair: (u f)'(u) = F(u-1) from u f(2) = 0, and
    // (u F)'(u) = f(u-1) from u F = 2e^gamma at u = 3; F = 2e^gamma/u up to 3.
    double eg2 = 2.0 * std::exp(kEulerGamma);
    f_.v.assign(nb + 1, 0.0);
    F_.v.assign(nb + 1, 0.0);
    for (long i = 1; i <= std::min(3 * n1, nb); ++i)
      F_.v[i] = eg2 / (static_cast<double>(i) * h_);
    for (long a = 2 * n1; a < nb;) {
      long b = std::min(a + n1, nb);
      std::vector<double> g(b - a + 1);
      for (long j = 0; j <= b - a; ++j) g[j] = F_.v[a + j - n1];
      auto I = detail::cumulative_prefix(g, h_);
      double fa = static_cast<double>(a) * h_ * f_.v[a];
      for (long j = 1; j <= b - a; ++j)
        f_.v[a + j] = (fa + I[j]) / (static_cast<double>(a + j) * h_);
      long ja = a + n1, jb = std::min(b + n1, nb);
      if (ja < jb) {
        std::vector<double> gf(jb - ja + 1);
        for (long j = 0; j <= jb - ja; ++j) gf[j] = f_.v[ja + j - n1];
        auto I2 = detail::cumulative_prefix(gf, h_);
        double Fa = static_cast<double>(ja) * h_ * F_.v[ja];
        for (long j = 1; j <= jb - ja; ++j)
          F_.v[ja + j] = (Fa + I2[j]) / (static_cast<double>(ja + j) * h_);
      }
      a = b;
    }
  }
};

inline const SpecialFnTable& default_table() {
  static const SpecialFnTable table;
  return table;
}

inline double dickman_rho(double u) { return default_table().rho(u); }
inline double buchstab_omega(double u) { return default_table().omega(u); }
inline double sieve_f(double u) { return default_table().f(u); }
inline double sieve_F(double u) { return default_table().F(u); }

struct CPlusEstimate {
  double value = 0.0;      // e^gamma * max omega
  double maximizer = 0.0;  // where the maximum is attained
};

inline CPlusEstimate c_plus_estimate(const SpecialFnTable& T = default_table()) {
  double best_u = 2.0, best_w = T.omega(2.0);
  for (int i = 0; i <= 400; ++i) {
    double u = 2.0 + 0.01 * i;
    double w = T.omega(u);
    if (w > best_w) { best_w = w; best_u = u; }
  }
  double lo = std::max(2.0, best_u - 0.01), hi = std::min(6.0, best_u + 0.01);
  double u = detail::golden_min([&](double t) { return -T.omega(t); }, lo, hi, 1e-11);
  return {std::exp(kEulerGamma) * T.omega(u), u};
}

inline double c_plus_default() {
  static const double v = c_plus_estimate().value;
  return v;
}

inline double c_minus_default() { return std::exp(kEulerGamma) / 2.0; }

struct MaierStewartPoint {
  double v = 1.0;        // minimizing dilation
  double r_min = 0.0;    // v * (rho(u*v) + log u) at the minimum
  double residual = 0.0; // stationarity defect rho(uv) + log u - rho(uv-1)
  bool at_boundary = false;
};

inline MaierStewartPoint maier_stewart(double u, const SpecialFnTable& T = default_table()) {
  if (!(u > 1.0) || !(u < 2.0)) throw std::domain_error("maier_stewart: u in (1,2) required");
  auto rho0 = [&](double w) { return w <= T.u_max() ? T.rho(w) : 0.0; };
  auto r = [&](double v) { return v * (rho0(u * v) + std::log(u)); };
  // Stationarity defect; also d/dv of r, so its zero is the interior minimum.
  auto slope = [&](double v) { return rho0(u * v) + std::log(u) - rho0(u * v - 1.0); };
  double lo = 1.0, hi = 1.0 / (u - 1.0);
  MaierStewartPoint out;
  if (hi <= lo) {
    out.v = lo;
  } else {
    double tol = std::max(1e-10, 1e-10 * hi);
    out.v = detail::golden_min(r, lo, hi, tol);
    out.at_boundary = out.v - lo < 2.0 * tol || hi - out.v < 2.0 * tol;
    if (out.v - lo < 2.0 * tol) out.v = lo;
    if (hi - out.v < 2.0 * tol) out.v = hi;
    if (!out.at_boundary) {
      double a = std::max(lo, out.v - 1e-4), b = std::min(hi, out.v + 1e-4);
      if (slope(a) < 0.0 && slope(b) > 0.0) {
        for (int i = 0; i < 60; ++i) {
          double mid = 0.5 * (a + b);
          (slope(mid) < 0.0 ? a : b) = mid;
        }
        out.v = 0.5 * (a + b);
      }
    }
  }
  out.r_min = r(out.v);
  out.residual = slope(out.v);
  return out;
}

// Threshold parameter where the minimized r meets e^gamma/2.
inline double maier_stewart_crossover(const SpecialFnTable& T = default_table()) {
  double target = std::exp(kEulerGamma) / 2.0;
  double lo = 1.2, hi = 1.9;  // r_min below the target at lo, above at hi
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (maier_stewart(mid, T).r_min < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace primespan

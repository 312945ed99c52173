#include "tbm/simulate.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace tbm {
namespace {

void check_unit(std::span<const double> u, std::size_t d) {
  if (u.size() != d) throw std::invalid_argument("copula: point dimension mismatch");
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("copula: point outside [0,1]^d");
  }
}

// Positive stable variable with Laplace transform exp(-s^alpha), 0 < alpha < 1
// (Kanter / Chambers-Mallows-Stuck representation).
double positive_stable(double alpha, Engine& rng) {
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::exponential_distribution<double> expo(1.0);
  double theta = angle(rng);
  while (theta <= 0.0) theta = angle(rng);
  const double w = expo(rng);
  const double a = std::sin(alpha * theta) / std::pow(std::sin(theta), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * theta) / w, (1.0 - alpha) / alpha);
  return a * b;
}

// Innovation rows eps_j = Phi^{-1}(U_j) for j = 0..total-1, where rows at or
// after `switch_row` use the second copula.
Matrix innovations(const CopulaSpec& first, const CopulaSpec* second, std::size_t switch_row,
                   std::size_t total, Engine& rng) {
  Matrix eps(total, first.d, 0.0);
  std::vector<double> u(first.d);
  for (std::size_t j = 0; j < total; ++j) {
    const CopulaSpec& c = (second != nullptr && j >= switch_row) ? *second : first;
    copula_draw(c, rng, u);
    for (std::size_t i = 0; i < first.d; ++i) eps(j, i) = normal_quantile(u[i]);
  }
  return eps;
}

Matrix tail_rows(const Matrix& m, std::size_t n) {
  Matrix out(n, m.cols(), 0.0);
  const std::size_t offset = m.rows() - n;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m.cols(); ++i) out(j, i) = m(offset + j, i);
  }
  return out;
}

Matrix ar1_from(const Matrix& eps, double beta) {
  Matrix x(eps.rows(), eps.cols(), 0.0);
  for (std::size_t i = 0; i < eps.cols(); ++i) x(0, i) = eps(0, i);
  for (std::size_t j = 1; j < eps.rows(); ++j) {
    for (std::size_t i = 0; i < eps.cols(); ++i) x(j, i) = beta * x(j - 1, i) + eps(j, i);
  }
  return x;
}

Matrix garch_from(const Matrix& eps, const GarchSpec& g) {
  Matrix x(eps.rows(), eps.cols(), 0.0);
  for (std::size_t i = 0; i < eps.cols(); ++i) {
    double var = g.unconditional_variance(i);
    x(0, i) = std::sqrt(var) * eps(0, i);
    for (std::size_t j = 1; j < eps.rows(); ++j) {
      const double prev = g.innovation_feedback ? eps(j - 1, i) : x(j - 1, i);
      var = g.omega[i] + g.beta[i] * var + g.alpha[i] * prev * prev;
      x(j, i) = std::sqrt(var) * eps(j, i);
    }
  }
  return x;
}

std::size_t break_row(const PathSpec& spec, std::size_t n) {
  const double lambda = spec.change->lambda;
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("break lambda must be in (0,1)");
  return static_cast<std::size_t>(std::floor(lambda * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::string_view to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Clayton: return "clayton";
    case CopulaFamily::Gumbel: return "gumbel";
  }
  return "?";
}

CopulaFamily parse_copula_family(std::string_view text) {
  if (text == "independence") return CopulaFamily::Independence;
  if (text == "clayton") return CopulaFamily::Clayton;
  if (text == "gumbel") return CopulaFamily::Gumbel;
  throw std::invalid_argument("unknown copula family '" + std::string(text) +
                              "' (expected independence|clayton|gumbel)");
}

CopulaSpec CopulaSpec::from_tau(CopulaFamily family, double tau, std::size_t d) {
  CopulaSpec spec{family, tau_to_theta(family, tau), d};
  spec.validate();
  return spec;
}

void CopulaSpec::validate() const {
  if (d < 2) throw std::invalid_argument("copula dimension must be >= 2");
  if (family == CopulaFamily::Clayton && !(theta > 0.0 && std::isfinite(theta))) {
    throw std::invalid_argument("Clayton theta must be > 0, got " + std::to_string(theta));
  }
  if (family == CopulaFamily::Gumbel && !(theta >= 1.0 && std::isfinite(theta))) {
    throw std::invalid_argument("Gumbel theta must be >= 1, got " + std::to_string(theta));
  }
}

double tau_to_theta(CopulaFamily family, double tau) {
  switch (family) {
    case CopulaFamily::Clayton:
      if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("Clayton tau must be in (0,1)");
      return 2.0 * tau / (1.0 - tau);
    case CopulaFamily::Gumbel:
      if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("Gumbel tau must be in [0,1)");
      return 1.0 / (1.0 - tau);
    case CopulaFamily::Independence:
      if (tau != 0.0) throw std::invalid_argument("independence copula has tau = 0");
      return 1.0;
  }
  return 1.0;
}

double theta_to_tau(CopulaFamily family, double theta) {
  switch (family) {
    case CopulaFamily::Clayton: return theta / (theta + 2.0);
    case CopulaFamily::Gumbel: return 1.0 - 1.0 / theta;
    case CopulaFamily::Independence: return 0.0;
  }
  return 0.0;
}

double copula_cdf(const CopulaSpec& spec, std::span<const double> u) {
  spec.validate();
  check_unit(u, spec.d);
  for (double x : u) {
    if (x == 0.0) return 0.0;
  }
  switch (spec.family) {
    case CopulaFamily::Independence: {
      double p = 1.0;
      for (double x : u) p *= x;
      return p;
    }
    case CopulaFamily::Clayton: {
      double s = 1.0 - static_cast<double>(spec.d);
      for (double x : u) s += std::pow(x, -spec.theta);
      return std::pow(s, -1.0 / spec.theta);
    }
    case CopulaFamily::Gumbel: {
      double a = 0.0;
      for (double x : u) a += std::pow(-std::log(x), spec.theta);
      return std::exp(-std::pow(a, 1.0 / spec.theta));
    }
  }
  return 0.0;
}

double copula_partial(const CopulaSpec& spec, std::span<const double> u, std::size_t i) {
  spec.validate();
  check_unit(u, spec.d);
  if (i >= spec.d) throw std::invalid_argument("copula_partial: coordinate out of range");
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (k != i && u[k] == 0.0) return 0.0;
  }
  switch (spec.family) {
    case CopulaFamily::Independence: {
      double p = 1.0;
      for (std::size_t k = 0; k < u.size(); ++k) p *= k == i ? 1.0 : u[k];
      return p;
    }
    case CopulaFamily::Clayton: {
      if (u[i] == 0.0) return 1.0;  // lower tail dependence limit
      double s = 1.0 - static_cast<double>(spec.d);
      for (double x : u) s += std::pow(x, -spec.theta);
      return std::pow(u[i], -spec.theta - 1.0) * std::pow(s, -1.0 / spec.theta - 1.0);
    }
    case CopulaFamily::Gumbel: {
      if (u[i] == 0.0) return 0.0;
      double a = 0.0;
      for (double x : u) a += std::pow(-std::log(x), spec.theta);
      if (a == 0.0) return 1.0;
      const double c = std::exp(-std::pow(a, 1.0 / spec.theta));
      const double li = -std::log(u[i]);
      if (li == 0.0) return spec.theta == 1.0 ? c / u[i] : 0.0;
      return c * std::pow(a, 1.0 / spec.theta - 1.0) * std::pow(li, spec.theta - 1.0) / u[i];
    }
  }
  return 0.0;
}

void copula_draw(const CopulaSpec& spec, Engine& rng, std::span<double> out) {
  if (out.size() != spec.d) throw std::invalid_argument("copula_draw: output size mismatch");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  switch (spec.family) {
    case CopulaFamily::Independence:
      for (double& x : out) x = unif(rng);
      return;
    case CopulaFamily::Clayton: {
      std::gamma_distribution<double> frailty(1.0 / spec.theta, 1.0);
      const double v = frailty(rng);
      for (double& x : out) x = std::pow(1.0 + expo(rng) / v, -1.0 / spec.theta);
      return;
    }
    case CopulaFamily::Gumbel: {
      const double alpha = 1.0 / spec.theta;
      const double v = alpha < 1.0 ? positive_stable(alpha, rng) : 1.0;
      for (double& x : out) x = std::exp(-std::pow(expo(rng) / v, alpha));
      return;
    }
  }
}

Matrix copula_sample(const CopulaSpec& spec, std::size_t n, Engine& rng) {
  spec.validate();
  Matrix out(n, spec.d, 0.0);
  std::vector<double> row(spec.d);
  for (std::size_t j = 0; j < n; ++j) {
    copula_draw(spec, rng, row);
    for (std::size_t i = 0; i < spec.d; ++i) out(j, i) = row[i];
  }
  return out;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("kendall_tau: need two columns of equal length >= 2");
  }
  const std::size_t n = x.size();
  long long score = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double s = (x[a] - x[b]) * (y[a] - y[b]);
      score += s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    }
  }
  return 2.0 * static_cast<double>(score) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double normal_quantile(double p) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return boost::math::quantile(boost::math::normal_distribution<double>(), std::clamp(p, lo, hi));
}

std::string_view to_string(SerialKind kind) {
  switch (kind) {
    case SerialKind::IID: return "iid";
    case SerialKind::AR1: return "ar1";
    case SerialKind::GARCH11: return "garch";
  }
  return "?";
}

SerialKind parse_serial_kind(std::string_view text) {
  if (text == "iid") return SerialKind::IID;
  if (text == "ar1") return SerialKind::AR1;
  if (text == "garch") return SerialKind::GARCH11;
  throw std::invalid_argument("unknown serial kind '" + std::string(text) +
                              "' (expected iid|ar1|garch)");
}

GarchSpec GarchSpec::reference_default() {
  return GarchSpec{{0.012, 0.037}, {0.072, 0.115}, {0.919, 0.868}, false};
}

void GarchSpec::validate(std::size_t d) const {
  if (omega.size() != d || alpha.size() != d || beta.size() != d) {
    throw std::invalid_argument("GARCH parameters must have one entry per margin (d = " +
                                std::to_string(d) + ")");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(omega[i] > 0.0)) {
      throw std::invalid_argument("GARCH omega[" + std::to_string(i) + "] must be > 0");
    }
    if (!(alpha[i] >= 0.0 && beta[i] >= 0.0)) {
      throw std::invalid_argument("GARCH alpha/beta[" + std::to_string(i) + "] must be >= 0");
    }
    if (!(alpha[i] + beta[i] < 1.0)) {
      throw std::invalid_argument("GARCH alpha[" + std::to_string(i) + "] + beta[" +
                                  std::to_string(i) + "] must be < 1 for stationarity");
    }
  }
}

double GarchSpec::unconditional_variance(std::size_t i) const {
  return omega[i] / (1.0 - alpha[i] - beta[i]);
}

void SerialSpec::validate(std::size_t d) const {
  if (kind == SerialKind::AR1 && !(std::abs(ar_beta) < 1.0)) {
    throw std::invalid_argument("AR(1) requires |beta| < 1, got " + std::to_string(ar_beta));
  }
  if (kind == SerialKind::GARCH11) garch.validate(d);
}

TimeSeriesSample ar1_path(const CopulaSpec& copula, double beta, std::size_t n,
                          std::size_t burn_in, Engine& rng) {
  PathSpec spec{copula, SerialSpec{SerialKind::AR1, beta, GarchSpec::reference_default(), burn_in},
                std::nullopt};
  return simulate_path(spec, n, rng);
}

TimeSeriesSample garch11_path(const CopulaSpec& copula, const GarchSpec& garch, std::size_t n,
                              std::size_t burn_in, Engine& rng) {
  PathSpec spec{copula, SerialSpec{SerialKind::GARCH11, 0.0, garch, burn_in}, std::nullopt};
  return simulate_path(spec, n, rng);
}

TimeSeriesSample simulate_path(const PathSpec& spec, std::size_t n, Engine& rng) {
  spec.copula.validate();
  spec.serial.validate(spec.copula.d);
  if (n < 2) throw std::invalid_argument("path length must be >= 2");
  const CopulaSpec* second = nullptr;
  std::size_t switch_sample_row = n;
  if (spec.change) {
    spec.change->after.validate();
    if (spec.change->after.d != spec.copula.d) {
      throw std::invalid_argument("break copula dimension differs from the base copula");
    }
    second = &spec.change->after;
    switch_sample_row = break_row(spec, n);
  }
  // Rows M..n with M = -burn_in; the first burn_in + 1 rows are discarded.
  const std::size_t lead = spec.serial.kind == SerialKind::IID ? 0 : spec.serial.burn_in + 1;
  const Matrix eps = innovations(spec.copula, second, lead + switch_sample_row, lead + n, rng);
  switch (spec.serial.kind) {
    case SerialKind::IID: return TimeSeriesSample(eps);
    case SerialKind::AR1: return TimeSeriesSample(tail_rows(ar1_from(eps, spec.serial.ar_beta), n));
    case SerialKind::GARCH11:
      return TimeSeriesSample(tail_rows(garch_from(eps, spec.serial.garch), n));
  }
  throw std::logic_error("unreachable serial kind");
}

}  // namespace tbm

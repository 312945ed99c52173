#pragma once

// Archimedean copula samplers and serially dependent paths with copula
// innovations (i.i.d., AR(1), componentwise GARCH(1,1)).

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tbm/matrix.hpp"
#include "tbm/rng.hpp"
#include "tbm/sample.hpp"

namespace tbm {

enum class CopulaFamily { Independence, Clayton, Gumbel };

std::string_view to_string(CopulaFamily family);
CopulaFamily parse_copula_family(std::string_view text);

struct CopulaSpec {
  CopulaFamily family = CopulaFamily::Independence;
  double theta = 1.0;  // ignored for Independence
  std::size_t d = 2;

  static CopulaSpec from_tau(CopulaFamily family, double tau, std::size_t d = 2);
  // Clayton theta > 0, Gumbel theta >= 1, d >= 2.
  void validate() const;
  bool operator==(const CopulaSpec&) const = default;
};

// Clayton 2 tau / (1 - tau) for tau in (0,1); Gumbel 1 / (1 - tau) for tau in [0,1);
// Independence requires tau = 0.
double tau_to_theta(CopulaFamily family, double tau);
double theta_to_tau(CopulaFamily family, double theta);

double copula_cdf(const CopulaSpec& spec, std::span<const double> u);
// Analytic dC/du_i.
double copula_partial(const CopulaSpec& spec, std::span<const double> u, std::size_t i);

// One draw with the requested copula (frailty construction).
void copula_draw(const CopulaSpec& spec, Engine& rng, std::span<double> out);
// n x d matrix of i.i.d. draws.
Matrix copula_sample(const CopulaSpec& spec, std::size_t n, Engine& rng);

// Sample Kendall tau (tau-a) of two equally long columns; O(n^2).
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Standard normal quantile, argument clamped into the open unit interval.
double normal_quantile(double p);

enum class SerialKind { IID, AR1, GARCH11 };

std::string_view to_string(SerialKind kind);
SerialKind parse_serial_kind(std::string_view text);

struct GarchSpec {
  std::vector<double> omega;
  std::vector<double> alpha;
  std::vector<double> beta;
  // Feed back eps_{j-1}^2 instead of X_{j-1}^2 in the variance recursion.
  bool innovation_feedback = false;

  // omega = (0.012, 0.037), beta = (0.919, 0.868), alpha = (0.072, 0.115).
  static GarchSpec reference_default();
  // Sizes equal d, omega > 0, alpha, beta >= 0, alpha + beta < 1.
  void validate(std::size_t d) const;
  double unconditional_variance(std::size_t i) const;
};

struct SerialSpec {
  SerialKind kind = SerialKind::IID;
  double ar_beta = 0.0;
  GarchSpec garch = GarchSpec::reference_default();
  std::size_t burn_in = 100;

  void validate(std::size_t d) const;
};

// Innovation copula switches to `after` for sample rows t >= floor(lambda n).
struct BreakSpec {
  double lambda = 0.5;
  CopulaSpec after;
};

struct PathSpec {
  CopulaSpec copula;
  SerialSpec serial;
  std::optional<BreakSpec> change;
};

// X_M = eps_M, X_j = beta X_{j-1} + eps_j for j = M+1..n with M = -burn_in;
// eps_j = Phi^{-1}(U_j). The last n values are returned.
TimeSeriesSample ar1_path(const CopulaSpec& copula, double beta, std::size_t n,
                          std::size_t burn_in, Engine& rng);

// sigma_M^2 = omega / (1 - alpha - beta), X_j = sigma_j eps_j,
// sigma_j^2 = omega + beta sigma_{j-1}^2 + alpha X_{j-1}^2, componentwise.
TimeSeriesSample garch11_path(const CopulaSpec& copula, const GarchSpec& garch, std::size_t n,
                              std::size_t burn_in, Engine& rng);

TimeSeriesSample simulate_path(const PathSpec& spec, std::size_t n, Engine& rng);

}  // namespace tbm

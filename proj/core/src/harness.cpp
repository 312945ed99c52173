#include "tbm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "tbm/csv.hpp"
#include "tbm/empirical_copula.hpp"
#include "tbm/parallel.hpp"
#include "tbm/process.hpp"
#include "tbm/unspecified_test.hpp"

namespace tbm {
namespace {

using json = nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(where + "." + key + ": " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback,
                      const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw std::invalid_argument(where + "." + key + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

// Integer or "auto" (encoded as 0).
std::size_t get_block(const json& j, const std::string& where) {
  if (!j.contains("block_length")) return 0;
  const json& v = j.at("block_length");
  if (v.is_string() && v.get<std::string>() == "auto") return 0;
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > kMaxBlockLength) {
    throw std::invalid_argument(where + ".block_length: expected \"auto\" or an integer in [1, " +
                                std::to_string(kMaxBlockLength) + "]");
  }
  return v.get<std::size_t>();
}

std::string format_setting(const char* name, double v) {
  std::ostringstream ss;
  ss << name << "=" << v;
  return ss.str();
}

MethodSpec parse_method(const json& j, std::size_t index) {
  const std::string where = "methods[" + std::to_string(index) + "]";
  check_keys(j, {"label", "kind", "kernel", "block_length", "base", "mode"}, where);
  MethodSpec m;
  const std::string kind = get_or<std::string>(j, "kind", "multiplier", where);
  if (kind == "multiplier") {
    m.kind = MethodKind::Multiplier;
    KernelSpec kernel{parse_kernel_kind(get_or<std::string>(j, "kernel", "triangular", where)),
                      static_cast<int>(get_block(j, where))};
    const auto base = parse_base_distribution(get_or<std::string>(j, "base", "normal", where));
    m.multipliers = MultiplierConfig::with_base(kernel, base);
    if (j.contains("mode")) {
      m.multipliers.mode = parse_centering_mode(get_or<std::string>(j, "mode", "", where));
    }
  } else if (kind == "block_bootstrap") {
    if (j.contains("kernel") || j.contains("base") || j.contains("mode")) {
      throw std::invalid_argument(where + ": kernel/base/mode apply to multiplier methods only");
    }
    m.kind = MethodKind::BlockBootstrap;
    m.bootstrap_block = get_block(j, where);
  } else {
    throw std::invalid_argument(where + ".kind: expected multiplier|block_bootstrap, got '" +
                                kind + "'");
  }
  m.label = get_or<std::string>(j, "label", kind, where);
  return m;
}

CopulaSpec parse_copula(const json& j, const std::string& where, CopulaFamily family,
                        std::size_t d) {
  if (j.contains("tau") && j.contains("theta")) {
    throw std::invalid_argument(where + ": give either tau or theta, not both");
  }
  CopulaSpec spec{family, 1.0, d};
  try {
    if (j.contains("theta")) {
      spec.theta = get_or<double>(j, "theta", 1.0, where);
    } else if (family != CopulaFamily::Independence) {
      spec.theta = tau_to_theta(family, get_or<double>(j, "tau", 0.0, where));
    }
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
  return spec;
}

std::vector<Scenario> parse_scenario(const json& j, std::size_t index, double lambda) {
  const std::string where = "scenarios[" + std::to_string(index) + "]";
  check_keys(j, {"label", "family", "tau", "theta", "d", "serial", "beta", "garch", "burn_in",
                 "n", "tau2"},
             where);
  const auto family = parse_copula_family(get_or<std::string>(j, "family", "clayton", where));
  const std::size_t d = get_count(j, "d", 2, where);
  Scenario base;
  base.path.copula = parse_copula(j, where, family, d);
  base.n = get_count(j, "n", 0, where);
  SerialSpec& serial = base.path.serial;
  serial.kind = parse_serial_kind(get_or<std::string>(j, "serial", "iid", where));
  serial.burn_in = get_count(j, "burn_in", 100, where);
  if (j.contains("beta") && serial.kind != SerialKind::AR1) {
    throw std::invalid_argument(where + ".beta: only valid with serial = ar1");
  }
  if (j.contains("garch") && serial.kind != SerialKind::GARCH11) {
    throw std::invalid_argument(where + ".garch: only valid with serial = garch");
  }
  serial.ar_beta = get_or<double>(j, "beta", 0.0, where);
  if (j.contains("garch")) {
    const json& g = j.at("garch");
    check_keys(g, {"omega", "alpha", "beta", "innovation_feedback"}, where + ".garch");
    serial.garch.omega = get_or<std::vector<double>>(g, "omega", serial.garch.omega, where);
    serial.garch.alpha = get_or<std::vector<double>>(g, "alpha", serial.garch.alpha, where);
    serial.garch.beta = get_or<std::vector<double>>(g, "beta", serial.garch.beta, where);
    serial.garch.innovation_feedback = get_or<bool>(g, "innovation_feedback", false, where);
  }
  try {
    serial.validate(d);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
  base.label = get_or<std::string>(
      j, "label",
      std::string(to_string(serial.kind)) + " " + std::string(to_string(family)), where);
  if (!j.contains("tau2")) return {base};

  std::vector<double> taus;
  const json& t2 = j.at("tau2");
  if (t2.is_number()) {
    taus.push_back(t2.get<double>());
  } else {
    taus = get_or<std::vector<double>>(j, "tau2", {}, where);
  }
  if (taus.empty()) throw std::invalid_argument(where + ".tau2: empty list");
  std::vector<Scenario> out;
  for (double tau2 : taus) {
    Scenario s = base;
    s.setting = format_setting("tau2", tau2);
    try {
      s.path.change = BreakSpec{lambda, CopulaSpec::from_tau(family, tau2, d)};
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + ".tau2: " + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t scenario_n(const StudyConfig& config, const Scenario& s) {
  return s.n != 0 ? s.n : config.n;
}

MultiplierConfig resolved(const MethodSpec& m, std::size_t n) {
  MultiplierConfig c = m.multipliers;
  if (c.kernel.block_length == 0) c.kernel.block_length = default_multiplier_block_length(n);
  return c;
}

std::size_t resolved_bootstrap(const MethodSpec& m, std::size_t n) {
  return m.bootstrap_block != 0 ? m.bootstrap_block
                                : static_cast<std::size_t>(default_bootstrap_block_length(n));
}

TimeSeriesSample run_data(const StudyConfig& config, std::size_t c, std::size_t r) {
  const Scenario& s = config.scenarios[c];
  Engine rng = make_engine(config.seed, {c, r, 0});
  return simulate_path(s.path, scenario_n(config, s), rng);
}

std::uint64_t method_seed(const StudyConfig& config, std::size_t c, std::size_t r,
                          std::size_t m) {
  return derive_seed(config.seed, {c, r, m + 1});
}

bool has_closed_form(const Scenario& s) {
  return s.path.serial.kind == SerialKind::IID && !s.path.change;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Group key preserving first-seen order.
struct Groups {
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> keys;
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<double>>
      values;

  void add(const std::string& a, const std::string& b, const std::string& c, const std::string& d,
           double v) {
    auto key = std::make_tuple(a, b, c, d);
    auto it = values.find(key);
    if (it == values.end()) {
      keys.push_back(key);
      it = values.emplace(key, std::vector<double>{}).first;
    }
    it->second.push_back(v);
  }
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::Covariance: return "covariance";
    case StudyKind::Specified: return "specified";
    case StudyKind::Unspecified: return "unspecified";
  }
  return "?";
}

StudyKind parse_study_kind(std::string_view text) {
  if (text == "covariance") return StudyKind::Covariance;
  if (text == "specified") return StudyKind::Specified;
  if (text == "unspecified") return StudyKind::Unspecified;
  throw std::invalid_argument("unknown study '" + std::string(text) +
                              "' (expected covariance|specified|unspecified)");
}

void StudyConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("R must be >= 1");
  if (replicates < 1) throw std::invalid_argument("S must be >= 1");
  if (kind == StudyKind::Covariance && replicates < 2) {
    throw std::invalid_argument("S must be >= 2 for covariance estimation");
  }
  if (scenarios.empty()) throw std::invalid_argument("scenarios: empty");
  if (methods.empty()) throw std::invalid_argument("methods: empty");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0,1)");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
  if (quadrature.nodes_per_dim < 1) throw std::invalid_argument("quadrature_nodes must be >= 1");
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const auto& method = methods[m];
    const std::string where = "methods[" + std::to_string(m) + "] (" + method.label + ")";
    for (std::size_t k = 0; k < m; ++k) {
      if (methods[k].label == method.label) {
        throw std::invalid_argument(where + ": duplicate label");
      }
    }
    if (method.kind == MethodKind::BlockBootstrap && kind != StudyKind::Covariance) {
      throw std::invalid_argument(where + ": block bootstrap is only available in covariance studies");
    }
    if (method.kind == MethodKind::Multiplier) {
      MultiplierConfig probe = method.multipliers;
      if (probe.kernel.block_length == 0) probe.kernel.block_length = 1;
      try {
        probe.validate();
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ": " + e.what());
      }
    }
  }
  for (std::size_t c = 0; c < scenarios.size(); ++c) {
    const auto& s = scenarios[c];
    const std::string where = "scenarios[" + std::to_string(c) + "] (" + s.label + ")";
    const std::size_t n_s = scenario_n(*this, s);
    try {
      s.path.copula.validate();
      s.path.serial.validate(s.path.copula.d);
      if (s.path.change) s.path.change->after.validate();
      if (n_s < 2) throw std::invalid_argument("n must be >= 2");
      if (kind == StudyKind::Specified) split_index(n_s, lambda);
      if (kind == StudyKind::Unspecified && n_s < 3) throw std::invalid_argument("n must be >= 3");
      for (const auto& m : methods) {
        if (m.kind == MethodKind::BlockBootstrap && resolved_bootstrap(m, n_s) > n_s) {
          throw std::invalid_argument("bootstrap block length exceeds n");
        }
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
    if (kind == StudyKind::Covariance && points.empty()) {
      throw std::invalid_argument("points: empty");
    }
    for (const auto& p : points) {
      if (p.size() != s.path.copula.d) {
        throw std::invalid_argument(where + ": evaluation point dimension mismatch");
      }
    }
  }
  if (reference) {
    if (reference->reps < 2) throw std::invalid_argument("reference.reps must be >= 2");
    if (reference->inner_n < 2) throw std::invalid_argument("reference.n_inner must be >= 2");
    if (reference->inner_n * 100 > reference->big_n) {
      throw std::invalid_argument("reference: n_inner must be <= N / 100");
    }
    const double cost = static_cast<double>(reference->reps) * static_cast<double>(reference->big_n);
    if (cost > reference->budget) {
      throw std::invalid_argument("reference: reps * N = " + format_double(cost) +
                                  " exceeds budget " + format_double(reference->budget));
    }
  }
}

double StudyResult::value(const std::string& scenario, const std::string& method,
                          const std::string& setting, const std::string& metric) const {
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.method == method && r.setting == setting && r.metric == metric) {
      return r.value;
    }
  }
  throw std::out_of_range("no aggregate row " + scenario + " / " + method + " / " + setting +
                          " / " + metric);
}

StudyConfig parse_study_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"study", "description", "n", "S", "R", "seed", "threads", "level", "lambda",
                 "quadrature_nodes", "points", "reference", "methods", "scenarios"},
             "config");
  StudyConfig config;
  config.source_json = j.dump();
  config.kind = parse_study_kind(get_or<std::string>(j, "study", "", "config"));
  config.n = get_count(j, "n", config.n, "config");
  config.replicates = get_count(j, "S", config.replicates, "config");
  config.runs = get_count(j, "R", config.runs, "config");
  config.seed = get_or<std::uint64_t>(j, "seed", config.seed, "config");
  config.threads = get_count(j, "threads", config.threads, "config");
  config.level = get_or<double>(j, "level", config.level, "config");
  config.lambda = get_or<double>(j, "lambda", config.lambda, "config");
  config.quadrature.nodes_per_dim =
      get_count(j, "quadrature_nodes", config.quadrature.nodes_per_dim, "config");
  if (j.contains("points")) {
    for (const auto& p : get_or<std::vector<std::vector<double>>>(j, "points", {}, "config")) {
      try {
        config.points.emplace_back(p);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config.points: ") + e.what());
      }
    }
  } else {
    config.points = default_covariance_points();
  }
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    check_keys(r, {"N", "n_inner", "reps", "budget"}, "config.reference");
    ReferenceSpec spec;
    spec.big_n = get_count(r, "N", spec.big_n, "config.reference");
    spec.inner_n = get_count(r, "n_inner", spec.inner_n, "config.reference");
    spec.reps = get_count(r, "reps", spec.reps, "config.reference");
    spec.budget = get_or<double>(r, "budget", spec.budget, "config.reference");
    config.reference = spec;
  }
  if (!j.contains("methods") || !j.at("methods").is_array()) {
    throw std::invalid_argument("config.methods: expected an array");
  }
  for (std::size_t m = 0; m < j.at("methods").size(); ++m) {
    config.methods.push_back(parse_method(j.at("methods")[m], m));
  }
  if (!j.contains("scenarios") || !j.at("scenarios").is_array()) {
    throw std::invalid_argument("config.scenarios: expected an array");
  }
  for (std::size_t c = 0; c < j.at("scenarios").size(); ++c) {
    for (auto& s : parse_scenario(j.at("scenarios")[c], c, config.lambda)) {
      config.scenarios.push_back(std::move(s));
    }
  }
  config.validate();
  return config;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str());
}

std::vector<EvaluationPoint> default_covariance_points() {
  const double a = 1.0 / 3.0;
  const double b = 2.0 / 3.0;
  return {EvaluationPoint({a, a}), EvaluationPoint({a, b}), EvaluationPoint({b, a}),
          EvaluationPoint({b, b})};
}

std::string point_label(const EvaluationPoint& u) {
  std::ostringstream ss;
  ss.precision(4);
  ss << "(";
  for (std::size_t i = 0; i < u.size(); ++i) ss << (i ? "," : "") << u[i];
  ss << ")";
  return ss.str();
}

double iid_limit_covariance(const CopulaSpec& copula, const EvaluationPoint& u,
                            const EvaluationPoint& v) {
  const std::size_t d = copula.d;
  if (u.size() != d || v.size() != d) {
    throw std::invalid_argument("iid_limit_covariance: point dimension mismatch");
  }
  // Terms a_0 = u, a_i = u^(i) with weights 1 and -D_iC(u).
  auto expand = [&](const EvaluationPoint& p) {
    std::vector<std::pair<double, std::vector<double>>> terms;
    terms.emplace_back(1.0, std::vector<double>(p.coords().begin(), p.coords().end()));
    for (std::size_t i = 0; i < d; ++i) {
      const auto pi = p.only_coordinate(i);
      terms.emplace_back(-copula_partial(copula, p.coords(), i),
                         std::vector<double>(pi.coords().begin(), pi.coords().end()));
    }
    return terms;
  };
  const auto tu = expand(u);
  const auto tv = expand(v);
  double total = 0.0;
  std::vector<double> meet(d);
  for (const auto& [wa, a] : tu) {
    for (const auto& [wb, b] : tv) {
      for (std::size_t i = 0; i < d; ++i) meet[i] = std::min(a[i], b[i]);
      total += wa * wb * (copula_cdf(copula, meet) - copula_cdf(copula, a) * copula_cdf(copula, b));
    }
  }
  return total;
}

double iid_limit_variance(const CopulaSpec& copula, const EvaluationPoint& u) {
  return iid_limit_covariance(copula, u, u);
}

std::vector<double> reference_covariance(const PathSpec& path, const ReferenceSpec& spec,
                                         const std::vector<EvaluationPoint>& points,
                                         std::uint64_t seed, std::size_t threads) {
  if (points.empty()) throw std::invalid_argument("reference_covariance: no points");
  if (spec.reps < 2) throw std::invalid_argument("reference_covariance: reps must be >= 2");
  if (spec.inner_n * 100 > spec.big_n) {
    throw std::invalid_argument("reference_covariance: n_inner must be <= N / 100");
  }
  const double cost = static_cast<double>(spec.reps) * static_cast<double>(spec.big_n);
  if (cost > spec.budget) {
    throw std::invalid_argument("reference_covariance: reps * N = " + format_double(cost) +
                                " exceeds budget " + format_double(spec.budget));
  }
  const std::size_t np = points.size();
  std::vector<double> big(np);
  {
    Engine rng = make_engine(seed, {0});
    const auto pseudo = pseudo_observations(simulate_path(path, spec.big_n, rng));
    for (std::size_t p = 0; p < np; ++p) big[p] = empirical_copula_at(pseudo, points[p]);
  }
  std::vector<ProcessReplicate> reps(spec.reps);
  const double root = std::sqrt(static_cast<double>(spec.inner_n));
  parallel_for(spec.reps, threads, [&](std::size_t r) {
    Engine rng = make_engine(seed, {1, r});
    const auto pseudo = pseudo_observations(simulate_path(path, spec.inner_n, rng));
    reps[r].kind = ProcessKind::BlockBootstrap;
    reps[r].values.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
      reps[r].values[p] = root * (empirical_copula_at(pseudo, points[p]) - big[p]);
    }
  });
  const Matrix cov = covariance_estimate(reps);
  std::vector<double> diag(np);
  for (std::size_t p = 0; p < np; ++p) diag[p] = cov(p, p);
  return diag;
}

StudyResult covariance_benchmark(const StudyConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  StudyResult result;
  result.config = config;
  const std::size_t np = config.points.size();
  const PointSet points(config.points);
  std::vector<std::string> labels;
  for (const auto& p : config.points) labels.push_back(point_label(p));

  for (std::size_t c = 0; c < config.scenarios.size(); ++c) {
    const Scenario& s = config.scenarios[c];
    if (has_closed_form(s)) {
      for (std::size_t p = 0; p < np; ++p) {
        result.records.push_back({s.label, labels[p], "True", -1, "target",
                                  iid_limit_variance(s.path.copula, config.points[p])});
      }
    }
    if (config.reference) {
      const auto approx = reference_covariance(s.path, *config.reference, config.points,
                                               derive_seed(config.seed, {c, ~0ULL}),
                                               config.threads);
      for (std::size_t p = 0; p < np; ++p) {
        result.records.push_back({s.label, labels[p], "Approx.", -1, "target", approx[p]});
      }
    }
    const std::size_t n = scenario_n(config, s);
    const std::size_t nm = config.methods.size();
    // estimates[r][m * np + p]
    std::vector<std::vector<double>> estimates(config.runs);
    parallel_for(config.runs, config.threads, [&](std::size_t r) {
      const TimeSeriesSample sample = run_data(config, c, r);
      const PseudoObservations pseudo = pseudo_observations(sample);
      estimates[r].assign(nm * np, 0.0);
      for (std::size_t m = 0; m < nm; ++m) {
        const MethodSpec& method = config.methods[m];
        std::vector<ProcessReplicate> reps(config.replicates);
        if (method.kind == MethodKind::Multiplier) {
          const MultiplierConfig mc = resolved(method, n);
          const MultiplierProcessEvaluator evaluator(pseudo, points);
          for (std::size_t b = 0; b < config.replicates; ++b) {
            Engine rng = make_engine(method_seed(config, c, r, m), {b});
            reps[b] = evaluator.evaluate_G(generate_multipliers(mc, n, rng));
          }
        } else {
          const std::size_t lb = resolved_bootstrap(method, n);
          const BlockBootstrapEvaluator evaluator(sample, points);
          for (std::size_t b = 0; b < config.replicates; ++b) {
            Engine rng = make_engine(method_seed(config, c, r, m), {b});
            reps[b] = evaluator.draw(lb, rng);
          }
        }
        const Matrix cov = covariance_estimate(reps);
        for (std::size_t p = 0; p < np; ++p) estimates[r][m * np + p] = cov(p, p);
      }
    });
    for (std::size_t m = 0; m < nm; ++m) {
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t r = 0; r < config.runs; ++r) {
          result.records.push_back({s.label, labels[p], config.methods[m].label,
                                    static_cast<long>(r), "estimate", estimates[r][m * np + p]});
        }
      }
    }
  }
  result.rows = aggregate(StudyKind::Covariance, result.records, config.level);
  result.seconds = elapsed_since(start);
  return result;
}

StudyResult size_power_specified(const StudyConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  StudyResult result;
  result.config = config;
  for (std::size_t c = 0; c < config.scenarios.size(); ++c) {
    const Scenario& s = config.scenarios[c];
    const std::size_t n = scenario_n(config, s);
    const std::size_t nm = config.methods.size();
    std::vector<std::vector<double>> stats(config.runs), pvals(config.runs);
    parallel_for(config.runs, config.threads, [&](std::size_t r) {
      SpecifiedTestInput input{run_data(config, c, r), config.lambda, {}, config.replicates,
                               config.quadrature, std::nullopt, false};
      stats[r].resize(nm);
      pvals[r].resize(nm);
      for (std::size_t m = 0; m < nm; ++m) {
        input.multipliers = resolved(config.methods[m], n);
        const TestResult t = test_specified(input, method_seed(config, c, r, m));
        stats[r][m] = t.outcomes.front().statistic;
        pvals[r][m] = t.outcomes.front().p_value;
      }
    });
    for (std::size_t m = 0; m < nm; ++m) {
      const std::string& label = config.methods[m].label;
      for (std::size_t r = 0; r < config.runs; ++r) {
        const long run = static_cast<long>(r);
        result.records.push_back({s.label, s.setting, label, run, "statistic", stats[r][m]});
        result.records.push_back({s.label, s.setting, label, run, "p_value", pvals[r][m]});
      }
    }
  }
  result.rows = aggregate(StudyKind::Specified, result.records, config.level);
  result.seconds = elapsed_since(start);
  return result;
}

StudyResult size_power_unspecified(const StudyConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  StudyResult result;
  result.config = config;
  for (std::size_t c = 0; c < config.scenarios.size(); ++c) {
    const Scenario& s = config.scenarios[c];
    const std::size_t n = scenario_n(config, s);
    const std::size_t nm = config.methods.size();
    if (s.path.change) {
      const double k = std::floor(s.path.change->lambda * static_cast<double>(n) + 1e-9);
      result.records.push_back(
          {s.label, s.setting, "truth", -1, "break_lambda", k / static_cast<double>(n)});
    }
    // outcome[r][m][f] = (p-value, location)
    std::vector<std::vector<std::array<std::pair<double, double>, 3>>> outcome(config.runs);
    parallel_for(config.runs, config.threads, [&](std::size_t r) {
      const TimeSeriesSample sample = run_data(config, c, r);
      outcome[r].resize(nm);
      for (std::size_t m = 0; m < nm; ++m) {
        const UnspecifiedTestConfig tc{resolved(config.methods[m], n), config.replicates};
        const TestResult t = test_unspecified(sample, tc, method_seed(config, c, r, m));
        for (std::size_t f = 0; f < 3; ++f) {
          outcome[r][m][f] = {t.outcomes[f].p_value, t.outcomes[f].location.value_or(0.0)};
        }
      }
    });
    for (std::size_t m = 0; m < nm; ++m) {
      for (Functional f : kAllFunctionals) {
        const std::string prefix = std::string(to_string(f)) + "_";
        const auto fi = static_cast<std::size_t>(f);
        for (std::size_t r = 0; r < config.runs; ++r) {
          const long run = static_cast<long>(r);
          const auto& [p, loc] = outcome[r][m][fi];
          result.records.push_back({s.label, s.setting, config.methods[m].label, run,
                                    prefix + "p_value", p});
          result.records.push_back({s.label, s.setting, config.methods[m].label, run,
                                    prefix + "location", loc});
        }
      }
    }
  }
  result.rows = aggregate(StudyKind::Unspecified, result.records, config.level);
  result.seconds = elapsed_since(start);
  return result;
}

StudyResult run_study(const StudyConfig& config) {
  switch (config.kind) {
    case StudyKind::Covariance: return covariance_benchmark(config);
    case StudyKind::Specified: return size_power_specified(config);
    case StudyKind::Unspecified: return size_power_unspecified(config);
  }
  throw std::logic_error("unreachable study kind");
}

std::vector<AggregateRow> aggregate(StudyKind kind, const std::vector<RunRecord>& records,
                                    double level) {
  std::vector<AggregateRow> rows;
  if (kind == StudyKind::Covariance) {
    std::map<std::pair<std::string, std::string>, double> truth, approx;
    Groups groups;
    for (const auto& rec : records) {
      if (rec.quantity == "target" && rec.method == "True") truth[{rec.scenario, rec.setting}] = rec.value;
      if (rec.quantity == "target" && rec.method == "Approx.") approx[{rec.scenario, rec.setting}] = rec.value;
      if (rec.quantity == "target") rows.push_back({rec.scenario, rec.method, rec.setting, "mean", rec.value});
      if (rec.quantity == "estimate") groups.add(rec.scenario, rec.method, rec.setting, "", rec.value);
    }
    for (const auto& key : groups.keys) {
      const auto& [scenario, method, setting, unused] = key;
      const auto& v = groups.values.at(key);
      const double mean = mean_of(v);
      rows.push_back({scenario, method, setting, "mean", mean});
      const auto t = truth.find({scenario, setting});
      const auto a = approx.find({scenario, setting});
      const double* target = t != truth.end() ? &t->second : (a != approx.end() ? &a->second : nullptr);
      if (target != nullptr) {
        double mse = 0.0;
        for (double x : v) mse += (x - *target) * (x - *target);
        rows.push_back({scenario, method, setting, "mse_x1e4", 1e4 * mse / static_cast<double>(v.size())});
      }
    }
    return rows;
  }

  std::map<std::pair<std::string, std::string>, double> breaks;
  Groups groups;
  for (const auto& rec : records) {
    if (rec.quantity == "break_lambda") breaks[{rec.scenario, rec.setting}] = rec.value;
    if (ends_with(rec.quantity, "p_value") || ends_with(rec.quantity, "location")) {
      groups.add(rec.scenario, rec.method, rec.setting, rec.quantity, rec.value);
    }
  }
  for (const auto& key : groups.keys) {
    const auto& [scenario, method, setting, quantity] = key;
    const auto& v = groups.values.at(key);
    if (ends_with(quantity, "p_value")) {
      const std::string prefix = quantity.substr(0, quantity.size() - 7);
      std::size_t rejected = 0;
      for (double p : v) rejected += p < level ? 1 : 0;
      rows.push_back({scenario, method, setting, prefix + "rejection_rate",
                      static_cast<double>(rejected) / static_cast<double>(v.size())});
    } else {
      const std::string prefix = quantity.substr(0, quantity.size() - 8);
      const double mean = mean_of(v);
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
      rows.push_back({scenario, method, setting, prefix + "lambda_mean", mean});
      rows.push_back({scenario, method, setting, prefix + "lambda_sd", sd});
      const auto b = breaks.find({scenario, setting});
      if (b != breaks.end()) {
        double mse = 0.0;
        for (double x : v) mse += (x - b->second) * (x - b->second);
        rows.push_back({scenario, method, setting, prefix + "lambda_mse_x1e2",
                        1e2 * mse / static_cast<double>(v.size())});
      }
    }
  }
  return rows;
}

void write_study_outputs(const StudyResult& result, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream out(directory / "table.csv");
    out << "scenario,method,setting,metric,value\n";
    for (const auto& r : result.rows) {
      out << csv_field(r.scenario) << ',' << csv_field(r.method) << ',' << csv_field(r.setting)
          << ',' << csv_field(r.metric) << ',' << format_double(r.value) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + (directory / "table.csv").string());
  }
  {
    std::ofstream out(directory / "records.csv");
    out << "scenario,setting,method,run,quantity,value\n";
    for (const auto& r : result.records) {
      out << csv_field(r.scenario) << ',' << csv_field(r.setting) << ',' << csv_field(r.method)
          << ',' << r.run << ',' << csv_field(r.quantity) << ',' << format_double(r.value) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + (directory / "records.csv").string());
  }
  nlohmann::ordered_json manifest;
  manifest["study"] = std::string(to_string(result.config.kind));
  manifest["seed"] = result.config.seed;
  manifest["threads"] = result.config.threads;
  manifest["seconds"] = result.seconds;
  manifest["records"] = result.records.size();
  manifest["rows"] = result.rows.size();
  manifest["config"] = result.config.source_json.empty()
                           ? nlohmann::ordered_json()
                           : nlohmann::ordered_json::parse(result.config.source_json);
  std::ofstream out(directory / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + (directory / "manifest.json").string());
}

std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<RunRecord> records;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(number) +
                               ": expected 6 fields");
    }
    try {
      records.push_back({f[0], f[1], f[2], std::stol(f[3]), f[4], std::stod(f[5])});
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(number) +
                               ": malformed run or value");
    }
  }
  return records;
}

}  // namespace tbm

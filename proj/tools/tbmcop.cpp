// tbmcop: simulate paths, run the constant-copula tests, estimate process
// covariances and run Monte Carlo studies.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tbm/csv.hpp"
#include "tbm/empirical_copula.hpp"
#include "tbm/harness.hpp"
#include "tbm/multipliers.hpp"
#include "tbm/process.hpp"
#include "tbm/simulate.hpp"
#include "tbm/specified_test.hpp"
#include "tbm/unspecified_test.hpp"

namespace {

using json = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out;
  std::string config;
};

struct MultiplierFlags {
  std::string kernel = "triangular";
  std::string block_length = "auto";
  std::string base = "normal";
  std::string mode;

  void add(CLI::App* app) {
    app->add_option("--kernel", kernel, "Multiplier kernel: uniform|triangular")
        ->check(CLI::IsMember({"uniform", "triangular"}))
        ->capture_default_str();
    app->add_option("--block-length", block_length,
                    "Multiplier block length l in [1, 1000], or auto for floor(1.1 n^(1/4))")
        ->capture_default_str();
    app->add_option("--base", base, "Base distribution: gamma|normal|rademacher")
        ->check(CLI::IsMember({"gamma", "normal", "rademacher"}))
        ->capture_default_str();
    app->add_option("--mode", mode,
                    "Centering: raw (gamma) | centered (normal, rademacher); default from --base")
        ->check(CLI::IsMember({"raw", "centered"}));
  }

  tbm::MultiplierConfig resolve(std::size_t n) const {
    int l = 0;
    if (block_length == "auto") {
      l = tbm::default_multiplier_block_length(n);
    } else {
      try {
        l = std::stoi(block_length);
      } catch (const std::exception&) {
        throw std::invalid_argument("--block-length: expected an integer or auto, got '" +
                                    block_length + "'");
      }
    }
    auto config = tbm::MultiplierConfig::with_base({tbm::parse_kernel_kind(kernel), l},
                                                   tbm::parse_base_distribution(base));
    if (!mode.empty()) config.mode = tbm::parse_centering_mode(mode);
    config.validate();
    return config;
  }

  json echo(const tbm::MultiplierConfig& c) const {
    return json{{"kernel", std::string(tbm::to_string(c.kernel.kind))},
                {"block_length", c.kernel.block_length},
                {"base", std::string(tbm::to_string(c.base))},
                {"mode", std::string(tbm::to_string(c.mode))}};
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text << '\n';
}

void emit_json(const Globals& g, const std::string& text) {
  std::cout << text << std::endl;
  if (!g.out.empty()) write_text(g.out, text);
}

std::vector<tbm::EvaluationPoint> parse_points(const std::string& text) {
  if (text.empty()) return tbm::default_covariance_points();
  std::vector<tbm::EvaluationPoint> points;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::vector<double> coords;
    for (const auto& f : tbm::split_csv_line(item)) coords.push_back(std::stod(f));
    points.emplace_back(coords);
  }
  return points;
}

// Copies keys of a JSON object into "--key=value" tokens.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json j = json::parse(in);
  if (!j.is_object()) throw std::runtime_error("config '" + path + "' must be a JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back("--" + key);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t k = 0; k < value.size(); ++k) text += (k ? "," : "") + value[k].dump();
    } else {
      text = value.dump();
    }
    tokens.push_back("--" + key + "=" + text);
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tests for a constant copula of serially dependent data using tapered block "
               "multipliers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (unsigned 64-bit)")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for studies, >= 1 (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", g.out,
                 "Output path (simulate: CSV; tests, bench-cov: JSON; study: directory)");
  app.add_option("--config", g.config,
                 "JSON config: study definition for `study`, flag values for other commands");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write a simulated n x d path as CSV");
  std::string family = "clayton", serial = "iid";
  std::optional<double> tau, theta, tau2, break_lambda;
  double ar_beta = 0.0;
  std::size_t n = 100, d = 2, burn_in = 100;
  std::vector<double> omega, alpha, garch_beta;
  bool innovation_feedback = false;
  sim->add_option("--family", family, "Copula: independence|clayton|gumbel")
      ->check(CLI::IsMember({"independence", "clayton", "gumbel"}))
      ->capture_default_str();
  sim->add_option("--tau", tau, "Kendall tau: clayton (0,1), gumbel [0,1)");
  sim->add_option("--theta", theta, "Copula parameter: clayton > 0, gumbel >= 1")->excludes("--tau");
  sim->add_option("--d", d, "Dimension, >= 2")->check(CLI::Range(2, 64))->capture_default_str();
  sim->add_option("--serial", serial, "Serial model: iid|ar1|garch")
      ->check(CLI::IsMember({"iid", "ar1", "garch"}))
      ->capture_default_str();
  sim->add_option("--beta", ar_beta, "AR(1) coefficient, |beta| < 1")->capture_default_str();
  sim->add_option("--omega", omega, "GARCH omega per margin, > 0 (default 0.012,0.037)")
      ->delimiter(',');
  sim->add_option("--alpha", alpha, "GARCH alpha per margin, >= 0 (default 0.072,0.115)")
      ->delimiter(',');
  sim->add_option("--garch-beta", garch_beta,
                  "GARCH beta per margin, >= 0, alpha + beta < 1 (default 0.919,0.868)")
      ->delimiter(',');
  sim->add_flag("--innovation-feedback", innovation_feedback,
                "GARCH variance recursion uses eps_{j-1}^2 instead of X_{j-1}^2");
  sim->add_option("--burn-in", burn_in, "Discarded burn-in length, >= 0")->capture_default_str();
  sim->add_option("--n", n, "Path length, >= 2")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30))
      ->capture_default_str();
  sim->add_option("--break-lambda", break_lambda, "Copula break after row floor(lambda n), lambda in (0,1)")
      ->check(CLI::Range(0.0, 1.0));
  sim->add_option("--tau2", tau2, "Kendall tau of the copula after the break")->needs("--break-lambda");

  // tests
  auto* spec = app.add_subcommand("test-specified", "Test for a break at floor(lambda n)");
  auto* unspec = app.add_subcommand("test-unspecified", "Test for a break at an unknown location");
  std::string input;
  double lambda = 0.5;
  std::size_t S = 1000, nodes = 32;
  std::optional<double> bandwidth;
  bool exact = false;
  std::string replicates_out;
  MultiplierFlags spec_flags, unspec_flags;
  spec->add_option("input", input, "Sample CSV (n rows, d >= 2 columns, optional header)")
      ->required()
      ->check(CLI::ExistingFile);
  spec->add_option("--lambda", lambda, "Break candidate fraction in (0,1)")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  spec->add_option("--S", S, "Multiplier replicates, >= 1")->check(CLI::PositiveNumber)->capture_default_str();
  spec->add_option("--quadrature-nodes", nodes, "Midpoint grid nodes per dimension, >= 1")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spec->add_option("--bandwidth", bandwidth, "Partial derivative bandwidth in (0, 0.5); default n_p^(-1/2)")
      ->check(CLI::Range(0.0, 0.5));
  spec->add_flag("--exact-statistic", exact, "Compare replicates with the exact statistic");
  spec->add_option("--replicates-out", replicates_out, "Write replicate values as CSV");
  spec_flags.add(spec);
  unspec->add_option("input", input, "Sample CSV (n rows, d >= 2 columns, optional header)")
      ->required()
      ->check(CLI::ExistingFile);
  unspec->add_option("--S", S, "Multiplier replicates, >= 1")->check(CLI::PositiveNumber)->capture_default_str();
  unspec->add_option("--replicates-out", replicates_out, "Write replicate values as CSV");
  unspec_flags.add(unspec);

  // bench-cov
  auto* bench = app.add_subcommand("bench-cov", "Estimate the empirical copula process covariance of a sample");
  std::string method = "multiplier", points_text;
  std::string bootstrap_block = "auto";
  std::size_t bench_S = 2000;
  MultiplierFlags bench_flags;
  bench->add_option("input", input, "Sample CSV")->required()->check(CLI::ExistingFile);
  bench->add_option("--method", method, "multiplier|bootstrap")
      ->check(CLI::IsMember({"multiplier", "bootstrap"}))
      ->capture_default_str();
  bench->add_option("--S", bench_S, "Replicates, >= 2")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30))
      ->capture_default_str();
  bench->add_option("--points", points_text,
                    "Evaluation points in [0,1]^d as 'a,b;c,d' (default the four (1/3,2/3) points)");
  bench->add_option("--bootstrap-block", bootstrap_block,
                    "Block bootstrap length in [1, n], or auto for floor(1.25 n^(1/3))")
      ->capture_default_str();
  bench->add_option("--bandwidth", bandwidth, "Partial derivative bandwidth in (0, 0.5)")
      ->check(CLI::Range(0.0, 0.5));
  bench->add_option("--replicates-out", replicates_out, "Write replicate values as CSV");
  bench_flags.add(bench);

  // study
  auto* study = app.add_subcommand("study", "Run a Monte Carlo study from a JSON config (--config)");

  // Non-study commands take --config as a JSON object of flag values; command-line
  // flags given after it take precedence.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    std::string config_path, command;
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (args[k] == "--config" && k + 1 < args.size()) config_path = args[k + 1];
      if (args[k].rfind("--config=", 0) == 0) config_path = args[k].substr(9);
      for (auto* sub : {sim, spec, unspec, bench, study}) {
        if (command.empty() && args[k] == sub->get_name()) {
          command = args[k];
          if (!config_path.empty() && command != "study") {
            const auto extra = config_tokens(config_path);
            args.insert(args.begin() + static_cast<long>(k) + 1, extra.begin(), extra.end());
            k += extra.size();
          }
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) {
      tbm::PathSpec path;
      const auto fam = tbm::parse_copula_family(family);
      if (theta) {
        path.copula = tbm::CopulaSpec{fam, *theta, d};
      } else if (fam == tbm::CopulaFamily::Independence) {
        path.copula = tbm::CopulaSpec{fam, 1.0, d};
      } else {
        if (!tau) throw std::invalid_argument("--tau or --theta is required for family " + family);
        path.copula = tbm::CopulaSpec::from_tau(fam, *tau, d);
      }
      path.copula.validate();
      path.serial.kind = tbm::parse_serial_kind(serial);
      path.serial.ar_beta = ar_beta;
      path.serial.burn_in = burn_in;
      if (!omega.empty()) path.serial.garch.omega = omega;
      if (!alpha.empty()) path.serial.garch.alpha = alpha;
      if (!garch_beta.empty()) path.serial.garch.beta = garch_beta;
      path.serial.garch.innovation_feedback = innovation_feedback;
      if (path.serial.kind != tbm::SerialKind::AR1 && sim->count("--beta")) {
        throw std::invalid_argument("--beta requires --serial ar1");
      }
      if (path.serial.kind != tbm::SerialKind::GARCH11 &&
          (!omega.empty() || !alpha.empty() || !garch_beta.empty())) {
        throw std::invalid_argument("--omega/--alpha/--garch-beta require --serial garch");
      }
      path.serial.validate(d);
      if (break_lambda) {
        if (!tau2) throw std::invalid_argument("--break-lambda requires --tau2");
        path.change = tbm::BreakSpec{*break_lambda, tbm::CopulaSpec::from_tau(fam, *tau2, d)};
      }
      tbm::Engine rng = tbm::make_engine(g.seed, {0});
      const auto sample = tbm::simulate_path(path, n, rng);
      if (g.out.empty()) throw std::invalid_argument("simulate requires --out");
      tbm::write_matrix_csv(g.out, sample.data());
    } else if (*spec) {
      const auto sample = tbm::read_sample_csv(input);
      tbm::SpecifiedTestInput in{sample,  lambda, spec_flags.resolve(sample.n()), S,
                                 {nodes}, bandwidth, exact};
      const auto result = tbm::test_specified(in, g.seed);
      json echo{{"command", "test-specified"}, {"input", input},         {"n", sample.n()},
                {"d", sample.d()},             {"lambda", lambda},       {"quadrature_nodes", nodes},
                {"exact_statistic", exact},    {"multipliers", spec_flags.echo(in.multipliers)}};
      if (bandwidth) echo["bandwidth"] = *bandwidth;
      emit_json(g, tbm::test_result_json(result, g.seed, echo.dump()));
      if (!replicates_out.empty()) tbm::write_replicates_csv(replicates_out, result);
    } else if (*unspec) {
      const auto sample = tbm::read_sample_csv(input);
      const tbm::UnspecifiedTestConfig config{unspec_flags.resolve(sample.n()), S};
      const auto result = tbm::test_unspecified(sample, config, g.seed);
      json echo{{"command", "test-unspecified"}, {"input", input}, {"n", sample.n()},
                {"d", sample.d()}, {"multipliers", unspec_flags.echo(config.multipliers)}};
      emit_json(g, tbm::test_result_json(result, g.seed, echo.dump()));
      if (!replicates_out.empty()) tbm::write_replicates_csv(replicates_out, result);
    } else if (*bench) {
      const auto sample = tbm::read_sample_csv(input);
      const tbm::PointSet points(parse_points(points_text));
      std::vector<tbm::ProcessReplicate> reps(bench_S);
      json echo{{"command", "bench-cov"}, {"input", input}, {"n", sample.n()}, {"method", method}, {"S", bench_S}};
      if (method == "multiplier") {
        const auto mc = bench_flags.resolve(sample.n());
        echo["multipliers"] = bench_flags.echo(mc);
        const tbm::MultiplierProcessEvaluator evaluator(tbm::pseudo_observations(sample), points,
                                                        bandwidth);
        for (std::size_t s = 0; s < bench_S; ++s) {
          tbm::Engine rng = tbm::make_engine(g.seed, {s});
          reps[s] = evaluator.evaluate_G(tbm::generate_multipliers(mc, sample.n(), rng));
        }
      } else {
        const std::size_t lb = bootstrap_block == "auto"
                                   ? static_cast<std::size_t>(tbm::default_bootstrap_block_length(sample.n()))
                                   : static_cast<std::size_t>(std::stoul(bootstrap_block));
        echo["bootstrap_block"] = lb;
        const tbm::BlockBootstrapEvaluator evaluator(sample, points);
        for (std::size_t s = 0; s < bench_S; ++s) {
          tbm::Engine rng = tbm::make_engine(g.seed, {s});
          reps[s] = evaluator.draw(lb, rng);
        }
      }
      const tbm::Matrix cov = tbm::covariance_estimate(reps);
      json out;
      out["seed"] = g.seed;
      auto& pts = out["points"] = json::array();
      for (const auto& p : points.points()) pts.push_back(std::vector<double>(p.coords().begin(), p.coords().end()));
      auto& rows = out["covariance"] = json::array();
      for (std::size_t r = 0; r < cov.rows(); ++r) {
        std::vector<double> row(cov.row(r).begin(), cov.row(r).end());
        rows.push_back(row);
      }
      out["config"] = echo;
      emit_json(g, out.dump(2));
      if (!replicates_out.empty()) {
        tbm::Matrix m(bench_S, points.size(), 0.0);
        for (std::size_t s = 0; s < bench_S; ++s) {
          for (std::size_t p = 0; p < points.size(); ++p) m(s, p) = reps[s].values[p];
        }
        std::vector<std::string> header;
        for (const auto& p : points.points()) header.push_back(tbm::point_label(p));
        tbm::write_matrix_csv(replicates_out, m, header);
      }
    } else if (*study) {
      if (g.config.empty()) throw std::invalid_argument("study requires --config");
      auto config = tbm::load_study_config(g.config);
      if (app.count("--seed")) config.seed = g.seed;
      config.threads = g.threads;
      const auto result = tbm::run_study(config);
      const std::string dir = g.out.empty() ? std::string("study_out") : g.out;
      tbm::write_study_outputs(result, dir);
      for (const auto& r : result.rows) {
        std::cout << r.scenario << ',' << r.method << ',' << r.setting << ',' << r.metric << ','
                  << tbm::format_double(r.value) << '\n';
      }
      std::cerr << "wrote " << dir << "/table.csv (" << result.seconds << " s)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

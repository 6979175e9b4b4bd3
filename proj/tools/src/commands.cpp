#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "check.hpp"
#include "idsq/criteria.hpp"
#include "idsq/error.hpp"
#include "idsq/json_io.hpp"
#include "idsq/laplace.hpp"
#include "idsq/parallel.hpp"
#include "sampling.hpp"
#include "verify.hpp"

namespace idsq::cli {

namespace {

using nlohmann::json;

struct Global {
  std::uint64_t seed = 7;
  unsigned threads = 1;
  std::string output;
  std::string format;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse '" + path + "': " + e.what());
  }
}

void emit(const Global& g, const std::string& text, std::ostream& out) {
  if (g.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.output, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + g.output + "'");
  f << text;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string verdict_csv(const Verdict& v) {
  std::ostringstream os;
  os << "criterion,holds,quantity,a\n";
  for (const CriterionReport& r : v.reasons) {
    auto get = [&](const char* key) {
      auto it = r.detail.find(key);
      return it == r.detail.end() ? std::string() : format_double(it->second);
    };
    os << to_string(r.criterion) << "," << (r.holds ? 1 : 0) << "," << get("quantity") << "," << get("a") << "\n";
  }
  return os.str();
}

json search_trial(const ScanConfig& c, unsigned t) {
  const std::uint64_t seed = mix_seed(c.seed, t);
  const BlockMatrix q = random_resolvent(seed, 2, 2);
  json j{{"trial", t}, {"seed", seed}};
  const CriterionReport cond = word_trace_condition(q);
  j["condition_quantity"] = cond.detail.at("quantity");
  if (cond.holds) {
    j["skipped"] = true;
    j["reason"] = "word-trace condition holds";
    return j;
  }
  j["skipped"] = false;
  const ScanOutcome s = scan_grid(q, std::nullopt, c.kmax, c.mmax);
  j["min_cell"] = {{"k", s.minimum.k}, {"m", s.minimum.m}, {"value", s.minimum.value}};
  if (s.negative) {
    json cell{{"k", s.negative->k}, {"m", s.negative->m}, {"value", s.negative->value}};
    if (s.negative->oracle_value) cell["oracle_value"] = *s.negative->oracle_value;
    j["negative_cell"] = cell;
  } else {
    j["negative_cell"] = nullptr;
  }
  const auto hit = limiting_word_search(q);
  j["limiting_word_K"] = hit ? json(hit->K) : json(nullptr);
  return j;
}

json family_sweep() {
  json rows = json::array();
  const double epsilon = 0.05;
  for (double ratio : {0.5, 1.0, 2.0, 4.0}) {
    DeltaEpsilonFamily f = reference_family();
    f.epsilon = epsilon;
    f.delta = ratio * epsilon;
    const CriterionReport r = word_trace_condition(materialize(f));
    rows.push_back({{"delta_over_epsilon", ratio},
                    {"delta", f.delta},
                    {"epsilon", f.epsilon},
                    {"holds", r.holds},
                    {"expected", f.delta <= f.epsilon},
                    {"quantity", r.detail.at("quantity")}});
  }
  return rows;
}

}  // namespace

BlockMatrix figure1_matrix() { return scale_to_unit_spectral_radius(materialize(reference_family())); }

std::vector<GridCell> figure1_grid(unsigned max_index) {
  return trace_sum_grid(figure1_matrix(), max_index, max_index);
}

std::string figure1_csv(const std::vector<GridCell>& cells) {
  std::string s = "k,m,value,log_value\n";
  for (const GridCell& c : cells) {
    s += std::to_string(c.k) + "," + std::to_string(c.m) + "," + format_double(c.value) + ",";
    if (c.value > 0.0) s += format_double(std::log(c.value));
    s += "\n";
  }
  return s;
}

void ScanConfig::validate() const {
  if (a_grid.empty()) throw InvalidArgument("scan config: a_grid must not be empty");
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (!(a_grid[i] > 0.0)) throw InvalidArgument("scan config: a_grid entries must be positive");
    if (i > 0 && !(a_grid[i] > a_grid[i - 1])) throw InvalidArgument("scan config: a_grid must be ascending");
  }
  if (trials < 1) throw InvalidArgument("scan config: trials must be >= 1");
  if (kmax + mmax > kMaxDpDegree) throw InvalidArgument("scan config: kmax + mmax exceeds the DP cap");
}

ScanConfig scan_config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("scan config must be a JSON object");
  ScanConfig c;
  try {
    if (j.contains("kmax")) c.kmax = j.at("kmax").get<unsigned>();
    if (j.contains("mmax")) c.mmax = j.at("mmax").get<unsigned>();
    if (j.contains("a_grid")) c.a_grid = j.at("a_grid").get<std::vector<double>>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<unsigned>();
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scan config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ScanConfig& c) {
  return {{"kmax", c.kmax}, {"mmax", c.mmax},     {"a_grid", c.a_grid},
          {"seed", c.seed}, {"trials", c.trials}, {"output_path", c.output_path}};
}

json run_search(const ScanConfig& config, unsigned threads) {
  config.validate();
  std::vector<json> trials(config.trials);
  parallel_for(config.trials, threads, [&](std::size_t t) { trials[t] = search_trial(config, t); });

  unsigned skipped = 0, negatives = 0;
  std::optional<json> global_min;
  for (const json& t : trials) {
    if (t.at("skipped").get<bool>()) {
      ++skipped;
      continue;
    }
    if (!t.at("negative_cell").is_null()) ++negatives;
    if (!global_min || t.at("min_cell").at("value").get<double>() < global_min->at("value").get<double>()) {
      global_min = t.at("min_cell");
      (*global_min)["trial"] = t.at("trial");
    }
  }
  json report{{"config", to_json(config)}, {"trials", trials}, {"family_sweep", family_sweep()}};
  report["summary"] = {{"trials", config.trials},
                       {"skipped", skipped},
                       {"scanned", config.trials - skipped},
                       {"negative_candidates", negatives},
                       {"global_min", global_min ? *global_min : json(nullptr)}};
  return report;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Infinite divisibility checks for pairs of Gaussian squared norms"};
  app.require_subcommand(1);
  Global g;
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--seed", g.seed, "Random seed");
    a->add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    a->add_option("--output", g.output, "Output file (default: stdout)");
    a->add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };
  add_globals(&app);

  auto* check = app.add_subcommand("check", "Run every criterion on a model and scan for negative sums");
  std::string sigma_path, q_path;
  CheckOptions check_opts;
  auto* sigma_opt = check->add_option("--sigma,model", sigma_path, "Covariance model JSON");
  check->add_option("--q", q_path, "Resolvent JSON {q, n1, n2}")->excludes(sigma_opt);
  check->add_option("--kmax", check_opts.kmax, "Largest k scanned");
  check->add_option("--mmax", check_opts.mmax, "Largest m scanned");
  check->add_option("--a-grid", check_opts.a_grid, "Tilt grid, ascending");

  auto* figure = app.add_subcommand("figure1", "Write the positivity surface of the reference resolvent");

  auto* search = app.add_subcommand("search", "Randomized search for negative sums");
  std::string config_path;
  ScanConfig scan_cfg;
  search->add_option("--config", config_path, "ScanConfig JSON");
  search->add_option("--trials", scan_cfg.trials, "Number of random resolvents");
  search->add_option("--kmax", scan_cfg.kmax, "Largest k scanned");
  search->add_option("--mmax", scan_cfg.mmax, "Largest m scanned");

  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  VerifyOptions verify_opts;
  verify->add_option("--filter", verify_opts.filter, "Run a single suite")
      ->check(CLI::IsMember(verify_suite_names()));
  verify->add_option("--instances", verify_opts.instances, "Random instances per suite");

  auto* laplace = app.add_subcommand("laplace", "Evaluate the Laplace transform three ways");
  std::string laplace_model;
  double s1 = 0.0, s2 = 0.0;
  std::optional<unsigned> nmax;
  std::uint64_t samples = 1000000;
  laplace->add_option("--sigma,model", laplace_model, "Covariance model JSON")->required();
  laplace->add_option("--s1", s1, "First dual variable in [0, 1)");
  laplace->add_option("--s2", s2, "Second dual variable in [0, 1)");
  laplace->add_option("--nmax", nmax, "Series length (default: automatic)");
  laplace->add_option("--samples", samples, "Monte Carlo samples");

  for (CLI::App* sub : {check, figure, search, verify, laplace}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (check->parsed()) {
      if (sigma_path.empty() == q_path.empty()) throw InvalidArgument("check needs exactly one of --sigma and --q");
      const Verdict v = q_path.empty() ? check_model(model_from_json(read_json_file(sigma_path)), check_opts)
                                       : check_resolvent(block_from_json(read_json_file(q_path)), check_opts);
      if (g.format == "csv") {
        emit(g, verdict_csv(v), out);
      } else {
        emit(g, to_json(v).dump(2) + "\n", out);
      }
      if (!g.output.empty()) out << render(v);
      return exit_code(v.status);
    }

    if (figure->parsed()) {
      const std::vector<GridCell> cells = figure1_grid();
      bool ok = true;
      for (const GridCell& c : cells) {
        if (!(c.value > 0.0) || !std::isfinite(std::log(c.value))) {
          ok = false;
          err << "non-positive cell (" << c.k << "," << c.m << ") = " << format_double(c.value) << "\n";
        }
      }
      if (!ok) {
        err << "resolvent: " << idsq::to_json(figure1_matrix()).dump() << "\n";
        return kExitAssertion;
      }
      if (g.format == "json") {
        json rows = json::array();
        for (const GridCell& c : cells)
          rows.push_back({{"k", c.k}, {"m", c.m}, {"value", c.value}, {"log_value", std::log(c.value)}});
        emit(g, rows.dump() + "\n", out);
      } else {
        emit(g, figure1_csv(cells), out);
      }
      return kExitOk;
    }

    if (search->parsed()) {
      ScanConfig cfg = scan_cfg;
      if (!config_path.empty()) cfg = scan_config_from_json(read_json_file(config_path));
      if (app.get_option("--seed")->count() > 0) cfg.seed = g.seed;
      if (g.output.empty() && !cfg.output_path.empty()) g.output = cfg.output_path;
      const json report = run_search(cfg, g.threads);
      emit(g, report.dump(2) + "\n", out);
      return report.at("summary").at("negative_candidates").get<unsigned>() > 0 ? kExitNotId : kExitOk;
    }

    if (verify->parsed()) {
      verify_opts.seed = g.seed;
      const auto results = run_verify(verify_opts);
      const json summary = verify_summary(results);
      emit(g, summary.dump(2) + "\n", out);
      return summary.at("passed").get<bool>() ? kExitOk : kExitAssertion;
    }

    if (laplace->parsed()) {
      const CovarianceModel model = model_from_json(read_json_file(laplace_model));
      const DualPoint p(s1, s2);
      const double closed = laplace_closed(model, p);
      const SeriesResult series = laplace_series(model, p, nmax);
      const MonteCarloResult mc = monte_carlo(model, p, samples, g.seed, g.threads);
      if (g.format == "csv") {
        std::ostringstream os;
        os << "s1,s2,closed,series,series_error_bound,series_terms,monte_carlo,standard_error,samples\n"
           << format_double(s1) << "," << format_double(s2) << "," << format_double(closed) << ","
           << format_double(series.value) << "," << format_double(series.error_bound) << "," << series.terms << ","
           << format_double(mc.estimate) << "," << format_double(mc.standard_error) << "," << mc.samples << "\n";
        emit(g, os.str(), out);
      } else {
        const json j{{"s1", s1},
                     {"s2", s2},
                     {"closed", closed},
                     {"series", {{"value", series.value},
                                 {"error_bound", series.error_bound},
                                 {"rho", series.rho},
                                 {"terms", series.terms}}},
                     {"monte_carlo", {{"estimate", mc.estimate},
                                      {"standard_error", mc.standard_error},
                                      {"samples", mc.samples},
                                      {"seed", g.seed}}}};
        emit(g, j.dump(2) + "\n", out);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace idsq::cli

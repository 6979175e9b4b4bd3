#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coefficient_oracle.hpp"
#include "idsq/criteria.hpp"
#include "idsq/error.hpp"
#include "idsq/laplace.hpp"
#include "idsq/model.hpp"
#include "sampling.hpp"

namespace idsq::cli {

namespace {

bool close_rel(double x, double y, double rel) {
  return std::abs(x - y) <= rel * std::max({std::abs(x), std::abs(y), 1e-300});
}

class Recorder {
 public:
  explicit Recorder(std::string name) { result_.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    ++result_.checks;
    if (ok) return;
    if (result_.failures++ == 0) result_.first_failure = what;
  }

  SuiteResult finish() { return std::move(result_); }

 private:
  SuiteResult result_;
};

std::string label(const char* what, std::uint64_t seed, unsigned k, unsigned m, double x, double y) {
  std::ostringstream os;
  os.precision(17);
  os << what << " seed=" << seed << " k=" << k << " m=" << m << ": " << x << " vs " << y;
  return os.str();
}

SuiteResult tracesum_suite(const VerifyOptions& o, const VerifyKernels& kern) {
  Recorder rec("tracesum");
  for (unsigned t = 0; t < o.instances; ++t) {
    const std::uint64_t seed = mix_seed(o.seed, t);
    const BlockMatrix q = random_resolvent(seed, 2, t % 2 == 0 ? 2 : 3);
    for (unsigned deg = 0; deg <= 6; ++deg)
      for (unsigned k = 0; k <= deg; ++k) {
        const double oracle = trace_sum_oracle(q, {k, deg - k}).value;
        const double dp = kern.dp(q, {k, deg - k}).value;
        rec.expect(close_rel(oracle, dp, 1e-9), label("oracle/dp", seed, k, deg - k, oracle, dp));
      }
    if (!q.is_2x2_blocks()) continue;
    const double c33 = kern.closed_3_3(q);
    const double d33 = kern.dp(q, {3, 3}).value;
    rec.expect(close_rel(c33, d33, 1e-9), label("closed 3,3", seed, 3, 3, c33, d33));
    const double c34 = kern.closed_3_4(q);
    const double d34 = kern.dp(q, {3, 4}).value;
    rec.expect(close_rel(c34, d34, 1e-9), label("closed 3,4", seed, 3, 4, c34, d34));

    const BlockMatrix r = block_diagonalize(q).rotated;
    const Matrix b11 = r.b11(), b12 = r.b12(), b21 = r.b21(), b22 = r.b22();
    for (unsigned k = 0; k <= 3; ++k)
      for (unsigned m = 0; m <= 3; ++m) {
        const double direct = (power(b11, k) * b12 * power(b22, m) * b21).trace();
        const double expanded = single_loop_trace_expansion(r, k, m);
        rec.expect(close_rel(direct, expanded, 1e-9), label("single loop", seed, k, m, direct, expanded));
      }
    const double direct2 = (b11 * b12 * power(b22, 2) * b21 * power(b11, 2) * b12 * b22 * b21).trace();
    const double expanded2 = double_loop_trace_expansion(r, 1, 2, 2, 1);
    rec.expect(close_rel(direct2, expanded2, 1e-9), label("double loop", seed, 3, 3, direct2, expanded2));
  }
  return rec.finish();
}

SuiteResult criteria_suite(const VerifyOptions& o) {
  Recorder rec("criteria");
  for (unsigned t = 0; t < o.instances; ++t) {
    const std::uint64_t seed = mix_seed(o.seed + 1000, t);
    const BlockMatrix a = random_resolvent(seed, 2, 2);
    const CriterionReport r = nonnegative_signature_check(a);
    std::ostringstream os;
    os << "seed=" << seed;
    if (r.holds) {
      rec.expect(r.witness.has_value(), "missing witness " + os.str());
      if (!r.witness) continue;
      const Matrix c = r.witness->conjugate(a.full().matrix());
      rec.expect(c.min_entry() >= -1e-10, "negative conjugated entry " + os.str());
      for (unsigned deg = 1; deg <= 6; ++deg)
        for (unsigned k = 0; k <= deg; ++k)
          rec.expect(trace_sum_oracle(a, {k, deg - k}).value >= -1e-10, "negative sum " + os.str());
    } else {
      rec.expect(limiting_word_search(a).has_value(), "no negative limiting word " + os.str());
    }
    const double quantity = nonpositive_offdiag_quantity(a);
    const auto u = construct_nonpositive_offdiag_signature(a);
    rec.expect(u.has_value() == (quantity >= -1e-12 * std::pow(a.b12().max_abs(), 2)),
               "off-diagonal witness disagrees with its inequality " + os.str());
  }
  return rec.finish();
}

SuiteResult laplace_suite(const VerifyOptions& o) {
  Recorder rec("laplace");
  const unsigned models = std::max(1U, o.instances / 4);
  for (unsigned t = 0; t < models; ++t) {
    const std::uint64_t seed = mix_seed(o.seed + 2000, t);
    const CovarianceModel model = random_model(seed, 2, 2, 1.0);
    for (double s1 : {0.0, 0.3, 0.7, 0.9})
      for (double s2 : {0.0, 0.3, 0.7, 0.9}) {
        const DualPoint p(s1, s2);
        const double closed = laplace_closed(model, p);
        const double series = laplace_series(model, p).value;
        rec.expect(std::abs(closed - series) <= 1e-8,
                   label("closed/series", seed, 0, 0, closed, series));
      }
    const BlockMatrix q = build_q(model);
    for (unsigned deg = 1; deg <= 6; ++deg)
      for (unsigned k = 0; k <= deg; ++k) {
        const double bridge = transform_coefficient(model, k, deg - k);
        const double dp = trace_sum_dp(q, {k, deg - k}).value / deg;
        rec.expect(close_rel(bridge, dp, 1e-6), label("coefficient bridge", seed, k, deg - k, bridge, dp));
      }
  }
  return rec.finish();
}

}  // namespace

std::vector<std::string> verify_suite_names() { return {"tracesum", "criteria", "laplace"}; }

std::vector<SuiteResult> run_verify(const VerifyOptions& options, const VerifyKernels& kernels) {
  const auto names = verify_suite_names();
  if (options.filter && std::find(names.begin(), names.end(), *options.filter) == names.end())
    throw InvalidArgument("unknown verify suite '" + *options.filter + "'");
  auto selected = [&](const char* name) { return !options.filter || *options.filter == name; };

  std::vector<SuiteResult> out;
  auto guarded = [&](const char* name, auto&& suite) {
    if (!selected(name)) return;
    try {
      out.push_back(suite());
    } catch (const std::exception& e) {
      SuiteResult r;
      r.name = name;
      r.checks = 1;
      r.failures = 1;
      r.first_failure = std::string("exception: ") + e.what();
      out.push_back(std::move(r));
    }
  };
  guarded("tracesum", [&] { return tracesum_suite(options, kernels); });
  guarded("criteria", [&] { return criteria_suite(options); });
  guarded("laplace", [&] { return laplace_suite(options); });
  return out;
}

nlohmann::json verify_summary(const std::vector<SuiteResult>& results) {
  nlohmann::json suites = nlohmann::json::array();
  bool all = !results.empty();
  for (const SuiteResult& r : results) {
    all = all && r.passed();
    nlohmann::json j{{"name", r.name}, {"passed", r.passed()}, {"checks", r.checks}, {"failures", r.failures}};
    if (!r.first_failure.empty()) j["first_failure"] = r.first_failure;
    suites.push_back(std::move(j));
  }
  return {{"passed", all}, {"suites", suites}};
}

}  // namespace idsq::cli

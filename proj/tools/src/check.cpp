#include "check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "idsq/cholesky.hpp"
#include "idsq/error.hpp"
#include "idsq/json_io.hpp"
#include "idsq/tracesum.hpp"

namespace idsq::cli {

namespace {

ScanOutcome scan(const BlockMatrix& q, std::optional<double> a, const CheckOptions& o) {
  return scan_grid(q, a, o.kmax, o.mmax);
}

void finish(Verdict& v, std::vector<ScanOutcome> scans) {
  for (ScanOutcome& s : scans) {
    v.scan.push_back(s.minimum);
    if (!v.negative_cell && s.negative) v.negative_cell = s.negative;
  }
  // The word-trace condition certifies only when it holds at every grid point.
  auto is_word = [](const CriterionReport& r) { return r.criterion == Criterion::WordTraceSign; };
  const bool any_word = std::any_of(v.reasons.begin(), v.reasons.end(), is_word);
  const bool all_words = std::all_of(v.reasons.begin(), v.reasons.end(),
                                     [&](const CriterionReport& r) { return !is_word(r) || r.holds; });
  const bool certified =
      (any_word && all_words) || std::any_of(v.reasons.begin(), v.reasons.end(), [&](const CriterionReport& r) {
        return r.holds && !is_word(r);
      });
  if (certified) {
    v.status = Status::CertifiedID;
    if (v.negative_cell) v.notes.push_back("a negative cell was found although a sufficient criterion holds");
  } else if (v.negative_cell) {
    v.status = Status::NotIDWitness;
  } else {
    v.status = Status::Undetermined;
  }
}

void word_trace_reports(Verdict& v, const std::vector<std::pair<std::optional<double>, BlockMatrix>>& qs) {
  for (const auto& [a, q] : qs) {
    CriterionReport r = word_trace_condition(q);
    if (a) r.detail["a"] = *a;
    v.reasons.push_back(std::move(r));
  }
}

void validate(const CheckOptions& o) {
  if (o.a_grid.empty()) throw InvalidArgument("a-grid must not be empty");
  if (!std::is_sorted(o.a_grid.begin(), o.a_grid.end()) ||
      std::any_of(o.a_grid.begin(), o.a_grid.end(), [](double a) { return !(a > 0.0); }))
    throw InvalidArgument("a-grid must be positive and ascending");
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::CertifiedID: return "certified_id";
    case Status::NotIDWitness: return "not_id_witness";
    case Status::Undetermined: return "undetermined";
  }
  return "unknown";
}

int exit_code(Status s) {
  switch (s) {
    case Status::CertifiedID: return 0;
    case Status::Undetermined: return 2;
    case Status::NotIDWitness: return 3;
  }
  return 1;
}

bool is_negative_cell(double value, double antidiagonal_max) { return value < -1e-9 * antidiagonal_max; }

ScanOutcome scan_grid(const BlockMatrix& q, std::optional<double> a, unsigned kmax, unsigned mmax) {
  const std::vector<GridCell> cells = trace_sum_grid(q, kmax, mmax);
  std::vector<double> diag_max(kmax + mmax + 1, 0.0);
  for (const GridCell& c : cells) diag_max[c.k + c.m] = std::max(diag_max[c.k + c.m], std::abs(c.value));

  ScanOutcome out;
  out.minimum = {a, cells.front().k, cells.front().m, cells.front().value};
  for (const GridCell& c : cells) {
    if (c.value < out.minimum.value) out.minimum = {a, c.k, c.m, c.value};
    if (out.negative || !is_negative_cell(c.value, diag_max[c.k + c.m])) continue;
    NegativeCell cell{c.k, c.m, a, c.value, std::nullopt};
    if (c.k + c.m <= kDefaultOracleCap) {
      cell.oracle_value = trace_sum_oracle(q, {c.k, c.m}).value;
      if (!is_negative_cell(*cell.oracle_value, diag_max[c.k + c.m])) continue;
    }
    out.negative = cell;
  }
  return out;
}


Verdict check_model(const CovarianceModel& model, const CheckOptions& options) {
  validate(options);
  Verdict v;
  if (model.n1() == 1) {
    v.reasons.push_back(shanbhag_check(model));
  } else if (model.n2() == 1) {
    const BlockMatrix swapped = swap_blocks(BlockMatrix(model.sigma(), model.n1()));
    CriterionReport r = shanbhag_check({swapped.full(), 1, model.n1(), model.a()});
    r.detail["blocks_swapped"] = 1.0;
    v.reasons.push_back(std::move(r));
  }

  if (model.dim() <= 20) {
    v.reasons.push_back(griffiths_bapat_check(model.sigma()));
  } else {
    v.notes.push_back("sign-vector search skipped: dimension above 20");
  }

  const bool two_by_two = model.n1() == 2 && model.n2() == 2;
  if (two_by_two) v.reasons.push_back(precision_signature_check(model));

  std::vector<std::pair<std::optional<double>, BlockMatrix>> qs;
  for (double a : options.a_grid) qs.emplace_back(a, build_q(model.with_a(a)));
  if (two_by_two) word_trace_reports(v, qs);

  std::vector<ScanOutcome> scans;
  for (const auto& [a, q] : qs) scans.push_back(scan(q, a, options));
  finish(v, std::move(scans));
  return v;
}

Verdict check_resolvent(const BlockMatrix& q, const CheckOptions& options) {
  validate(options);
  if (!is_positive_definite(q.full())) throw NotPositiveDefinite("resolvent must be positive definite");
  Verdict v;
  v.notes.push_back("resolvent input: covariance-based criteria skipped");
  if (q.is_2x2_blocks()) word_trace_reports(v, {{std::nullopt, q}});
  finish(v, {scan(q, std::nullopt, options)});
  return v;
}

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j{{"status", std::string(to_string(v.status))}};
  j["reasons"] = nlohmann::json::array();
  for (const CriterionReport& r : v.reasons) j["reasons"].push_back(idsq::to_json(r));
  if (v.negative_cell) {
    const NegativeCell& c = *v.negative_cell;
    nlohmann::json cell{{"k", c.k}, {"m", c.m}, {"value", c.value}};
    cell["a"] = c.a ? nlohmann::json(*c.a) : nlohmann::json(nullptr);
    if (c.oracle_value) cell["oracle_value"] = *c.oracle_value;
    j["negative_cell"] = cell;
  } else {
    j["negative_cell"] = nullptr;
  }
  j["scan"] = nlohmann::json::array();
  for (const ScanMinimum& s : v.scan)
    j["scan"].push_back({{"a", s.a ? nlohmann::json(*s.a) : nlohmann::json(nullptr)},
                         {"min_k", s.k},
                         {"min_m", s.m},
                         {"min_value", s.value}});
  j["notes"] = v.notes;
  return j;
}

std::string render(const Verdict& v) {
  std::ostringstream os;
  os.precision(6);
  os << "status: " << to_string(v.status) << "\n";
  os << "criterion                  holds  detail\n";
  for (const CriterionReport& r : v.reasons) {
    std::string name(idsq::to_string(r.criterion));
    name.resize(std::max<std::size_t>(name.size(), 26), ' ');
    os << name << " " << (r.holds ? "yes  " : "no   ") << " ";
    if (auto it = r.detail.find("quantity"); it != r.detail.end()) os << "quantity=" << it->second << " ";
    if (auto it = r.detail.find("a"); it != r.detail.end()) os << "a=" << it->second << " ";
    if (!r.signs.empty()) {
      os << "signs=";
      for (int s : r.signs) os << (s > 0 ? '+' : '-');
    }
    os << "\n";
  }
  for (const ScanMinimum& s : v.scan) {
    os << "scan";
    if (s.a) os << " a=" << *s.a;
    os << ": min at (" << s.k << "," << s.m << ") = " << s.value << "\n";
  }
  if (v.negative_cell)
    os << "negative cell (" << v.negative_cell->k << "," << v.negative_cell->m << ") = " << v.negative_cell->value
       << "\n";
  for (const std::string& n : v.notes) os << "note: " << n << "\n";
  return os.str();
}

}  // namespace idsq::cli

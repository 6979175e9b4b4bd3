#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "idsq/criteria.hpp"
#include "idsq/model.hpp"

namespace idsq::cli {

enum class Status { CertifiedID, NotIDWitness, Undetermined };

std::string_view to_string(Status s);

// Exit code of `idsq check` for a verdict.
int exit_code(Status s);

struct NegativeCell {
  unsigned k = 0;
  unsigned m = 0;
  // Tilt for covariance input; absent when a resolvent was given directly.
  std::optional<double> a;
  double value = 0.0;
  // Value from the word-enumeration oracle, when k + m is within its cap.
  std::optional<double> oracle_value;
};

// Smallest cell found by a DP scan.
struct ScanMinimum {
  std::optional<double> a;
  unsigned k = 0;
  unsigned m = 0;
  double value = 0.0;
};

struct Verdict {
  Status status = Status::Undetermined;
  std::vector<CriterionReport> reasons;
  std::optional<NegativeCell> negative_cell;
  std::vector<ScanMinimum> scan;
  std::vector<std::string> notes;
};

struct CheckOptions {
  unsigned kmax = 30;
  unsigned mmax = 30;
  std::vector<double> a_grid = default_a_grid();
};

// Tolerance rule for a cell to count as negative: below -1e-9 times the
// largest |value| on its anti-diagonal k + m.
bool is_negative_cell(double value, double antidiagonal_max);

struct ScanOutcome {
  ScanMinimum minimum;
  std::optional<NegativeCell> negative;
};

// DP scan of 0 <= k <= kmax, 0 <= m <= mmax. The first negative cell (in (k, m)
// order) is kept only if the oracle agrees whenever k + m is within its cap.
ScanOutcome scan_grid(const BlockMatrix& q, std::optional<double> a, unsigned kmax, unsigned mmax);

// Criteria pipeline on a covariance model: the n1 == 1 (or n2 == 1) case, the
// sign-vector search on Sigma^{-1}, the inverse-covariance sign inequality
// (2 + 2 only), the word-trace sign condition at every a in the grid (2 + 2
// only), and a DP scan for negative sums at every a.
Verdict check_model(const CovarianceModel& model, const CheckOptions& options);

// The same for a resolvent given directly. The criteria that need Sigma are
// skipped; the word-trace condition and the scan run on q alone.
Verdict check_resolvent(const BlockMatrix& q, const CheckOptions& options);

nlohmann::json to_json(const Verdict& v);

// Human-readable table.
std::string render(const Verdict& v);

}  // namespace idsq::cli

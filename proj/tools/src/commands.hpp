#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idsq/tracesum.hpp"

namespace idsq::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitUndetermined = 2;
inline constexpr int kExitNotId = 3;
inline constexpr int kExitAssertion = 4;

// The fixed resolvent of the surface experiment, scaled to unit spectral radius.
BlockMatrix figure1_matrix();

// 0 <= k, m <= 60 on figure1_matrix().
std::vector<GridCell> figure1_grid(unsigned max_index = 60);

// CSV with header k,m,value,log_value and %.17g values; log_value is empty
// for a cell <= 0.
std::string figure1_csv(const std::vector<GridCell>& cells);

struct ScanConfig {
  unsigned kmax = 30;
  unsigned mmax = 30;
  std::vector<double> a_grid = default_a_grid();
  std::uint64_t seed = 7;
  unsigned trials = 100;
  std::string output_path;

  // Throws InvalidArgument.
  void validate() const;
};

ScanConfig scan_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScanConfig& c);

// Random 2 + 2 resolvents (trial t uses seed mix_seed(seed, t)); trials where
// the word-trace condition holds are skipped, the others are scanned. Adds the
// resolvent family sweep at delta / epsilon in {0.5, 1, 2, 4}, epsilon = 0.05.
// The output does not depend on `threads`.
nlohmann::json run_search(const ScanConfig& config, unsigned threads);

// Full command line: check, figure1, search, verify, laplace.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace idsq::cli

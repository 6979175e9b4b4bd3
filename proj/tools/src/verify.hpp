#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idsq/tracesum.hpp"

namespace idsq::cli {

// Kernels under test. Replacing one with a corrupted version must make the
// affected suite fail.
struct VerifyKernels {
  std::function<double(const BlockMatrix&)> closed_3_3 = closed_trace_sum_3_3;
  std::function<double(const BlockMatrix&)> closed_3_4 = closed_trace_sum_3_4;
  std::function<TraceSumResult(const BlockMatrix&, TraceSumSpec)> dp = trace_sum_dp;
};

struct VerifyOptions {
  // Run only the suite with this name.
  std::optional<std::string> filter;
  std::uint64_t seed = 1;
  unsigned instances = 40;
};

struct SuiteResult {
  std::string name;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0 && checks > 0; }
};

// "tracesum", "criteria", "laplace".
std::vector<std::string> verify_suite_names();

// Throws InvalidArgument for an unknown filter.
std::vector<SuiteResult> run_verify(const VerifyOptions& options, const VerifyKernels& kernels = {});

nlohmann::json verify_summary(const std::vector<SuiteResult>& results);

}  // namespace idsq::cli

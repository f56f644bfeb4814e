#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace boim {

/// Deliberate defects for checking that the suites can fail.
enum class Fault { None, NegatedBonus };

Fault parse_fault(const std::string& text);

struct VerifyOptions {
  std::uint64_t seed = 7;
  int instances = 200;
  int sketch_rebuilds = 500;
  Fault fault = Fault::None;
};

struct InvariantResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first_violation;

  bool passed() const noexcept { return violations == 0; }
};

/// Smoothness, bonus orderings, greedy ratio guarantee and sketch accuracy on
/// seeded random corpora. The report depends only on the options.
std::vector<InvariantResult> run_property_suites(const VerifyOptions& options);

/// One line per invariant; returns true when all passed.
bool print_verify_report(std::ostream& out, const std::vector<InvariantResult>& results);

}  // namespace boim

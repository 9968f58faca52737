#pragma once

#include <stdexcept>
#include <string>

namespace cnet {

// Exit-code families used by the CLI: 2 validation, 3 region not covered,
// 4 solver failure.
struct error : std::runtime_error {
  int exit_code;
  explicit error(const std::string& msg, int code = 4)
      : std::runtime_error(msg), exit_code(code) {}
};

struct validation_error : error {
  explicit validation_error(const std::string& msg) : error(msg, 2) {}
};

// A design parameter outside the region where the convex program
// characterizes the equilibria.
struct region_not_covered : error {
  explicit region_not_covered(const std::string& msg) : error(msg, 3) {}
};

struct solver_failure : error {
  explicit solver_failure(const std::string& msg) : error(msg, 4) {}
};

struct unbounded_error : solver_failure {
  explicit unbounded_error(const std::string& msg) : solver_failure(msg) {}
};

struct max_iterations_error : solver_failure {
  explicit max_iterations_error(const std::string& msg) : solver_failure(msg) {}
};

struct non_concave_objective : region_not_covered {
  explicit non_concave_objective(const std::string& msg)
      : region_not_covered(msg) {}
};

// A closed-form formula was called outside its hypotheses.  Carries the
// violated inequality and by how much it fails.
struct precondition_violated : validation_error {
  std::string inequality;
  double slack;
  precondition_violated(const std::string& ineq, double s)
      : validation_error("precondition violated: " + ineq +
                         " (slack " + std::to_string(s) + ")"),
        inequality(ineq), slack(s) {}
};

// Sign tests sitting within the exact-comparison band of a regime boundary
// are refused rather than guessed.
struct boundary_ambiguous : validation_error {
  explicit boundary_ambiguous(const std::string& msg) : validation_error(msg) {}
};

}  // namespace cnet

#ifndef ESPIDER_ACCEPTANCE_HPP
#define ESPIDER_ACCEPTANCE_HPP

#include <ostream>
#include <string>
#include <vector>

namespace espider::accept {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the full acceptance preset, printing one pass/fail line per
/// criterion to `os`. Returns the number of failed criteria.
int run_all(std::ostream& os);

std::vector<CriterionResult> run_criteria();

}  // namespace espider::accept

#endif

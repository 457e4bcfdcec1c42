#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mop {

// Failure classes carried by every error thrown from the library.  The CLI
// maps them onto process exit codes, tests match on them directly.
enum class errc {
  validation,        // malformed input: sizes, duplicate nodes, bad parameters
  degenerate,        // measure system without the required normality
  breakdown,         // Krylov-type recurrence hit a (near-)zero coupling
  lu_breakdown,      // unpivoted LU/LDU met a (near-)zero leading pivot
  chase_pivot,       // elimination or bulge-chase pivot (near-)zero
  non_convergence,   // iteration exceeded its budget
  root_collision,    // two root iterates collapsed onto one point
  division_by_zero,  // exact-arithmetic division by zero
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::validation:       return "validation";
    case errc::degenerate:       return "degenerate";
    case errc::breakdown:        return "breakdown";
    case errc::lu_breakdown:     return "lu_breakdown";
    case errc::chase_pivot:      return "chase_pivot";
    case errc::non_convergence:  return "non_convergence";
    case errc::root_collision:   return "root_collision";
    case errc::division_by_zero: return "division_by_zero";
  }
  return "unknown";
}

class solver_error : public std::runtime_error {
 public:
  solver_error(errc kind, const std::string& what, std::ptrdiff_t index = -1)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + what +
                           (index >= 0 ? " (index " + std::to_string(index) + ")" : "")),
        kind_(kind),
        index_(index) {}

  errc kind() const { return kind_; }
  // Step / pivot / node index the failure names, -1 when not applicable.
  std::ptrdiff_t index() const { return index_; }

 private:
  errc kind_;
  std::ptrdiff_t index_;
};

}  // namespace mop

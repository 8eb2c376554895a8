#pragma once

#include <string>

#include "skewgof/family.hpp"

namespace skewgof {

struct FitResult {
  FamilySpec params;
  double objective = 0.0;  // log-likelihood for the ML fitters, fit criterion otherwise
  bool converged = false;
  int iterations = 0;
  std::string notes;
};

}  // namespace skewgof

#pragma once

#include <stdexcept>
#include <string>

namespace exlgm {

/// Bad user input: files, configuration, argument domains. CLI exit code 1.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, factorization breakdown. CLI exit code 2.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class invalid_input : public validation_error {
 public:
  using validation_error::validation_error;
};

/// A site that cannot be fitted (no positive values, threshold degenerate).
class degenerate_site : public validation_error {
 public:
  using validation_error::validation_error;
};

class too_few_exceedances : public validation_error {
 public:
  too_few_exceedances(long long site_id, int count, int required)
      : validation_error("site " + std::to_string(site_id) + ": " +
                         std::to_string(count) + " exceedances, " +
                         std::to_string(required) + " required"),
        count(count),
        required(required) {}
  int count;
  int required;
};

class out_of_hull : public validation_error {
 public:
  using validation_error::validation_error;
};

class convergence_failure : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

class not_positive_definite : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

}  // namespace exlgm

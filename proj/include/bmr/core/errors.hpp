#ifndef BMR_CORE_ERRORS_HPP
#define BMR_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bmr {

/// Malformed or inconsistent user input (dataset, configuration, sizes).
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bmr

#endif  // BMR_CORE_ERRORS_HPP

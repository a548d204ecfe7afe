#pragma once

#include <stdexcept>
#include <string>

namespace ncerg {

/// Shapes, partitions or parents that do not fit together.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Arguments outside an operation's mathematical domain (p < 1, λ ≤ 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An enumeration or convolution would exceed the configured element cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative procedure stopped at its iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace ncerg

#pragma once

#include "spectainer/containment.hpp"

#include <chrono>
#include <string>

namespace spectainer::detail {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };
bool log_enabled(LogLevel level);
void log(LogLevel level, const std::string& msg);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline constexpr double kViolationTol = 1e-7;
inline constexpr double kSearchBox = 1e3;

struct LinearMin {
  LmiStatus status = LmiStatus::Unknown;
  double value = 0.0;
  Vector x;
  Vector y;
};

/// min c0 + c'x over (x, y) with A(x,y) psd and |(x,y)|_inf <= box.
LinearMin minimize_linear(const LinearPencil& a, const Vector& c, double c0,
                          const SdpOptions& opts, double box = kSearchBox);

/// Scaled solitary/projected-module margin target: max |coefficient| of B.
double coefficient_scale(const LinearPencil& b);

/// Nonempty check shared by the methods; returns a finished verdict when
/// the inner set is empty or undecidable.
std::optional<Verdict> empty_inner_verdict(const LinearPencil& a, const std::string& method,
                                           const SdpOptions& opts);

/// <B(x,0), Z>.
double pairing(const LinearPencil& b, const Vector& x, const Matrix& z);

/// Residual of the solitary system, computed entrywise from the blocks.
double solitary_residual(const LinearPencil& a, const LinearPencil& b, double mu,
                         const Matrix& c0, const Matrix& c);

/// Residual of b = c0 + C a, B = C A, 0 = C A' (infinity norm).
double lp_residual(const HPolyhedronProj& inner, const HPolyhedronProj& outer, const Vector& c0,
                   const Matrix& c);

}  // namespace spectainer::detail

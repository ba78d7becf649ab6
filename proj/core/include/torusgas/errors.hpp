#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace torusgas {

// Every failure the library reports derives from Error so callers (the CLI in
// particular) can catch one type and still dispatch on the concrete kind.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define TORUSGAS_ERROR(Name)                                           \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    const char* kind() const noexcept override { return #Name; }       \
  };

TORUSGAS_ERROR(InvalidArgument)
TORUSGAS_ERROR(NonRealSpectrum)
TORUSGAS_ERROR(NegativeOrder)
TORUSGAS_ERROR(NonPositiveCoefficient)
TORUSGAS_ERROR(SlowConvergence)
TORUSGAS_ERROR(DivergedField)
TORUSGAS_ERROR(CoincidentPoints)
TORUSGAS_ERROR(DegenerateExponent)
TORUSGAS_ERROR(PlacementFailure)
TORUSGAS_ERROR(NonFiniteEnergy)
TORUSGAS_ERROR(BudgetExceeded)
TORUSGAS_ERROR(StationarityGateFailed)
TORUSGAS_ERROR(OverflowGuard)
TORUSGAS_ERROR(ConfigError)
TORUSGAS_ERROR(IoError)

#undef TORUSGAS_ERROR

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations, double residual)
      : Error("NoConvergence: " + what), iterations_(iterations), residual_(residual) {}
  const char* kind() const noexcept override { return "NoConvergence"; }
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// Non-fatal conditions (lattice truncation, degenerate exponents, energy
// monotonicity violations...). They go to spdlog and, while a WarningCapture
// is alive on the current thread, into its buffer as well.
struct Warning {
  std::string code;
  std::string message;
};

void warn(const std::string& code, const std::string& message);

class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<Warning>& warnings() const { return warnings_; }
  bool contains(const std::string& code) const;
  void record(Warning w) { warnings_.push_back(std::move(w)); }

 private:
  std::vector<Warning> warnings_;
  WarningCapture* previous_;
};

}  // namespace torusgas

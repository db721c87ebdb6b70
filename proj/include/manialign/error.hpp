#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace manialign {

enum class ErrorKind {
  // configuration
  BadConfig,
  BadSpec,
  // data
  DimensionMismatch,
  EmptyDataset,
  KTooLarge,
  SingleClass,
  NoTies,
  OrderMismatch,
  UnknownDomain,
  CountTooLarge,
  TooFewPerClass,
  LengthMismatch,
  NoCommonBands,
  TooFewPairs,
  EmptyObject,
  DegenerateData,
  Io,
  // numerical
  NonFinite,
  SingularB,
  ConvergenceFailure,
  RankDeficient,
  DegenerateDIS,
};

enum class ErrorCategory { Config, Data, Numerical };

ErrorCategory category_of(ErrorKind kind);
std::string_view to_string(ErrorKind kind);

/// Exception carrying a kind and the name of the module that raised it.
/// what() reads "<module>: <message>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

/// Process exit code for the CLI: 2 config, 3 data, 4 numerical.
int exit_code_for(ErrorCategory category);

}  // namespace manialign

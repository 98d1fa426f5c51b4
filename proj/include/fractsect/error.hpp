#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fractsect {

enum class ErrorCode {
  MalformedCsv,
  NonPositivePrice,
  MissingColumn,
  EmptyInput,
  InvalidSeries,
  WrongKind,
  LagTooLarge,
  TooShort,
  InsufficientExtrema,
  BadConfig,
  BadBounds,
  WindowOutOfRange,
  SeriesTooShort,
  RegimeTooSparse,
  GridTooCoarse,
  MissingQ2,
  BadSpec,
  EmbeddingFailure,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can decide between aborting a sector and aborting the run.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // 1-based data row (header excluded) for CSV errors.
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
};

}  // namespace fractsect

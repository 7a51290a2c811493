#pragma once

#include <iosfwd>
#include <string>

#include "deed/errors.hpp"
#include "deed/grid.hpp"

namespace deed {

class PgmError : public IoError {
 public:
  enum class Kind { Open, UnsupportedFormat, MalformedHeader, TruncatedPayload, Write };

  PgmError(Kind kind, const std::string& message) : IoError(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Binary PGM (P5), maxval 255 or 65535 (big-endian samples); values scaled by 1/maxval.
ScalarField read_pgm(std::istream& in, double spacing = 1.0);
ScalarField read_pgm(const std::string& path, double spacing = 1.0);

/// Clamps to [0, 1] and writes 8-bit P5 with bytes floor(v * 255 + 0.5).
void write_pgm(const ScalarField& field, std::ostream& out);
void write_pgm(const ScalarField& field, const std::string& path);

class MaskError : public IoError {
 public:
  using IoError::IoError;
};

/// Pixels with a positive sample belong to K. Throws MaskError on a size
/// mismatch and InvariantViolation when no pixel is set.
Mask mask_from_field(const ScalarField& image, const Grid& grid);
Mask read_mask(const std::string& path, const Grid& grid);

}  // namespace deed

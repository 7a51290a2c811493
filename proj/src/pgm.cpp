#include "deed/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace deed {

namespace {

using Kind = PgmError::Kind;

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

long read_header_number(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  if (!std::isdigit(in.peek())) throw PgmError(Kind::MalformedHeader, std::string("PGM: bad ") + what);
  long value = 0;
  while (std::isdigit(in.peek())) {
    value = value * 10 + (in.get() - '0');
    if (value > 1L << 30) throw PgmError(Kind::MalformedHeader, std::string("PGM: ") + what + " too large");
  }
  return value;
}

}  // namespace

ScalarField read_pgm(std::istream& in, double spacing) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2) throw PgmError(Kind::MalformedHeader, "PGM: missing magic number");
  if (magic[0] != 'P' || magic[1] != '5') {
    throw PgmError(Kind::UnsupportedFormat,
                   std::string("PGM: unsupported format '") + magic[0] + magic[1] + "' (binary P5 only)");
  }
  const long width = read_header_number(in, "width");
  const long height = read_header_number(in, "height");
  const long maxval = read_header_number(in, "maxval");
  if (maxval != 255 && maxval != 65535) {
    throw PgmError(Kind::MalformedHeader, "PGM: maxval must be 255 or 65535, got " + std::to_string(maxval));
  }
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) throw PgmError(Kind::MalformedHeader, "PGM: no whitespace after maxval");
  if (width < 2 || height < 2) throw PgmError(Kind::MalformedHeader, "PGM: image must be at least 2x2");

  const Grid grid(static_cast<int>(width), static_cast<int>(height), spacing);
  const std::size_t bytes_per_sample = maxval == 255 ? 1 : 2;
  std::vector<unsigned char> payload(grid.size() * bytes_per_sample);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw PgmError(Kind::TruncatedPayload, "PGM: expected " + std::to_string(payload.size()) +
                                               " payload bytes, got " + std::to_string(in.gcount()));
  }

  std::vector<double> values(grid.size());
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const unsigned sample = bytes_per_sample == 1 ? payload[k] : (payload[2 * k] << 8) | payload[2 * k + 1];
    values[k] = std::min(sample * scale, 1.0);
  }
  return ScalarField(grid, std::move(values));
}

ScalarField read_pgm(const std::string& path, double spacing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError(Kind::Open, "cannot open '" + path + "'");
  return read_pgm(in, spacing);
}

void write_pgm(const ScalarField& field, std::ostream& out) {
  const Grid& g = field.grid();
  out << "P5\n" << g.width() << ' ' << g.height() << "\n255\n";
  std::vector<unsigned char> payload(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double v = std::clamp(field[k], 0.0, 1.0);
    payload[k] = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
  }
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw PgmError(Kind::Write, "PGM: write failed");
}

void write_pgm(const ScalarField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PgmError(Kind::Write, "cannot open '" + path + "' for writing");
  write_pgm(field, out);
  out.close();
  if (!out) throw PgmError(Kind::Write, "PGM: write to '" + path + "' failed");
}

Mask mask_from_field(const ScalarField& image, const Grid& grid) {
  if (image.grid().width() != grid.width() || image.grid().height() != grid.height()) {
    throw MaskError("mask is " + std::to_string(image.grid().width()) + "x" +
                    std::to_string(image.grid().height()) + ", image is " + std::to_string(grid.width()) +
                    "x" + std::to_string(grid.height()));
  }
  std::vector<std::uint8_t> flags(grid.size());
  for (std::size_t k = 0; k < flags.size(); ++k) flags[k] = image[k] > 0.0 ? 1 : 0;
  if (std::none_of(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; })) {
    throw InvariantViolation("mask selects no pixel; the data set K must have positive measure");
  }
  return Mask(grid, std::move(flags));
}

Mask read_mask(const std::string& path, const Grid& grid) {
  return mask_from_field(read_pgm(path, grid.spacing()), grid);
}

}  // namespace deed

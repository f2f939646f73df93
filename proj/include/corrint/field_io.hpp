#pragma once

#include <iosfwd>
#include <string>

#include "corrint/field.hpp"

namespace corrint::io {

enum class Format { binary, csv, pgm };

Format parse_format(const std::string& s);
const char* format_extension(Format f);

// Binary layout, little endian:
//   "CORRFLD\0", u32 version, u32 rank,
//   rank x { u32 name_len, name, f64 min, f64 max, u64 n },
//   u32 fixed_count, fixed_count x { u32 name_len, name, f64 value },
//   f64 t, u64 config_hash, u64 cells, cells x f64.
void write_binary(std::ostream& out, const Field& f);
Field read_binary(std::istream& in);

// Header lines start with '#'; rows are "coord,...,value" in payload order,
// 17 significant digits so values round-trip exactly.
void write_csv(std::ostream& out, const Field& f);
Field read_csv(std::istream& in);

// 8-bit greyscale, 2D only, linearly scaled to the field maximum. First axis
// runs down the image.
void write_pgm(std::ostream& out, const Field& f);

// Writes to a temporary sibling and renames it into place.
void save(const std::string& path, const Field& f, Format fmt);
Field load(const std::string& path);  // binary or csv, detected from content

}  // namespace corrint::io

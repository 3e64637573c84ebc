#pragma once

#include "dataset.hpp"

#include <iosfwd>
#include <string>

namespace rcn {

enum class CsvHeader
{
  detect, //!< skip the first line if any of its fields is not numeric
  present,
  absent
};

//! Datasets on disk: one example per line, comma-separated features with
//! the label (+1, 1 or -1) in the last column. Blank lines and lines
//! starting with '#' are ignored.
Dataset
read_csv(std::istream& in, CsvHeader header = CsvHeader::detect);
Dataset
load_csv(const std::string& path, CsvHeader header = CsvHeader::detect);

//! Writes features with `digits` significant digits (17 round-trips
//! exactly) and integer labels, optionally under an "x1,...,xm,label"
//! header.
void
write_csv(std::ostream& out, const Dataset& data, bool header = false, int digits = 17);
void
save_csv(const std::string& path,
         const Dataset& data,
         bool header = false,
         int digits = 17);

//! printf("%.*g") for a double.
std::string
format_number(double v, int digits = 6);

} // namespace rcn

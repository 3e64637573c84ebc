#include "rcn/csv.hpp"
#include "rcn/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace rcn {

namespace {

std::string
trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string>
split_fields(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ','))
    out.push_back(trim(f));
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

bool
parse_double(const std::string& s, double& v)
{
  if (s.empty())
    return false;
  char* end = nullptr;
  errno = 0;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(v);
}

} // namespace

Dataset
read_csv(std::istream& in, CsvHeader header)
{
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t cols = 0;
  std::size_t lineno = 0;
  bool first = true;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto fields = split_fields(t);
    if (first) {
      first = false;
      if (header == CsvHeader::present)
        continue;
      if (header == CsvHeader::detect) {
        double dummy;
        bool numeric = true;
        for (std::size_t j = 0; j + 1 < fields.size(); ++j)
          numeric = numeric && parse_double(fields[j], dummy);
        if (!numeric)
          continue;
      }
    }
    if (fields.size() < 2)
      throw ParseError("line " + std::to_string(lineno) +
                         ": need at least one feature and a label",
                       lineno);
    if (cols == 0)
      cols = fields.size();
    else if (fields.size() != cols)
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                         std::to_string(cols) + " fields, found " +
                         std::to_string(fields.size()),
                       lineno);
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
      double v;
      if (!parse_double(fields[j], v))
        throw ParseError("line " + std::to_string(lineno) + ": bad number '" +
                           fields[j] + "' in column " + std::to_string(j + 1),
                         lineno);
      values.push_back(v);
    }
    const std::string& lab = fields.back();
    if (lab == "1" || lab == "+1")
      labels.push_back(1);
    else if (lab == "-1")
      labels.push_back(-1);
    else
      throw ParseError("line " + std::to_string(lineno) + ": label '" + lab +
                         "' is not -1 or +1",
                       lineno);
  }
  if (labels.empty())
    throw ParseError("no data rows", lineno);
  const auto n = static_cast<Index>(labels.size());
  const auto m = static_cast<Index>(cols - 1);
  Matrix<double> x = Eigen::Map<Matrix<double>>(values.data(), n, m);
  Labels y = Eigen::Map<Labels>(labels.data(), n);
  return Dataset(std::move(x), std::move(y));
}

Dataset
load_csv(const std::string& path, CsvHeader header)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  try {
    return read_csv(in, header);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

std::string
format_number(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void
write_csv(std::ostream& out, const Dataset& data, bool header, int digits)
{
  const auto& x = data.features();
  if (header) {
    for (Index j = 0; j < data.dim(); ++j)
      out << 'x' << j + 1 << ',';
    out << "label\n";
  }
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j)
      out << format_number(x(i, j), digits) << ',';
    out << data.labels()(i) << '\n';
  }
}

void
save_csv(const std::string& path, const Dataset& data, bool header, int digits)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, data, header, digits);
  if (!out)
    throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace rcn

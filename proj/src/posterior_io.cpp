#include "rcn/posterior_io.hpp"
#include "rcn/csv.hpp"
#include "rcn/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace rcn {

namespace {

std::string
num(double v)
{
  return format_number(v, 17);
}

void
write_block(std::ostream& out,
            const std::string& label,
            double width,
            const Matrix<double>& rows,
            const Vector<double>* alphas)
{
  out << "class " << label << '\n' << "width " << num(width) << '\n';
  out << "rows " << rows.rows() << '\n';
  for (Index i = 0; i < rows.rows(); ++i) {
    if (alphas)
      out << num((*alphas)(i)) << ' ';
    for (Index j = 0; j < rows.cols(); ++j)
      out << (j ? " " : "") << num(rows(i, j));
    out << '\n';
  }
}

class Reader
{
public:
  explicit Reader(std::istream& in)
    : in_(in)
  {}

  std::istringstream line(const std::string& expect)
  {
    std::string s;
    while (std::getline(in_, s)) {
      ++lineno_;
      if (!s.empty() && s[0] != '#')
        return std::istringstream(s);
    }
    throw error("file ends before '" + expect + "'");
  }

  template <typename T>
  T field(const std::string& key)
  {
    auto ss = line(key);
    std::string k;
    T v{};
    if (!(ss >> k) || k != key || !(ss >> v))
      throw error("expected '" + key + " <value>'");
    return v;
  }

  ParseError error(const std::string& what) const
  {
    return ParseError("posterior line " + std::to_string(lineno_) + ": " + what, lineno_);
  }

private:
  std::istream& in_;
  std::size_t lineno_ = 0;
};

struct Block
{
  double width = 0;
  Matrix<double> rows;
  Vector<double> alphas;
};

Block
read_block(Reader& r, const std::string& label, Index dim, bool ratio)
{
  if (r.field<std::string>("class") != label)
    throw r.error("expected 'class " + label + "'");
  Block b;
  b.width = r.field<double>("width");
  if (!(b.width > 0))
    throw r.error("width must be positive");
  const auto k = r.field<Index>("rows");
  if (k < 1)
    throw r.error("row count must be positive");
  b.rows.resize(k, dim);
  b.alphas.resize(ratio ? k : 0);
  for (Index i = 0; i < k; ++i) {
    auto ss = r.line("data row");
    if (ratio && !(ss >> b.alphas(i)))
      throw r.error("bad coefficient");
    for (Index j = 0; j < dim; ++j)
      if (!(ss >> b.rows(i, j)))
        throw r.error("row has fewer than " + std::to_string(dim) + " coordinates");
  }
  return b;
}

} // namespace

void
save_posterior(std::ostream& out, const CondProbEstimate<double>& cond)
{
  using Est = CondProbEstimate<double>;
  const auto* kde = std::get_if<Est::KdeParts>(&cond.parts());
  const auto* ratio = std::get_if<Est::RatioParts>(&cond.parts());
  if (!kde && !ratio)
    throw std::invalid_argument("a given posterior has no fitted form to save");
  out << "rcn-posterior 1\n"
      << "method " << to_string(cond.method()) << '\n'
      << "prior " << num(cond.prior().p_plus) << '\n'
      << "epsilon " << num(cond.epsilon()) << '\n';
  if (kde) {
    out << "dim " << kde->plus.dim() << '\n';
    write_block(out, "+1", kde->plus.kernel().width(), kde->plus.points(), nullptr);
    write_block(out, "-1", kde->minus.kernel().width(), kde->minus.points(), nullptr);
    return;
  }
  out << "dim " << ratio->plus.centers.cols() << '\n';
  write_block(out, "+1", ratio->plus.kernel.width(), ratio->plus.centers,
              &ratio->plus.alphas);
  write_block(out, "-1", ratio->minus.kernel.width(), ratio->minus.centers,
              &ratio->minus.alphas);
}

CondProbEstimate<double>
load_posterior(std::istream& in)
{
  using Est = CondProbEstimate<double>;
  Reader r(in);
  if (r.field<int>("rcn-posterior") != 1)
    throw r.error("unsupported posterior format version");
  PosteriorMethod method;
  try {
    method = parse_posterior_method(r.field<std::string>("method"));
  } catch (const std::invalid_argument& e) {
    throw r.error(e.what());
  }
  const ClassPrior prior{ r.field<double>("prior") };
  if (!(prior.p_plus > 0 && prior.p_plus < 1))
    throw r.error("prior must lie in (0, 1)");
  const auto eps = r.field<double>("epsilon");
  const auto dim = r.field<Index>("dim");
  if (dim < 1)
    throw r.error("dimension must be positive");
  const bool ratio = method != PosteriorMethod::kde;
  Block plus = read_block(r, "+1", dim, ratio);
  Block minus = read_block(r, "-1", dim, ratio);
  if (!ratio) {
    Est::KdeParts parts{
      KdeEstimate<double>(std::move(plus.rows), GaussianKernel<double>(plus.width)),
      KdeEstimate<double>(std::move(minus.rows), GaussianKernel<double>(minus.width))
    };
    return Est(method, prior, eps, std::move(parts), Vector<double>());
  }
  Est::RatioParts parts{
    RatioModel<double>{ std::move(plus.rows), std::move(plus.alphas),
                        GaussianKernel<double>(plus.width) },
    RatioModel<double>{ std::move(minus.rows), std::move(minus.alphas),
                        GaussianKernel<double>(minus.width) }
  };
  return Est(method, prior, eps, std::move(parts), Vector<double>());
}

} // namespace rcn

#include "rcn/csv.hpp"
#include "rcn/errors.hpp"
#include "rcn/model.hpp"

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

struct LineReader
{
  std::istream& in;
  std::size_t lineno = 0;

  std::istringstream next(const std::string& expect)
  {
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '#')
        return std::istringstream(line);
    }
    throw ParseError("model file ends before '" + expect + "'", lineno);
  }

  template <typename T>
  T field(const std::string& key)
  {
    auto ss = next(key);
    std::string k;
    T v{};
    if (!(ss >> k) || k != key || !(ss >> v))
      throw ParseError("line " + std::to_string(lineno) + ": expected '" + key +
                         " <value>'",
                       lineno);
    return v;
  }
};

} // namespace

void
save_model(std::ostream& out, const ClassifierModel<double>& model, const ModelInfo& info)
{
  out << "rcn-model 1\n";
  out << "kind " << to_string(model.kind()) << '\n';
  out << "dim " << model.dim() << '\n';
  const bool lin = model.kind() == ModelKind::linear;
  out << "bias " << num(lin ? model.linear().bias : model.kernel().bias) << '\n';
  out << "meta method " << info.method << '\n';
  out << "meta loss " << info.loss << '\n';
  out << "meta converged " << (info.converged ? 1 : 0) << '\n';
  out << "meta nonconvex " << (info.nonconvex ? 1 : 0) << '\n';
  out << "meta iterations " << info.iterations << '\n';
  out << "meta objective " << num(info.objective) << '\n';
  if (lin) {
    out << "weights";
    for (Index j = 0; j < model.dim(); ++j)
      out << ' ' << num(model.linear().weights(j));
    out << '\n';
    return;
  }
  const auto& k = model.kernel();
  out << "width " << num(k.kernel.width()) << '\n';
  out << "support " << k.support.rows() << '\n';
  for (Index i = 0; i < k.support.rows(); ++i) {
    out << num(k.coefficients(i));
    for (Index j = 0; j < k.support.cols(); ++j)
      out << ' ' << num(k.support(i, j));
    out << '\n';
  }
}

ClassifierModel<double>
load_model(std::istream& in, ModelInfo* info)
{
  LineReader r{ in };
  if (r.field<int>("rcn-model") != 1)
    throw ParseError("unsupported model format version", r.lineno);
  const auto kind = r.field<std::string>("kind");
  if (kind != "linear" && kind != "kernel")
    throw ParseError("unknown model kind '" + kind + "'", r.lineno);
  const auto dim = r.field<Index>("dim");
  if (dim < 1)
    throw ParseError("model dimension must be positive", r.lineno);
  const auto bias = r.field<double>("bias");

  ModelInfo meta;
  std::istringstream ss;
  std::string key;
  for (;;) {
    ss = r.next(kind == "linear" ? "weights" : "width");
    ss >> key;
    if (key != "meta")
      break;
    std::string name, value;
    ss >> name >> value;
    if (name == "method")
      meta.method = value;
    else if (name == "loss")
      meta.loss = value;
    else if (name == "converged")
      meta.converged = value == "1";
    else if (name == "nonconvex")
      meta.nonconvex = value == "1";
    else if (name == "iterations")
      meta.iterations = std::stoi(value);
    else if (name == "objective")
      meta.objective = std::stod(value);
  }
  if (info)
    *info = meta;

  auto bad = [&](const std::string& what) {
    return ParseError("line " + std::to_string(r.lineno) + ": " + what, r.lineno);
  };
  if (kind == "linear") {
    if (key != "weights")
      throw bad("expected 'weights'");
    Vector<double> w(dim);
    for (Index j = 0; j < dim; ++j)
      if (!(ss >> w(j)))
        throw bad("expected " + std::to_string(dim) + " weights");
    return ClassifierModel<double>(LinearModel<double>{ std::move(w), bias });
  }
  double width = 0;
  if (key != "width" || !(ss >> width) || !(width > 0))
    throw bad("expected 'width <positive value>'");
  const auto n = r.field<Index>("support");
  if (n < 1)
    throw bad("support count must be positive");
  Matrix<double> support(n, dim);
  Vector<double> coef(n);
  for (Index i = 0; i < n; ++i) {
    auto row = r.next("support row");
    if (!(row >> coef(i)))
      throw bad("bad support row");
    for (Index j = 0; j < dim; ++j)
      if (!(row >> support(i, j)))
        throw bad("support row has fewer than " + std::to_string(dim) +
                  " coordinates");
  }
  return ClassifierModel<double>(KernelModel<double>{
    std::move(support), std::move(coef), GaussianKernel<double>(width), bias });
}

} // namespace rcn

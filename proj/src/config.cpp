#include "rcn/config.hpp"
#include "rcn/errors.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

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
split_list(const std::string& value)
{
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

double
to_double(const std::string& s)
{
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw std::invalid_argument("'" + s + "' is not a number");
  return v;
}

long long
to_integer(const std::string& s)
{
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw std::invalid_argument("'" + s + "' is not an integer");
  return v;
}

NoisePair
to_pair(const std::string& s)
{
  const auto c = s.find(':');
  if (c == std::string::npos)
    throw std::invalid_argument("noise pair '" + s +
                                "' must be written rho_plus:rho_minus");
  NoisePair p{ to_double(trim(s.substr(0, c))), to_double(trim(s.substr(c + 1))) };
  p.validate();
  return p;
}

std::vector<NoisePair>
to_pairs(const std::string& value)
{
  std::vector<NoisePair> out;
  for (const auto& item : split_list(value))
    out.push_back(to_pair(item));
  if (out.empty())
    throw std::invalid_argument("empty list");
  return out;
}

template <typename T>
T
at_least(T v, T lo)
{
  if (!(v >= lo))
    throw std::invalid_argument("must be at least " + std::to_string(lo));
  return v;
}

double
in_range(double v, double lo, double hi, bool hi_open)
{
  if (!(v >= lo && (hi_open ? v < hi : v <= hi)))
    throw std::invalid_argument("out of range");
  return v;
}

template <typename T, typename Parse>
std::vector<T>
to_list(const std::string& value, Parse parse)
{
  std::vector<T> out;
  for (const auto& item : split_list(value))
    out.push_back(parse(item));
  if (out.empty())
    throw std::invalid_argument("empty list");
  return out;
}

} // namespace

void
apply_setting(ParsedConfig& cfg,
              const std::string& key,
              const std::string& value,
              std::size_t line,
              const std::string& base_dir)
{
  auto& s = cfg.spec;
  const std::string where =
    line ? "line " + std::to_string(line) + ": " : std::string();
  try {
    if (key == "name")
      s.name = value;
    else if (key == "experiment") {
      if (value == "classification")
        s.kind = ExperimentSpec::Kind::classification;
      else if (value == "rates")
        s.kind = ExperimentSpec::Kind::rates;
      else
        throw std::invalid_argument("expected classification or rates");
    } else if (key == "datasets")
      s.datasets = to_list<DataSource>(
        value, [&](const std::string& v) { return DataSource::parse(v, base_dir); });
    else if (key == "noise_pairs")
      s.noise_pairs = to_pairs(value);
    else if (key == "methods")
      s.methods = to_list<Method>(value, parse_method);
    else if (key == "losses")
      s.losses = to_list<Loss>(value, parse_loss);
    else if (key == "model")
      s.model.kind = parse_model_kind(value);
    else if (key == "kernel_width") {
      s.model.kernel_width = to_double(value);
      if (!(s.model.kernel_width > 0))
        throw std::invalid_argument("must be positive");
    } else if (key == "repetitions")
      s.repetitions = static_cast<int>(at_least(to_integer(value), 1LL));
    else if (key == "seed") {
      const long long v = to_integer(value);
      if (v < 0)
        throw std::invalid_argument("seed must be nonnegative");
      s.seed = static_cast<std::uint64_t>(v);
      cfg.seed_set = true;
    } else if (key == "train_frac") {
      s.train_frac = to_double(value);
      if (!(s.train_frac > 0 && s.train_frac < 1))
        throw std::invalid_argument("must lie in (0, 1)");
    } else if (key == "posterior") {
      s.posterior_auto = value == "auto";
      if (!s.posterior_auto)
        s.posterior.method = parse_posterior_method(value);
    } else if (key == "kde_width")
      s.posterior.kde_width = parse_width_rule(value);
    else if (key == "ratio_width")
      s.posterior.ratio_width = parse_width_rule(value);
    else if (key == "epsilon")
      s.posterior.epsilon = in_range(to_double(value), 0.0, 0.5, true);
    else if (key == "max_centers")
      s.posterior.max_centers = at_least(to_integer(value), 1LL);
    else if (key == "rate_grid")
      s.rate_grid = value == "default" ? default_rate_grid() : to_pairs(value);
    else if (key == "cv_folds")
      s.cv_folds = static_cast<int>(at_least(to_integer(value), 2LL));
    else if (key == "lambda")
      s.train.lambda = at_least(to_double(value), 0.0);
    else if (key == "max_iter")
      s.train.max_iter = static_cast<int>(at_least(to_integer(value), 1LL));
    else if (key == "tol") {
      s.train.tol = to_double(value);
      if (!(s.train.tol > 0))
        throw std::invalid_argument("must be positive");
    } else if (key == "rate_methods")
      s.rate_methods = to_list<RateMethod>(value, parse_rate_method);
    else if (key == "rate_quantile")
      s.rate_quantile = in_range(to_double(value), 0.0, 0.1, false);
    else
      throw ConfigError(where + "unknown key '" + key + "'", key, line);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + "bad value for '" + key + "': " + e.what(), key, line);
  }
}

void
apply_assignment(ParsedConfig& cfg,
                 const std::string& assignment,
                 std::size_t line,
                 const std::string& base_dir)
{
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    const std::string where =
      line ? "line " + std::to_string(line) + ": " : std::string();
    throw ConfigError(where + "expected key=value, found '" + trim(assignment) + "'",
                      trim(assignment), line);
  }
  apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)),
                line, base_dir);
}

ParsedConfig
parse_config(std::istream& in, const std::string& base_dir)
{
  ParsedConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty())
      continue;
    apply_assignment(cfg, line, lineno, base_dir);
  }
  return cfg;
}

ParsedConfig
load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(in, dir);
}

} // namespace rcn

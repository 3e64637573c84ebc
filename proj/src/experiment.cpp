#include "rcn/experiment.hpp"
#include "rcn/csv.hpp"
#include "rcn/metrics.hpp"
#include "rcn/weights.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace rcn {

std::string
to_string(Method m)
{
  switch (m) {
    case Method::plain:
      return "plain";
    case Method::ld:
      return "ld";
    case Method::ub:
      return "ub";
    case Method::iw:
      return "iw";
    case Method::iw_cv:
      return "iw-cv";
    case Method::eiw:
      return "eiw";
  }
  return "?";
}

Method
parse_method(const std::string& s)
{
  for (Method m : { Method::plain, Method::ld, Method::ub, Method::iw,
                    Method::iw_cv, Method::eiw })
    if (to_string(m) == s)
      return m;
  throw std::invalid_argument("unknown method '" + s +
                              "' (expected plain, ld, ub, iw, iw-cv, eiw)");
}

std::string
to_string(RateMethod m)
{
  switch (m) {
    case RateMethod::min_posterior:
      return "min-posterior";
    case RateMethod::quantile:
      return "quantile";
    case RateMethod::cv:
      return "cv";
  }
  return "?";
}

RateMethod
parse_rate_method(const std::string& s)
{
  for (RateMethod m : { RateMethod::min_posterior, RateMethod::quantile, RateMethod::cv })
    if (to_string(m) == s)
      return m;
  throw std::invalid_argument("unknown rate method '" + s +
                              "' (expected min-posterior, quantile, cv)");
}

DataSource
DataSource::parse(const std::string& text, const std::string& base_dir)
{
  DataSource src;
  const std::string prefix = "synthetic:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string dims = text.substr(prefix.size());
    const auto x = dims.find('x');
    std::size_t u1 = 0, u2 = 0;
    long long n = 0, m = 0;
    try {
      if (x == std::string::npos)
        throw std::invalid_argument("");
      n = std::stoll(dims.substr(0, x), &u1);
      m = std::stoll(dims.substr(x + 1), &u2);
    } catch (const std::exception&) {
      u1 = 0;
    }
    if (u1 == 0 || u1 != x || u2 != dims.size() - x - 1 || n < 2 || m < 1)
      throw std::invalid_argument("bad synthetic source '" + text +
                                  "' (expected synthetic:<n>x<m>)");
    src.n = n;
    src.m = m;
    src.name = "synthetic-" + std::to_string(m) + "x" + std::to_string(n);
    return src;
  }
  if (text.empty())
    throw std::invalid_argument("empty dataset source");
  std::filesystem::path p(text);
  if (p.is_relative() && !base_dir.empty())
    p = std::filesystem::path(base_dir) / p;
  src.path = p.lexically_normal().string();
  src.name = p.stem().string();
  return src;
}

Dataset
load_data(const DataSource& src, std::uint64_t seed)
{
  if (!src.synthetic())
    return load_csv(src.path);
  return generate_synthetic<double>(src.n, src.m,
                                    SeededRng(seed).derive("data:" + src.name));
}

void
ExperimentSpec::validate() const
{
  if (datasets.empty())
    throw std::invalid_argument("experiment has no datasets");
  if (noise_pairs.empty())
    throw std::invalid_argument("experiment has no noise pairs");
  for (const auto& p : noise_pairs)
    p.validate();
  if (repetitions < 1)
    throw std::invalid_argument("repetitions must be at least 1");
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (kind == Kind::classification && methods.empty())
    throw std::invalid_argument("experiment has no methods");
  if (kind == Kind::rates && rate_methods.empty())
    throw std::invalid_argument("experiment has no rate methods");
  if (losses.empty())
    throw std::invalid_argument("experiment has no losses");
  for (Loss l : losses)
    if (l == Loss::zero_one)
      throw std::invalid_argument("the zero-one loss is for evaluation only");
  if (!(model.kernel_width > 0))
    throw std::invalid_argument("kernel width must be positive");
  if (!(posterior.epsilon >= 0.0 && posterior.epsilon < 0.5))
    throw std::invalid_argument("posterior clamp must lie in [0, 0.5)");
  if (cv_folds < 2)
    throw std::invalid_argument("cv folds must be at least 2");
  if (rate_grid.empty())
    throw std::invalid_argument("rate grid is empty");
  for (const auto& p : rate_grid)
    p.validate();
  if (!(rate_quantile >= 0.0 && rate_quantile <= 0.1))
    throw std::invalid_argument("rate quantile must lie in [0, 0.1]");
  train.validate();
}

PosteriorOptions
ExperimentSpec::posterior_for(Index dim) const
{
  PosteriorOptions opt = posterior;
  if (posterior_auto)
    opt.method = dim <= auto_kde_max_dim ? PosteriorMethod::kde : PosteriorMethod::kliep;
  return opt;
}

Summary
summarize(const std::vector<double>& values)
{
  Summary s;
  double sum = 0.0;
  for (double v : values)
    if (std::isfinite(v)) {
      sum += v;
      ++s.count;
    }
  if (s.count == 0) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = sum / s.count;
  double ss = 0.0;
  for (double v : values)
    if (std::isfinite(v))
      ss += (v - s.mean) * (v - s.mean);
  s.std = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
  return s;
}

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

//! Runs fn(0..count-1) on up to `jobs` threads. The first exception thrown
//! by any task, in index order, is rethrown after all tasks finish.
template <typename Fn>
void
parallel_for(int count, int jobs, Fn&& fn)
{
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{ 0 };
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(jobs, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

std::string
pair_tag(const std::string& dataset, const NoisePair& p)
{
  return dataset + ":" + format_number(p.rho_plus, 17) + ":" +
         format_number(p.rho_minus, 17);
}

std::string
pair_label(const NoisePair& p)
{
  return "(" + format_number(p.rho_plus) + ", " + format_number(p.rho_minus) + ")";
}

struct ClassificationCell
{
  double accuracy = nan;
  std::string error;
  bool unconverged = false;
};

//! One repetition of the classification protocol for one dataset. Cells are
//! laid out as [pair][loss][method].
std::vector<ClassificationCell>
classification_repetition(const ExperimentSpec& spec,
                          const DataSource& src,
                          const Dataset& data,
                          const PosteriorOptions& popt,
                          int rep)
{
  const std::size_t n_loss = spec.losses.size();
  const std::size_t n_meth = spec.methods.size();
  std::vector<ClassificationCell> cells(spec.noise_pairs.size() * n_loss * n_meth);
  const SeededRng master(spec.seed);
  const auto r = static_cast<std::uint64_t>(rep);

  std::optional<Split<double>> parts;
  try {
    parts = split(data, spec.train_frac, master.derive(r, "split:" + src.name));
  } catch (const std::exception& e) {
    for (auto& c : cells)
      c.error = e.what();
    return cells;
  }

  for (std::size_t pi = 0; pi < spec.noise_pairs.size(); ++pi) {
    const NoisePair& rates = spec.noise_pairs[pi];
    const std::string tag = pair_tag(src.name, rates);
    const Dataset noisy =
      corrupt_labels(parts->train, rates, master.derive(r, "corrupt:" + tag));

    std::optional<CondProbEstimate<double>> cond;
    std::string cond_error;
    bool cond_tried = false;
    auto posterior = [&]() -> const CondProbEstimate<double>& {
      if (!cond_tried) {
        cond_tried = true;
        try {
          cond = estimate_posterior(noisy, popt, master.derive(r, "posterior:" + tag));
        } catch (const std::exception& e) {
          cond_error = std::string("posterior estimation failed: ") + e.what();
        }
      }
      if (!cond)
        throw EstimationError(cond_error);
      return *cond;
    };

    for (std::size_t li = 0; li < n_loss; ++li) {
      const LearnerConfig learner{ spec.losses[li], spec.model, spec.train, popt };
      for (std::size_t mi = 0; mi < n_meth; ++mi) {
        auto& cell = cells[(pi * n_loss + li) * n_meth + mi];
        try {
          std::optional<TrainResult<double>> res;
          switch (spec.methods[mi]) {
            case Method::plain:
              res = train_erm(noisy, learner.loss, spec.model, spec.train);
              break;
            case Method::ld:
              res = train_label_dependent(noisy, rates, learner.loss, spec.model,
                                          spec.train);
              break;
            case Method::ub:
              res = train_unbiased(noisy, rates, learner.loss, spec.model, spec.train);
              break;
            case Method::iw:
              res = train_reweighted(noisy, posterior(), rates, learner);
              break;
            case Method::eiw:
              res = train_reweighted(noisy, posterior(),
                                     estimate_rates(posterior()).pair(), learner);
              break;
            case Method::iw_cv: {
              const auto est = cv_estimate_rates(
                noisy, spec.rate_grid, spec.cv_folds, learner,
                master.derive(r, "rate-cv:" + tag + ":" + to_string(learner.loss)));
              res = train_reweighted(noisy, posterior(), est.pair(), learner);
              break;
            }
          }
          cell.accuracy = accuracy(res->model, parts->test);
          cell.unconverged = !res->converged;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
    }
  }
  return cells;
}

struct RateCell
{
  double rho_plus = nan;
  double rho_minus = nan;
  std::string error;
  std::vector<std::string> warnings;
};

//! One repetition of the rate protocol; cells laid out as [pair][method].
std::vector<RateCell>
rate_repetition(const ExperimentSpec& spec,
                const DataSource& src,
                const Dataset& data,
                const PosteriorOptions& popt,
                int rep)
{
  const std::size_t n_meth = spec.rate_methods.size();
  std::vector<RateCell> cells(spec.noise_pairs.size() * n_meth);
  const SeededRng master(spec.seed);
  const auto r = static_cast<std::uint64_t>(rep);

  for (std::size_t pi = 0; pi < spec.noise_pairs.size(); ++pi) {
    const NoisePair& rates = spec.noise_pairs[pi];
    const std::string tag = pair_tag(src.name, rates);
    const Dataset noisy = corrupt_labels(data, rates, master.derive(r, "corrupt:" + tag));
    std::optional<CondProbEstimate<double>> cond;
    std::string cond_error;
    try {
      cond = estimate_posterior(noisy, popt, master.derive(r, "posterior:" + tag));
    } catch (const std::exception& e) {
      cond_error = std::string("posterior estimation failed: ") + e.what();
    }
    for (std::size_t mi = 0; mi < n_meth; ++mi) {
      auto& cell = cells[pi * n_meth + mi];
      try {
        RateEstimate est;
        const RateMethod m = spec.rate_methods[mi];
        if (m == RateMethod::cv) {
          const LearnerConfig learner{ spec.losses.front(), spec.model, spec.train,
                                       popt };
          est = cv_estimate_rates(noisy, spec.rate_grid, spec.cv_folds, learner,
                                  master.derive(r, "rate-cv:" + tag));
        } else {
          if (!cond)
            throw EstimationError(cond_error);
          est = m == RateMethod::min_posterior
                  ? estimate_rates(*cond)
                  : estimate_rates_quantile(*cond, spec.rate_quantile);
        }
        cell.rho_plus = est.rho_plus_hat;
        cell.rho_minus = est.rho_minus_hat;
        cell.warnings = est.warnings;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  }
  return cells;
}

void
require_some_success(const std::vector<double>& values,
                     const std::vector<std::string>& errors,
                     const std::string& what)
{
  if (summarize(values).count > 0)
    return;
  std::string first;
  for (const auto& e : errors)
    if (!e.empty()) {
      first = e;
      break;
    }
  throw std::runtime_error(what + " failed in every repetition: " + first);
}

std::string
rep_prefix(std::size_t rep)
{
  return "repetition " + std::to_string(rep) + ": ";
}

} // namespace

ResultTable
run_classification_experiment(const ExperimentSpec& spec, int jobs)
{
  spec.validate();
  ResultTable table;
  table.kind = ExperimentSpec::Kind::classification;
  const std::size_t n_loss = spec.losses.size();
  const std::size_t n_meth = spec.methods.size();

  for (const auto& src : spec.datasets) {
    const Dataset data = load_data(src, spec.seed);
    const PosteriorOptions popt = spec.posterior_for(data.dim());
    std::vector<std::vector<ClassificationCell>> reps(
      static_cast<std::size_t>(spec.repetitions));
    parallel_for(spec.repetitions, jobs, [&](int rep) {
      reps[static_cast<std::size_t>(rep)] =
        classification_repetition(spec, src, data, popt, rep);
    });

    for (std::size_t pi = 0; pi < spec.noise_pairs.size(); ++pi)
      for (std::size_t li = 0; li < n_loss; ++li)
        for (std::size_t mi = 0; mi < n_meth; ++mi) {
          const std::size_t c = (pi * n_loss + li) * n_meth + mi;
          ClassificationRow row;
          row.dataset = src.name;
          row.rates = spec.noise_pairs[pi];
          row.method = spec.methods[mi];
          row.loss = spec.losses[li];
          row.model_kind = spec.model.kind;
          int unconverged = 0;
          for (std::size_t rep = 0; rep < reps.size(); ++rep) {
            const auto& cell = reps[rep][c];
            row.accuracies.push_back(cell.accuracy);
            row.errors.push_back(cell.error);
            unconverged += cell.unconverged ? 1 : 0;
          }
          const std::string what = src.name + " " + pair_label(row.rates) + " " +
                                   to_string(row.method) + "/" + to_string(row.loss);
          require_some_success(row.accuracies, row.errors, what);
          for (std::size_t rep = 0; rep < row.errors.size(); ++rep)
            if (!row.errors[rep].empty())
              table.warnings.push_back(what + " " + rep_prefix(rep) + row.errors[rep]);
          if (unconverged > 0)
            table.warnings.push_back(what + ": training hit the iteration limit in " +
                                     std::to_string(unconverged) + " repetition(s)");
          table.classification.push_back(std::move(row));
        }
  }
  return table;
}

ResultTable
run_rate_experiment(const ExperimentSpec& spec, int jobs)
{
  spec.validate();
  ResultTable table;
  table.kind = ExperimentSpec::Kind::rates;
  const std::size_t n_meth = spec.rate_methods.size();

  for (const auto& src : spec.datasets) {
    const Dataset data = load_data(src, spec.seed);
    const PosteriorOptions popt = spec.posterior_for(data.dim());
    std::vector<std::vector<RateCell>> reps(static_cast<std::size_t>(spec.repetitions));
    parallel_for(spec.repetitions, jobs, [&](int rep) {
      reps[static_cast<std::size_t>(rep)] = rate_repetition(spec, src, data, popt, rep);
    });

    for (std::size_t pi = 0; pi < spec.noise_pairs.size(); ++pi)
      for (std::size_t mi = 0; mi < n_meth; ++mi) {
        RateRow row;
        row.dataset = src.name;
        row.rates = spec.noise_pairs[pi];
        row.method = spec.rate_methods[mi];
        row.posterior = popt.method;
        const std::string what =
          src.name + " " + pair_label(row.rates) + " " + to_string(row.method);
        for (std::size_t rep = 0; rep < reps.size(); ++rep) {
          const auto& cell = reps[rep][pi * n_meth + mi];
          row.rho_plus_hat.push_back(cell.rho_plus);
          row.rho_minus_hat.push_back(cell.rho_minus);
          row.errors.push_back(cell.error);
          if (!cell.error.empty())
            table.warnings.push_back(what + " " + rep_prefix(rep) + cell.error);
          for (const auto& w : cell.warnings)
            table.warnings.push_back(what + " " + rep_prefix(rep) + w);
        }
        require_some_success(row.rho_plus_hat, row.errors, what);
        table.rates.push_back(std::move(row));
      }
  }
  return table;
}

ResultTable
run_experiment(const ExperimentSpec& spec, int jobs)
{
  return spec.kind == ExperimentSpec::Kind::rates
           ? run_rate_experiment(spec, jobs)
           : run_classification_experiment(spec, jobs);
}

namespace {

std::string
joined(const std::vector<double>& values)
{
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i)
      s += ';';
    s += format_number(values[i]);
  }
  return s;
}

} // namespace

void
write_csv(std::ostream& out, const ResultTable& table)
{
  if (table.kind == ExperimentSpec::Kind::classification) {
    out << "dataset,rho_plus,rho_minus,method,loss,model_kind,mean_acc,std_acc,rep_accs\n";
    for (const auto& row : table.classification) {
      const Summary s = summarize(row.accuracies);
      out << row.dataset << ',' << format_number(row.rates.rho_plus) << ','
          << format_number(row.rates.rho_minus) << ',' << to_string(row.method) << ','
          << to_string(row.loss) << ',' << to_string(row.model_kind) << ','
          << format_number(s.mean) << ',' << format_number(s.std) << ','
          << joined(row.accuracies) << '\n';
    }
    return;
  }
  out << "dataset,rho_plus,rho_minus,method,posterior,mean_rho_plus_hat,"
         "std_rho_plus_hat,mean_rho_minus_hat,std_rho_minus_hat,"
         "rep_rho_plus_hats,rep_rho_minus_hats\n";
  for (const auto& row : table.rates) {
    const Summary p = summarize(row.rho_plus_hat);
    const Summary m = summarize(row.rho_minus_hat);
    out << row.dataset << ',' << format_number(row.rates.rho_plus) << ','
        << format_number(row.rates.rho_minus) << ',' << to_string(row.method) << ','
        << to_string(row.posterior) << ',' << format_number(p.mean) << ','
        << format_number(p.std) << ',' << format_number(m.mean) << ','
        << format_number(m.std) << ',' << joined(row.rho_plus_hat) << ','
        << joined(row.rho_minus_hat) << '\n';
  }
}

void
write_summary(std::ostream& out, const ResultTable& table)
{
  for (const auto& row : table.classification) {
    const Summary s = summarize(row.accuracies);
    out << row.dataset << ' ' << pair_label(row.rates) << ' ' << to_string(row.method)
        << '/' << to_string(row.loss) << ": accuracy " << format_number(s.mean, 4)
        << " +- " << format_number(s.std, 2);
    if (s.count < static_cast<int>(row.accuracies.size()))
      out << " (" << row.accuracies.size() - static_cast<std::size_t>(s.count)
          << " failed)";
    out << '\n';
  }
  for (const auto& row : table.rates) {
    const Summary p = summarize(row.rho_plus_hat);
    const Summary m = summarize(row.rho_minus_hat);
    out << row.dataset << " true " << pair_label(row.rates) << ' '
        << to_string(row.method) << '/' << to_string(row.posterior) << ": ("
        << format_number(p.mean, 3) << " +- " << format_number(p.std, 2) << ", "
        << format_number(m.mean, 3) << " +- " << format_number(m.std, 2) << ")\n";
  }
}

RiskIdentityReport
risk_identity_check(const Dataset& clean,
                    const Vector<double>& clean_positive,
                    const NoisePair& rates,
                    const ClassifierModel<double>& model,
                    Loss loss,
                    int repetitions,
                    SeededRng rng)
{
  rates.validate();
  if (repetitions < 1)
    throw std::invalid_argument("repetitions must be at least 1");
  if (clean_positive.size() != clean.size())
    throw std::invalid_argument("posterior count differs from example count");
  const Vector<double> f = model.decision_values(clean.features());
  const Index n = clean.size();
  double clean_risk = 0.0;
  for (Index i = 0; i < n; ++i)
    clean_risk += loss_value(loss, f(i), clean.labels()(i));
  clean_risk /= static_cast<double>(n);

  const Vector<double> noisy_pos = noisy_posterior(clean_positive, rates);
  RiskIdentityReport rep;
  for (int r = 0; r < repetitions; ++r) {
    const Dataset noisy =
      corrupt_labels(clean, rates, rng.derive(static_cast<std::uint64_t>(r), "corrupt"));
    const Labels& y = noisy.labels();
    Vector<double> observed(n);
    for (Index i = 0; i < n; ++i)
      observed(i) = y(i) > 0 ? noisy_pos(i) : 1.0 - noisy_pos(i);
    const Vector<double> beta = compute_beta(y, observed, rates);
    double weighted = 0.0;
    for (Index i = 0; i < n; ++i)
      if (beta(i) != 0.0)
        weighted += beta(i) * loss_value(loss, f(i), y(i));
    weighted /= static_cast<double>(n);
    rep.differences.push_back(weighted - clean_risk);
  }
  const Summary s = summarize(rep.differences);
  rep.mean = s.mean;
  rep.ci_half_width = 1.96 * s.std / std::sqrt(static_cast<double>(repetitions));
  return rep;
}

} // namespace rcn

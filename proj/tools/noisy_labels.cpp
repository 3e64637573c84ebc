//! noisy-labels: command-line front end for the rcn library.

#include "rcn/config.hpp"
#include "rcn/csv.hpp"
#include "rcn/experiment.hpp"
#include "rcn/metrics.hpp"
#include "rcn/noise_rates.hpp"
#include "rcn/posterior_io.hpp"
#include "rcn/trainer.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace rcn;

//! Bad flag values found after parsing; exit code 2.
struct UsageError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct Shared
{
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
  int jobs = 1;
  bool quiet = false;
  bool header = false;
};

std::uint64_t
resolve_seed(const Shared& sh, std::optional<std::uint64_t> from_config = {})
{
  if (sh.seed)
    return *sh.seed;
  if (from_config)
    return *from_config;
  if (const char* env = std::getenv("NOISY_LABELS_SEED")) {
    const std::string s = env;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || s[0] == '-')
      throw UsageError("NOISY_LABELS_SEED must be a nonnegative integer, got '" + s +
                       "'");
    return v;
  }
  return 0;
}

//! Sends `text` to --out, or to stdout when no path was given.
void
emit(const Shared& sh, const std::string& text)
{
  if (sh.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(sh.out, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot write '" + sh.out + "'");
  f << text;
  if (!f)
    throw std::runtime_error("write to '" + sh.out + "' failed");
}

//! Summaries go to stdout only when the data went to a file.
bool
chatty(const Shared& sh)
{
  return !sh.quiet && !sh.out.empty();
}

NoisePair
checked_pair(double rp, double rm)
{
  NoisePair p{ rp, rm };
  if (!p.valid())
    throw UsageError("invalid noise rates --rho-plus " + format_number(rp) +
                     " --rho-minus " + format_number(rm) +
                     ": each must lie in [0, 1) and their sum must be below 1");
  return p;
}

template <typename T, typename Parse>
T
checked(const std::string& flag, const std::string& value, Parse parse)
{
  try {
    return parse(value);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Label-noise-robust classification by importance reweighting" };
  app.require_subcommand(1);
  app.fallthrough();
  Shared sh;
  app.add_option("--seed", sh.seed, "Master seed (default: config, then $NOISY_LABELS_SEED, then 0)");
  app.add_option("--out", sh.out, "Output file (default: stdout)");
  app.add_option("--config", sh.config, "Experiment config file");
  app.add_option("--jobs", sh.jobs, "Worker threads for repetitions")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", sh.quiet, "Suppress summaries");
  app.add_flag("--csv-header", sh.header, "Write a header line in dataset CSVs");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate hyperplane-labelled uniform data");
  long long synth_n = 1000, synth_m = 2;
  synth->add_option("--n", synth_n, "Number of points")->check(CLI::PositiveNumber);
  synth->add_option("--m", synth_m, "Dimension")->check(CLI::PositiveNumber);

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "Flip labels under asymmetric noise");
  std::string corrupt_in;
  double corrupt_rp = 0, corrupt_rm = 0;
  corrupt->add_option("--in", corrupt_in, "Input CSV")->required();
  corrupt->add_option("--rho-plus", corrupt_rp, "P(flip | clean +1)")->required();
  corrupt->add_option("--rho-minus", corrupt_rm, "P(flip | clean -1)")->required();

  // estimate-rates
  auto* est = app.add_subcommand("estimate-rates", "Estimate flip rates from noisy data");
  std::string est_in, est_post = "kde", est_width, est_rate = "min-posterior";
  double est_eps = 1e-3, est_q = 0.0;
  est->add_option("--in", est_in, "Noisy CSV")->required();
  est->add_option("--posterior", est_post, "Posterior estimator")
    ->check(CLI::IsMember({ "kde", "kliep", "lsif" }));
  est->add_option("--width-rule", est_width,
                  "Kernel width: stddev, median, cv or fixed:<w> (default stddev for "
                  "kde, median otherwise)");
  est->add_option("--epsilon", est_eps, "Posterior clamp");
  est->add_option("--rate-method", est_rate, "Rate estimator")
    ->check(CLI::IsMember({ "min-posterior", "quantile", "cv" }));
  est->add_option("--quantile", est_q, "Quantile level for --rate-method quantile");
  std::string est_save;
  est->add_option("--save-posterior", est_save, "Write the fitted posterior here");

  // train
  auto* train = app.add_subcommand("train", "Train a classifier on noisy data");
  std::string tr_in, tr_method = "plain", tr_loss = "logistic", tr_model = "linear",
                     tr_post = "kde";
  double tr_rp = 0, tr_rm = 0, tr_width = 1.0, tr_lambda = 1e-3;
  int tr_iter = 1000;
  train->add_option("--in", tr_in, "Training CSV")->required();
  train->add_option("--method", tr_method, "Training method")
    ->check(CLI::IsMember({ "plain", "ld", "ub", "iw", "iw-cv", "eiw" }));
  train->add_option("--loss", tr_loss, "Surrogate loss")
    ->check(CLI::IsMember({ "logistic", "hinge", "square", "asym-exp" }));
  train->add_option("--model", tr_model, "Model kind")
    ->check(CLI::IsMember({ "linear", "kernel" }));
  train->add_option("--kernel-width", tr_width, "Gaussian kernel width")
    ->check(CLI::PositiveNumber);
  train->add_option("--rho-plus", tr_rp, "Known rho_plus (ld, ub, iw)");
  train->add_option("--rho-minus", tr_rm, "Known rho_minus (ld, ub, iw)");
  train->add_option("--lambda", tr_lambda, "Regularisation")->check(CLI::NonNegativeNumber);
  train->add_option("--max-iter", tr_iter, "Iteration limit")->check(CLI::PositiveNumber);
  train->add_option("--posterior", tr_post, "Posterior estimator (iw, iw-cv, eiw)")
    ->check(CLI::IsMember({ "kde", "kliep", "lsif" }));

  // predict
  auto* pred = app.add_subcommand("predict", "Apply a trained model");
  std::string pr_model, pr_in;
  pred->add_option("--model", pr_model, "Model file")->required();
  pred->add_option("--in", pr_in, "CSV of points (labels used for accuracy)")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a config-driven experiment");
  std::string exp_config;
  std::vector<std::string> exp_set;
  exp->add_option("config", exp_config, "Config file (or use --config)");
  exp->add_option("--set", exp_set, "Override a setting, key=value");

  // risk-check
  auto* risk = app.add_subcommand("risk-check",
                                  "Compare clean and reweighted noisy risk of a fixed model");
  long long rk_n = 100000, rk_m = 2;
  double rk_rp = 0.3, rk_rm = 0.1;
  int rk_reps = 20;
  std::string rk_loss = "logistic";
  risk->add_option("--n", rk_n, "Number of points")->check(CLI::PositiveNumber);
  risk->add_option("--m", rk_m, "Dimension")->check(CLI::PositiveNumber);
  risk->add_option("--rho-plus", rk_rp, "True rho_plus");
  risk->add_option("--rho-minus", rk_rm, "True rho_minus");
  risk->add_option("--repetitions", rk_reps, "Corrupted copies")->check(CLI::PositiveNumber);
  risk->add_option("--loss", rk_loss, "Loss")
    ->check(CLI::IsMember({ "logistic", "hinge", "square", "asym-exp", "zero-one" }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      const auto data = generate_synthetic<double>(
        synth_n, synth_m, SeededRng(resolve_seed(sh)).derive("data"));
      std::ostringstream os;
      write_csv(os, data, sh.header);
      emit(sh, os.str());
      if (chatty(sh))
        std::cout << "wrote " << data.size() << " points in " << data.dim()
                  << " dimensions to " << sh.out << '\n';
    } else if (corrupt->parsed()) {
      const NoisePair rates = checked_pair(corrupt_rp, corrupt_rm);
      const std::uint64_t seed = resolve_seed(sh);
      const auto data = load_csv(corrupt_in);
      const auto noisy = corrupt_labels(data, rates, SeededRng(seed).derive("corrupt"));
      std::ostringstream os;
      write_csv(os, noisy, sh.header);
      emit(sh, os.str());
      if (chatty(sh))
        std::cout << "flipped " << (noisy.labels().array() != data.labels().array()).count()
                  << " of " << data.size() << " labels\n";
    } else if (est->parsed()) {
      PosteriorOptions opt;
      opt.method = parse_posterior_method(est_post);
      opt.epsilon = est_eps;
      if (!(est_eps >= 0 && est_eps < 0.5))
        throw UsageError("--epsilon must lie in [0, 0.5)");
      if (!est_width.empty()) {
        const auto rule = checked<WidthRule>("--width-rule", est_width, parse_width_rule);
        (opt.method == PosteriorMethod::kde ? opt.kde_width : opt.ratio_width) = rule;
      }
      const RateMethod rm = parse_rate_method(est_rate);
      if (rm == RateMethod::quantile && !(est_q >= 0 && est_q <= 0.1))
        throw UsageError("--quantile must lie in [0, 0.1]");
      const SeededRng rng(resolve_seed(sh));
      const auto data = load_csv(est_in);
      RateEstimate r;
      if (rm == RateMethod::cv) {
        LearnerConfig learner;
        learner.posterior = opt;
        r = cv_estimate_rates(data, default_rate_grid(), 3, learner, rng.derive("rate-cv"));
      } else {
        const auto cond = estimate_posterior(data, opt, rng.derive("posterior"));
        if (!est_save.empty()) {
          std::ofstream pf(est_save);
          if (!pf)
            throw std::runtime_error("cannot write '" + est_save + "'");
          save_posterior(pf, cond);
        }
        r = rm == RateMethod::min_posterior ? estimate_rates(cond)
                                            : estimate_rates_quantile(cond, est_q);
      }
      for (const auto& w : r.warnings)
        std::cerr << "warning: " << w << '\n';
      std::ostringstream os;
      os << "method,posterior,rho_plus_hat,rho_minus_hat\n"
         << to_string(r) << ',' << est_post << ',' << format_number(r.rho_plus_hat)
         << ',' << format_number(r.rho_minus_hat) << '\n';
      if (!sh.quiet)
        std::cout << "rho_plus_hat " << format_number(r.rho_plus_hat) << "\nrho_minus_hat "
                  << format_number(r.rho_minus_hat) << '\n';
      if (!sh.out.empty())
        emit(sh, os.str());
      else if (sh.quiet)
        std::cout << os.str();
    } else if (train->parsed()) {
      const NoisePair rates = checked_pair(tr_rp, tr_rm);
      const Method method = parse_method(tr_method);
      LearnerConfig learner;
      learner.loss = parse_loss(tr_loss);
      learner.model = { parse_model_kind(tr_model), tr_width };
      learner.train.lambda = tr_lambda;
      learner.train.max_iter = tr_iter;
      learner.posterior.method = parse_posterior_method(tr_post);
      const SeededRng rng(resolve_seed(sh));
      const auto data = load_csv(tr_in);
      std::optional<TrainResult<double>> res;
      switch (method) {
        case Method::plain:
          res = train_erm(data, learner.loss, learner.model, learner.train);
          break;
        case Method::ld:
          res = train_label_dependent(data, rates, learner.loss, learner.model,
                                      learner.train);
          break;
        case Method::ub:
          res = train_unbiased(data, rates, learner.loss, learner.model, learner.train);
          break;
        case Method::iw:
        case Method::eiw:
        case Method::iw_cv: {
          const auto cond = estimate_posterior(data, learner.posterior, rng.derive("posterior"));
          NoisePair used = rates;
          if (method == Method::eiw)
            used = estimate_rates(cond).pair();
          else if (method == Method::iw_cv)
            used = cv_estimate_rates(data, default_rate_grid(), 3, learner,
                                     rng.derive("rate-cv"))
                     .pair();
          res = train_reweighted(data, cond, used, learner);
          if (!sh.quiet && method != Method::iw)
            std::cerr << "rates used: (" << format_number(used.rho_plus) << ", "
                      << format_number(used.rho_minus) << ")\n";
          break;
        }
      }
      ModelInfo info{ tr_method, tr_loss, res->converged, res->nonconvex,
                      res->iterations, res->objective };
      std::ostringstream os;
      save_model(os, res->model, info);
      emit(sh, os.str());
      if (!res->converged)
        std::cerr << "warning: training stopped at the iteration limit\n";
      if (res->nonconvex)
        std::cerr << "warning: the training objective is not convex\n";
      if (chatty(sh))
        std::cout << "trained " << tr_method << '/' << tr_loss << " in " << res->iterations
                  << " iterations, objective " << format_number(res->objective)
                  << ", training accuracy " << format_number(accuracy(res->model, data))
                  << '\n';
    } else if (pred->parsed()) {
      std::ifstream mf(pr_model);
      if (!mf)
        throw std::runtime_error("cannot open model '" + pr_model + "'");
      const auto model = load_model(mf);
      const auto data = load_csv(pr_in);
      const auto f = model.decision_values(data.features());
      std::ostringstream os;
      os << "decision,label\n";
      for (Index i = 0; i < f.size(); ++i)
        os << format_number(f(i)) << ',' << (f(i) >= 0 ? 1 : -1) << '\n';
      emit(sh, os.str());
      if (chatty(sh))
        std::cout << "accuracy " << format_number(accuracy(model, data)) << '\n';
    } else if (exp->parsed()) {
      std::string path = !exp_config.empty() ? exp_config : sh.config;
      if (path.empty())
        throw UsageError("experiment needs a config file");
      ParsedConfig cfg = load_config(path);
      for (const auto& s : exp_set)
        apply_assignment(cfg, s, 0,
                         std::filesystem::current_path().string());
      cfg.spec.seed = resolve_seed(
        sh, cfg.seed_set ? std::optional<std::uint64_t>(cfg.spec.seed) : std::nullopt);
      const ResultTable table = run_experiment(cfg.spec, sh.jobs);
      std::ostringstream os;
      write_csv(os, table);
      emit(sh, os.str());
      if (!sh.quiet)
        for (const auto& w : table.warnings)
          std::cerr << "warning: " << w << '\n';
      if (chatty(sh)) {
        std::cout << cfg.spec.name << " (seed " << cfg.spec.seed << ")\n";
        write_summary(std::cout, table);
      }
    } else if (risk->parsed()) {
      const NoisePair rates = checked_pair(rk_rp, rk_rm);
      const SeededRng rng(resolve_seed(sh));
      const auto data = generate_synthetic<double>(rk_n, rk_m, rng.derive("data"));
      Vector<double> clean_pos(data.size());
      for (Index i = 0; i < data.size(); ++i)
        clean_pos(i) = data.labels()(i) > 0 ? 1.0 : 0.0;
      // a fixed, deliberately imperfect linear model
      Vector<double> w = Vector<double>::LinSpaced(rk_m, 1.0, 2.0);
      const ClassifierModel<double> model(
        LinearModel<double>{ w, -0.5 * w.sum() + 0.1 });
      const auto rep = risk_identity_check(data, clean_pos, rates, model,
                                           parse_loss(rk_loss), rk_reps, rng.derive("risk"));
      std::ostringstream os;
      os << "repetition,difference\n";
      for (std::size_t i = 0; i < rep.differences.size(); ++i)
        os << i << ',' << format_number(rep.differences[i]) << '\n';
      emit(sh, os.str());
      if (!sh.quiet)
        (sh.out.empty() ? std::cerr : std::cout)
          << "mean difference " << format_number(rep.mean) << " +- "
          << format_number(rep.ci_half_width) << " (95%)\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

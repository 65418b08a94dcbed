#include "dlcluster/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dlcluster/em.hpp"
#include "dlcluster/io.hpp"
#include "dlcluster/metrics.hpp"
#include "dlcluster/plot.hpp"
#include "dlcluster/synth.hpp"
#include "dlcluster/trainer.hpp"

namespace dlcluster {

namespace {

namespace fs = std::filesystem;

struct FitArgs {
  std::string input;
  std::size_t k = 0;
  std::string trainer = "mcmarg";
  std::string init = "kmeans";
  std::uint64_t seed = 0;
  std::optional<std::size_t> iters;
  double lr = TrainConfig{}.lr;
  std::size_t unit_vectors = TrainConfig{}.unit_vectors_per_step;
  std::size_t grid_size = TrainConfig{}.grid_size;
  double wsd_weight = TrainConfig{}.wsd_weight;
  std::size_t patience = TrainConfig{}.plateau_patience;
  double plateau_tol = TrainConfig{}.plateau_tol;
  std::size_t restarts = 1;
  double em_tol = EmConfig{}.tol;
  double var_floor = EmConfig{}.var_floor;
  std::string mode = "posterior";
  std::string model_out, labels_out, log_out;
};

struct AssignArgs {
  std::string model, input, mode = "posterior", labels_out;
};

struct EvalArgs {
  std::string truth, pred, report_out;
};

struct SynthArgs {
  std::size_t k = 4;
  std::vector<std::size_t> counts{500};
  double sep = 5.0;
  double var = 1.0;
  std::uint64_t seed = 0;
  std::string out, labels_out;
};

struct PlotArgs {
  std::string input, labels, out;
};

const std::map<std::string, InitMethod> kInitMap{{"kmeans", InitMethod::kmeans}, {"random", InitMethod::random}};
const std::map<std::string, AssignMode> kModeMap{{"posterior", AssignMode::posterior},
                                                 {"density", AssignMode::density}};

int run_fit(const FitArgs& a, std::ostream& out) {
  const Dataset data = load_dataset(a.input);
  const InitMethod init = kInitMap.at(a.init);
  std::optional<Gmm> model;
  std::string log;
  if (a.trainer == "mcmarg") {
    TrainConfig config;
    config.k = a.k;
    config.iters = a.iters.value_or(config.iters);
    config.lr = a.lr;
    config.unit_vectors_per_step = a.unit_vectors;
    config.wsd_weight = a.wsd_weight;
    config.grid_size = a.grid_size;
    config.init = init;
    config.seed = a.seed;
    config.plateau_patience = a.patience;
    config.plateau_tol = a.plateau_tol;
    config.kmeans_restarts = a.restarts;
    const TrainReport report = fit(data, config);
    std::ostringstream buf;
    write_train_log(buf, report.history);
    log = buf.str();
    model = report.final_model;
    const IterationRecord& last = report.history.back();
    out << "mcmarg: " << report.iterations_run << " iterations ("
        << (report.stop_reason == StopReason::plateau ? "plateau" : "max_iters") << "), kl=" << last.kl
        << ", wsd=" << last.wsd << ", total=" << last.total << '\n';
  } else {
    EmConfig config;
    config.k = a.k;
    config.max_iters = a.iters.value_or(config.max_iters);
    config.tol = a.em_tol;
    config.var_floor = a.var_floor;
    config.init = init;
    config.seed = a.seed;
    config.kmeans_restarts = a.restarts;
    const EmResult result = em_fit(data, config);
    std::ostringstream buf;
    write_em_log(buf, result.history);
    log = buf.str();
    model = result.model;
    out << "em: " << result.history.size() - 1 << " iterations ("
        << (result.converged ? "converged" : "max_iters") << "), loglik=" << result.history.back().log_likelihood
        << '\n';
  }

  // Labels come from the serialized model so that `assign` on the saved file reproduces them.
  const std::string json = model_to_json(*model);
  const Gmm saved = model_from_json(json);
  const Assignment assignment = assign(saved, data, kModeMap.at(a.mode));
  if (!a.model_out.empty()) write_file(a.model_out, json);
  if (!a.labels_out.empty()) save_labels(a.labels_out, assignment.labels);
  if (!a.log_out.empty()) write_file(a.log_out, log);
  if (data.has_labels()) {
    const MetricsReport r = evaluate_labels(*data.labels(), assignment.labels);
    out << "acc=" << r.acc << " nmi=" << r.nmi << " ari=" << r.ari << '\n';
  }
  return 0;
}

int run_assign(const AssignArgs& a, std::ostream& out) {
  const Gmm model = load_model(a.model);
  const Dataset data = load_dataset(a.input);
  const Assignment assignment = assign(model, data, kModeMap.at(a.mode));
  if (a.labels_out.empty()) {
    write_labels(out, assignment.labels);
  } else {
    save_labels(a.labels_out, assignment.labels);
  }
  return 0;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const Labels truth = load_labels(a.truth);
  const Labels pred = load_labels(a.pred);
  const std::string json = report_to_json(evaluate_labels(truth, pred));
  if (!a.report_out.empty()) write_file(a.report_out, json);
  out << json;
  return 0;
}

int run_synth_blobs(const SynthArgs& a, std::ostream& out) {
  if (a.counts.size() != 1 && a.counts.size() != a.k) {
    throw std::invalid_argument("synth blobs: --counts needs 1 or k=" + std::to_string(a.k) + " values");
  }
  std::vector<std::size_t> counts = a.counts;
  if (counts.size() == 1) counts.assign(a.k, a.counts.front());
  const Matrix means = lattice_means(a.k, a.sep);
  const Matrix vars = Matrix::Constant(means.rows(), means.cols(), a.var);
  Rng rng(a.seed);
  const Dataset data = make_blobs(rng, counts, means, vars);
  save_dataset(a.out, data, format_from_path(a.out));
  if (!a.labels_out.empty()) save_labels(a.labels_out, *data.labels());
  out << "wrote " << data.size() << " points in " << a.k << " blobs to " << a.out << '\n';
  return 0;
}

int run_plot(const PlotArgs& a, std::ostream& out) {
  const Dataset data = load_dataset(a.input);
  const Labels labels = load_labels(a.labels);
  write_file(a.out, render_scatter_svg(data, labels));
  out << "wrote " << a.out << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distribution-learning clustering with Gaussian mixtures", "dlcluster"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a Gaussian mixture and label the data");
  fit_cmd->add_option("--input", fit_args.input, "Dataset (.csv or .bin)")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--k", fit_args.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--trainer", fit_args.trainer, "mcmarg or em")
      ->check(CLI::IsMember({"mcmarg", "em"}))
      ->capture_default_str();
  fit_cmd->add_option("--init", fit_args.init, "Mean initialization")
      ->check(CLI::IsMember({"kmeans", "random"}))
      ->capture_default_str();
  fit_cmd->add_option("--seed", fit_args.seed, "Random seed")->capture_default_str();
  fit_cmd->add_option("--iters", fit_args.iters, "Maximum iterations (default 5000 for mcmarg, 200 for em)");
  fit_cmd->add_option("--lr", fit_args.lr, "Adam learning rate")->capture_default_str();
  fit_cmd->add_option("--unit-vectors", fit_args.unit_vectors, "Directions per step")->capture_default_str();
  fit_cmd->add_option("--grid-size", fit_args.grid_size, "Points per marginal grid")->capture_default_str();
  fit_cmd->add_option("--wsd-weight", fit_args.wsd_weight, "Weight of the weight-std penalty")->capture_default_str();
  fit_cmd->add_option("--patience", fit_args.patience, "Plateau patience (iterations)")->capture_default_str();
  fit_cmd->add_option("--plateau-tol", fit_args.plateau_tol, "Minimum improvement of the best loss")
      ->capture_default_str();
  fit_cmd->add_option("--restarts", fit_args.restarts, "k-means restarts")->capture_default_str();
  fit_cmd->add_option("--tol", fit_args.em_tol, "EM stopping tolerance (mean log-likelihood)")->capture_default_str();
  fit_cmd->add_option("--var-floor", fit_args.var_floor, "EM variance floor")->capture_default_str();
  fit_cmd->add_option("--mode", fit_args.mode, "Assignment rule for --labels-out")
      ->check(CLI::IsMember({"posterior", "density"}))
      ->capture_default_str();
  fit_cmd->add_option("--model-out", fit_args.model_out, "Model JSON output");
  fit_cmd->add_option("--labels-out", fit_args.labels_out, "Labels output");
  fit_cmd->add_option("--log-out", fit_args.log_out, "Training log CSV output");

  AssignArgs assign_args;
  CLI::App* assign_cmd = app.add_subcommand("assign", "Label data with a saved model");
  assign_cmd->add_option("--model", assign_args.model, "Model JSON")->required()->check(CLI::ExistingFile);
  assign_cmd->add_option("--input", assign_args.input, "Dataset (.csv or .bin)")->required()->check(CLI::ExistingFile);
  assign_cmd->add_option("--mode", assign_args.mode, "posterior or density")
      ->check(CLI::IsMember({"posterior", "density"}))
      ->capture_default_str();
  assign_cmd->add_option("--labels-out", assign_args.labels_out, "Labels output (stdout if omitted)");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predicted labels against ground truth");
  eval_cmd->add_option("--true", eval_args.truth, "Ground-truth labels")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", eval_args.pred, "Predicted labels")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--report-out", eval_args.report_out, "Metrics JSON output");

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate synthetic data");
  synth_cmd->require_subcommand(1);
  CLI::App* blobs_cmd = synth_cmd->add_subcommand("blobs", "Gaussian blobs on a square lattice");
  blobs_cmd->add_option("--k", synth_args.k, "Number of blobs")->capture_default_str()->check(CLI::PositiveNumber);
  blobs_cmd->add_option("--counts", synth_args.counts, "Points per blob (one value or k values)")
      ->capture_default_str()
      ->delimiter(',');
  blobs_cmd->add_option("--sep", synth_args.sep, "Half the spacing between neighbouring centers")
      ->capture_default_str();
  blobs_cmd->add_option("--var", synth_args.var, "Per-coordinate variance")->capture_default_str();
  blobs_cmd->add_option("--seed", synth_args.seed, "Random seed")->capture_default_str();
  blobs_cmd->add_option("--out", synth_args.out, "Dataset output (.csv or .bin)")->required();
  blobs_cmd->add_option("--labels-out", synth_args.labels_out, "Generator labels output");

  PlotArgs plot_args;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Scatter plot of 2-D clustered data as SVG");
  plot_cmd->add_option("--input", plot_args.input, "Dataset")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--labels", plot_args.labels, "Labels")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_args.out, "SVG output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*fit_cmd) return run_fit(fit_args, out);
    if (*assign_cmd) return run_assign(assign_args, out);
    if (*eval_cmd) return run_eval(eval_args, out);
    if (*blobs_cmd) return run_synth_blobs(synth_args, out);
    if (*plot_cmd) return run_plot(plot_args, out);
  } catch (const std::exception& e) {
    err << "dlcluster: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace dlcluster

// Command-line front end for the FLoST tensor completion pipeline:
// generate | truncate | sample | fit | tune | evaluate.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "flost/dft.hpp"
#include "flost/errors.hpp"
#include "flost/estimator.hpp"
#include "flost/io.hpp"
#include "flost/metrics.hpp"
#include "flost/synthesis.hpp"
#include "flost/tuning.hpp"

namespace {

using namespace flost;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Exit codes: 0 ok, 2 usage, 3 file access, 4 file format,
// 5 invalid or inconsistent inputs, 6 numeric failure, 1 unexpected.
enum ExitCode {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kFileAccess = 3,
  kFileFormat = 4,
  kInvalidInput = 5,
  kNumeric = 6,
};

struct GenerateArgs {
  index_t m = 0, n = 0, t = 0, rank = 0, k = 0, sparsity = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct TruncateArgs {
  std::string input, out;
  index_t rank = 0, k = 0, sparsity = 0;
};

struct SampleArgs {
  std::string input, out;
  double p = 1.0, sigma = 0.0;
  std::uint64_t seed = 0;
};

struct FitArgs {
  std::string obs, out_tensor, out_model;
  index_t k = 1;
  double lambda1_scale = 1.0, lambda2_scale = 1.0;
  double lambda1 = -1.0, lambda2 = -1.0;
  double c1 = 1.0, c2 = 1.0, sigma_gamma = 1.0;
  double p_override = -1.0;
  bool estimate_p = false;
  int threads = 0;
};

struct TuneArgs {
  std::string obs, report;
  index_t k = 1;
  double grid_log_min = 0.0, grid_log_max = 1.0;
  index_t grid_steps = 5;
  double holdout = 0.10;
  std::uint64_t seed = 0;
  double c1 = 1.0, c2 = 1.0, sigma_gamma = 1.0;
  double p_override = -1.0;
  bool estimate_p = false;
  int threads = 0;
};

struct EvaluateArgs {
  std::string estimate, truth, obs, model, report;
  index_t chunk_len = 0;
  std::vector<double> quantiles = {0.0, 0.75, 0.95, 0.99};
};

ObservationSet load_observations(const std::string& path, double p_override, bool estimate_p) {
  ObservationSet obs = read_observations(path);
  if (p_override >= 0.0) {
    obs.p = p_override;
    obs.p_source = PSource::Given;
  }
  if (estimate_p) obs.p_source = PSource::Estimated;
  obs.validate();
  return obs;
}

void run_generate(const GenerateArgs& a) {
  SynthesisSpec spec{{a.m, a.n, a.t}, a.rank, a.k, a.sparsity, a.seed};
  write_tensor(a.out, generate_flost_truth(spec));
}

void run_truncate(const TruncateArgs& a) {
  write_tensor(a.out, flost_truncate(read_tensor(a.input), a.rank, a.k, a.sparsity));
}

void run_sample(const SampleArgs& a) {
  const DenseTensor3 x = read_tensor(a.input);
  write_observations(a.out, sample_observations(x, SamplingSpec{a.p, a.sigma, a.seed}));
}

void run_fit(const FitArgs& a) {
  const ObservationSet obs = load_observations(a.obs, a.p_override, a.estimate_p);
  const double p_eff = effective_sampling_rate(obs);
  RegularizationConfig cfg;
  if (a.lambda1 >= 0.0 || a.lambda2 >= 0.0) {
    if (a.lambda1 < 0.0 || (a.k < SliceIndexPlan::half_slices(obs.dims.t) && a.lambda2 < 0.0))
      throw std::invalid_argument("fit: --lambda1 and --lambda2 must be given together");
    cfg.k = a.k;
    cfg.lambda1.assign(a.k, a.lambda1);
    cfg.lambda2 = std::max(a.lambda2, 0.0);
    cfg.c1 = a.c1;
    cfg.c2 = a.c2;
    cfg.sigma_gamma = a.sigma_gamma;
  } else {
    cfg = theorem_lambda_schedule(obs.dims.m, obs.dims.n, obs.dims.t, p_eff, a.sigma_gamma, a.c1,
                                  a.c2, a.k)
              .scaled(a.lambda1_scale, a.lambda2_scale);
  }
  const auto start = Clock::now();
  const FlostModel model = fit(obs, cfg, a.threads);
  const DenseTensor3 estimate = reconstruct(model);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::fprintf(stderr, "fit: %lldx%lldx%lld K=%lld p=%.4g lambda1=%.6g lambda2=%.6g in %.3f s\n",
               static_cast<long long>(obs.dims.m), static_cast<long long>(obs.dims.n),
               static_cast<long long>(obs.dims.t), static_cast<long long>(cfg.k), p_eff,
               cfg.lambda1.empty() ? 0.0 : cfg.lambda1[0], cfg.lambda2, seconds);
  write_tensor(a.out_tensor, estimate);
  if (!a.out_model.empty()) write_model(a.out_model, model, seconds);
}

void run_tune(const TuneArgs& a) {
  const ObservationSet obs = load_observations(a.obs, a.p_override, a.estimate_p);
  const double p_eff = effective_sampling_rate(obs);
  const RegularizationConfig base = theorem_lambda_schedule(
      obs.dims.m, obs.dims.n, obs.dims.t, p_eff, a.sigma_gamma, a.c1, a.c2, a.k);
  const std::vector<double> scales = log_spaced(a.grid_log_min, a.grid_log_max, a.grid_steps);
  const bool has_tail = a.k < SliceIndexPlan::half_slices(obs.dims.t);
  TuningSpec spec;
  spec.holdout_fraction = a.holdout;
  spec.seed = a.seed;
  for (double s1 : scales) {
    if (has_tail)
      for (double s2 : scales) spec.grid.emplace_back(s1, s2);
    else
      spec.grid.emplace_back(s1, 1.0);
  }
  const TuningResult result = grid_search(obs, base, spec, a.threads);
  write_tuning_table(a.report, result);
  std::printf("best scale1=%.17g scale2=%.17g lambda1=%.17g lambda2=%.17g\n", result.best_scale1,
              result.best_scale2, result.best.lambda1.empty() ? 0.0 : result.best.lambda1[0],
              result.best.lambda2);
}

json report_array(const DenseTensor3& est, const DenseTensor3& truth, const IndexSet& delta,
                  const std::vector<double>& quantiles, index_t chunk_len) {
  json arr = json::array();
  auto push = [&arr](const RmseReport& r) { arr.push_back(json::parse(report_record_json(r))); };
  if (delta.size() == 0) {
    // nothing to score on this side (e.g. p = 1 leaves no missing entries)
    for (double q : quantiles) {
      char label[32];
      std::snprintf(label, sizeof(label), "q%g", q);
      push(RmseReport{label, 0, 0.0});
    }
    return arr;
  }
  for (const RmseReport& r : percentile_rmse(est, truth, delta, quantiles)) push(r);
  if (chunk_len > 0)
    for (const RmseReport& r : chunked_rmse(est, truth, delta, chunk_len)) push(r);
  return arr;
}

void run_evaluate(const EvaluateArgs& a) {
  const DenseTensor3 est = read_tensor(a.estimate);
  const DenseTensor3 truth = read_tensor(a.truth);
  const ObservationSet obs = read_observations(a.obs);
  if (!(est.dims() == truth.dims()) || !(est.dims() == obs.dims))
    throw std::invalid_argument("evaluate: estimate, truth and observation dims disagree");
  obs.validate();
  json report;
  report["train"] = report_array(est, truth, IndexSet::observed(obs), a.quantiles, a.chunk_len);
  report["test"] = report_array(est, truth, IndexSet::missing(obs), a.quantiles, a.chunk_len);
  if (!a.model.empty()) {
    double fit_seconds = -1.0;
    const FlostModel model = read_model(a.model, &fit_seconds);
    if (!(model.dims == est.dims()))
      throw std::invalid_argument("evaluate: model dims disagree with estimate");
    report["parameter_count"] = parameter_count(model);
    if (fit_seconds >= 0.0) report["wall_clock_seconds"] = fit_seconds;
  }
  std::ofstream out(a.report);
  if (!out) throw FileError("evaluate: cannot open " + a.report);
  out << report.dump(2) << "\n";
  out.flush();
  if (!out) throw FileError("evaluate: write failed for " + a.report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FLoST: Fourier low-rank and sparse tensor completion"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* c_gen = app.add_subcommand("generate", "Generate a synthetic (r,K,s) ground truth");
  c_gen->add_option("--m", gen.m, "First dimension")->required();
  c_gen->add_option("--n", gen.n, "Second dimension")->required();
  c_gen->add_option("--t", gen.t, "Time dimension")->required();
  c_gen->add_option("--rank", gen.rank, "Rank of the low-frequency slices")->required();
  c_gen->add_option("--k", gen.k, "Number of low-rank frequency slices")->required();
  c_gen->add_option("--sparsity", gen.sparsity, "Total nonzeros kept across tail slices")
      ->required();
  c_gen->add_option("--seed", gen.seed, "RNG seed")->default_val(0);
  c_gen->add_option("--out", gen.out, "Output tensor file")->required();

  TruncateArgs tru;
  CLI::App* c_tru = app.add_subcommand("truncate", "Project a tensor onto the (r,K,s) structure");
  c_tru->add_option("--input", tru.input, "Input tensor file")->required();
  c_tru->add_option("--rank", tru.rank, "Rank of the low-frequency slices")->required();
  c_tru->add_option("--k", tru.k, "Number of low-rank frequency slices")->required();
  c_tru->add_option("--sparsity", tru.sparsity, "Total nonzeros kept across tail slices")
      ->required();
  c_tru->add_option("--out", tru.out, "Output tensor file")->required();

  SampleArgs smp;
  CLI::App* c_smp = app.add_subcommand("sample", "Bernoulli-sample noisy observations");
  c_smp->add_option("--input", smp.input, "Ground truth tensor file")->required();
  c_smp->add_option("--p", smp.p, "Observation probability")->required();
  c_smp->add_option("--sigma", smp.sigma, "Noise standard deviation")->default_val(0.0);
  c_smp->add_option("--seed", smp.seed, "RNG seed")->default_val(0);
  c_smp->add_option("--out", smp.out, "Output observation CSV")->required();

  FitArgs fit_args;
  CLI::App* c_fit = app.add_subcommand("fit", "Estimate the tensor from observations");
  c_fit->add_option("--obs", fit_args.obs, "Observation CSV")->required();
  c_fit->add_option("--k", fit_args.k, "Number of low-rank frequency slices")->required();
  c_fit->add_option("--lambda1-scale", fit_args.lambda1_scale,
                    "Multiplier on the scheduled lambda1");
  c_fit->add_option("--lambda2-scale", fit_args.lambda2_scale,
                    "Multiplier on the scheduled lambda2");
  c_fit->add_option("--lambda1", fit_args.lambda1, "Explicit lambda1 (overrides the schedule)");
  c_fit->add_option("--lambda2", fit_args.lambda2, "Explicit lambda2 (overrides the schedule)");
  c_fit->add_option("--c1", fit_args.c1, "Schedule constant C1")->default_val(1.0);
  c_fit->add_option("--c2", fit_args.c2, "Schedule constant C2")->default_val(1.0);
  c_fit->add_option("--sigma-gamma", fit_args.sigma_gamma, "Proxy for max(noise sd, sup norm)")
      ->default_val(1.0);
  c_fit->add_option("--p", fit_args.p_override, "Override the stored sampling probability");
  c_fit->add_flag("--estimate-p", fit_args.estimate_p, "Use the empirical observation rate");
  c_fit->add_option("--threads", fit_args.threads, "Worker threads (0 = all cores)")
      ->default_val(0);
  c_fit->add_option("--out-tensor", fit_args.out_tensor, "Reconstructed tensor file")->required();
  c_fit->add_option("--out-model", fit_args.out_model, "Fitted model JSON");

  TuneArgs tune_args;
  CLI::App* c_tune = app.add_subcommand("tune", "Grid-search lambda scales on a holdout");
  c_tune->add_option("--obs", tune_args.obs, "Observation CSV")->required();
  c_tune->add_option("--k", tune_args.k, "Number of low-rank frequency slices")->required();
  c_tune->add_option("--grid-log-min", tune_args.grid_log_min, "log10 of the smallest scale")
      ->default_val(0.0);
  c_tune->add_option("--grid-log-max", tune_args.grid_log_max, "log10 of the largest scale")
      ->default_val(1.0);
  c_tune->add_option("--grid-steps", tune_args.grid_steps, "Scales per axis")->default_val(5);
  c_tune->add_option("--holdout", tune_args.holdout, "Validation fraction")->default_val(0.10);
  c_tune->add_option("--seed", tune_args.seed, "Split seed")->default_val(0);
  c_tune->add_option("--c1", tune_args.c1, "Schedule constant C1")->default_val(1.0);
  c_tune->add_option("--c2", tune_args.c2, "Schedule constant C2")->default_val(1.0);
  c_tune->add_option("--sigma-gamma", tune_args.sigma_gamma, "Proxy for max(noise sd, sup norm)")
      ->default_val(1.0);
  c_tune->add_option("--p", tune_args.p_override, "Override the stored sampling probability");
  c_tune->add_flag("--estimate-p", tune_args.estimate_p, "Use the empirical observation rate");
  c_tune->add_option("--threads", tune_args.threads, "Worker threads (0 = all cores)")
      ->default_val(0);
  c_tune->add_option("--report", tune_args.report, "Tuning table CSV")->required();

  EvaluateArgs ev;
  CLI::App* c_ev = app.add_subcommand("evaluate", "RMSE report against a ground truth");
  c_ev->add_option("--estimate", ev.estimate, "Estimated tensor file")->required();
  c_ev->add_option("--truth", ev.truth, "Ground truth tensor file")->required();
  c_ev->add_option("--obs", ev.obs, "Observation CSV defining the train/test split")->required();
  c_ev->add_option("--model", ev.model, "Fitted model JSON (adds parameter count and fit time)");
  c_ev->add_option("--chunk-len", ev.chunk_len, "Also report RMSE per time chunk of this length")
      ->default_val(0);
  c_ev->add_option("--quantiles", ev.quantiles,
                   "Percentile thresholds for high-value RMSE, comma separated")
      ->delimiter(',');
  c_ev->add_option("--report", ev.report, "Output JSON report")->required();

  try {
    app.parse(argc, argv);
    if (c_gen->parsed()) run_generate(gen);
    if (c_tru->parsed()) run_truncate(tru);
    if (c_smp->parsed()) run_sample(smp);
    if (c_fit->parsed()) run_fit(fit_args);
    if (c_tune->parsed()) run_tune(tune_args);
    if (c_ev->parsed()) run_evaluate(ev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const FileError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFileAccess;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFileFormat;
  } catch (const SvdError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  } catch (const SymmetryViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalidInput;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUnexpected;
  }
  return kOk;
}

// manialign command-line tool: synth, fit, transform, eval, experiment.

#include "manialign/alignment.hpp"
#include "manialign/baselines.hpp"
#include "manialign/dataset_io.hpp"
#include "manialign/error.hpp"
#include "manialign/model_io.hpp"
#include "manialign/parallel.hpp"
#include "manialign/protocol.hpp"
#include "manialign/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace manialign;

namespace {

struct Features {
  Matrix train;
  std::vector<int> y_train;
  Matrix test;
  std::vector<int> y_test;
  std::vector<std::size_t> test_domain;
};

// Test truth per domain: validation labels when present, visible labels otherwise.
std::vector<int> truth_for(const io::LoadedDataset& ds, std::size_t m) {
  if (ds.validation_labels[m]) return *ds.validation_labels[m];
  return ds.data.domains[m].labels;
}

Features gather(const io::LoadedDataset& train, const io::LoadedDataset& test, const std::vector<Matrix>& ztrain,
                const std::vector<Matrix>& ztest, const protocol::ExperimentConfig& cfg) {
  Features f;
  Index cols = ztrain.front().cols();
  std::vector<Vector> tr;
  std::vector<Vector> te;
  for (std::size_t m = 0; m < train.data.num_domains(); ++m) {
    if (cfg.train_on == protocol::TrainOn::SourceOnly && m != cfg.leading_domain) continue;
    const auto& lab = train.data.domains[m].labels;
    for (std::size_t i = 0; i < lab.size(); ++i) {
      if (lab[i] == kUnlabeled) continue;
      tr.push_back(ztrain[m].row(static_cast<Index>(i)).transpose());
      f.y_train.push_back(lab[i]);
    }
  }
  for (std::size_t m = 0; m < test.data.num_domains(); ++m) {
    const auto truth = truth_for(test, m);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] == kUnlabeled) continue;
      te.push_back(ztest[m].row(static_cast<Index>(i)).transpose());
      f.y_test.push_back(truth[i]);
      f.test_domain.push_back(m);
    }
  }
  if (tr.empty()) throw Error(ErrorKind::EmptyDataset, "cli", "no labeled training samples");
  if (te.empty()) throw Error(ErrorKind::EmptyDataset, "cli", "no labeled test samples");
  f.train.resize(static_cast<Index>(tr.size()), cols);
  for (std::size_t i = 0; i < tr.size(); ++i) f.train.row(static_cast<Index>(i)) = tr[i].transpose();
  f.test.resize(static_cast<Index>(te.size()), cols);
  for (std::size_t i = 0; i < te.size(); ++i) f.test.row(static_cast<Index>(i)) = te[i].transpose();
  return f;
}

void print_model_summary(const alignment::AlignmentModel& model) {
  std::printf("mode %s, p = %zu, rank deficiency %zu\n", alignment::to_string(model.mode).c_str(), model.p,
              model.metadata.rank_deficiency);
  const Index show = std::min<Index>(model.eigenvalues.size(), 10);
  std::printf("eigenvalues:");
  for (Index j = 0; j < show; ++j) std::printf(" %.6g", model.eigenvalues(j));
  if (model.eigenvalues.size() > show) std::printf(" ...");
  std::printf("\n");
  for (std::size_t m = 0; m < model.kernel_specs.size(); ++m) {
    const auto& s = model.kernel_specs[m];
    if (s.kind == kernels::KernelKind::Rbf) {
      std::printf("domain %zu: rbf sigma = %.6g\n", m, s.bandwidth.value_or(0.0));
    } else {
      std::printf("domain %zu: linear\n", m);
    }
  }
}

int run(int argc, char** argv) {
  parallel::configure_threads_from_env();
  CLI::App app{"Semi-supervised manifold alignment (SSMA / KEMA)"};
  app.require_subcommand(1);

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset");
  std::string archetype = "multiview";
  std::uint64_t seed = 0;
  std::string out;
  std::optional<std::size_t> samples;
  synth_cmd->add_option("--archetype", archetype, "multiview | shadow | ties")->required();
  synth_cmd->add_option("--seed", seed);
  synth_cmd->add_option("--out", out, "output directory")->required();
  synth_cmd->add_option("--samples", samples, "samples per domain");

  auto* fit_cmd = app.add_subcommand("fit", "fit an alignment model");
  std::string config;
  std::string manifest;
  fit_cmd->add_option("--config", config)->required();
  fit_cmd->add_option("--manifest", manifest)->required();
  fit_cmd->add_option("--out", out, "model JSON")->required();

  auto* transform_cmd = app.add_subcommand("transform", "project samples into the latent space");
  std::string model_path;
  std::size_t domain = 0;
  std::string input;
  std::optional<std::size_t> p_opt;
  transform_cmd->add_option("--model", model_path)->required();
  transform_cmd->add_option("--domain", domain)->required();
  transform_cmd->add_option("--in", input, "domain CSV")->required();
  transform_cmd->add_option("--out", out, "latent CSV")->required();
  transform_cmd->add_option("--p", p_opt, "latent dimensions to keep");

  auto* eval_cmd = app.add_subcommand("eval", "train a classifier on labeled samples and score the test set");
  std::string test_manifest;
  std::string curve;
  bool no_adaptation = false;
  eval_cmd->add_option("--config", config)->required();
  eval_cmd->add_option("--manifest", manifest, "training manifest")->required();
  eval_cmd->add_option("--test", test_manifest, "test manifest (default: training manifest)");
  auto* model_opt = eval_cmd->add_option("--model", model_path);
  auto* noad_opt = eval_cmd->add_flag("--no-adaptation", no_adaptation, "classify raw common bands");
  model_opt->excludes(noad_opt);
  eval_cmd->add_option("--out", out, "report JSON")->required();
  eval_cmd->add_option("--curve", curve, "per-dimension accuracy CSV");

  auto* exp_cmd = app.add_subcommand("experiment", "repeated split/sample/fit/train/eval runs");
  std::size_t reps = 10;
  exp_cmd->add_option("--archetype", archetype)->required();
  exp_cmd->add_option("--reps", reps);
  exp_cmd->add_option("--seed", seed);
  exp_cmd->add_option("--config", config, "run configuration overriding the archetype defaults");
  exp_cmd->add_option("--out", out, "results JSON");
  exp_cmd->add_option("--curve", curve, "per-dimension accuracy CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*synth_cmd) {
    auto spec = synth::default_spec(synth::archetype_from_string(archetype));
    spec.seed = seed;
    if (samples) spec.samples_per_domain = *samples;
    const auto data = synth::generate(spec);
    io::write_dataset(out, data);
    std::printf("wrote %zu domains to %s\n", data.data.num_domains(), out.c_str());
    return 0;
  }

  if (*fit_cmd) {
    const auto rc = io::load_run_config(config);
    const auto ds = io::read_dataset(manifest);
    const auto model = alignment::fit(ds.data, rc.fit);
    io::save_model(model, out);
    print_model_summary(model);
    return 0;
  }

  if (*transform_cmd) {
    const auto model = io::load_model(model_path);
    if (domain >= model.num_domains()) {
      throw Error(ErrorKind::UnknownDomain, "cli", "model has no domain " + std::to_string(domain));
    }
    const auto d = io::read_domain_csv(input, static_cast<int>(domain));
    const auto z = alignment::transform(model, domain, d.features, p_opt);
    io::write_latent_csv(out, z.coordinates);
    return 0;
  }

  if (*eval_cmd) {
    if (model_path.empty() && !no_adaptation) {
      throw Error(ErrorKind::BadConfig, "cli", "eval needs --model or --no-adaptation");
    }
    const auto rc = io::load_run_config(config);
    const auto train = io::read_dataset(manifest);
    const auto test = test_manifest.empty() ? train : io::read_dataset(test_manifest);
    std::vector<Matrix> ztr;
    std::vector<Matrix> zte;
    std::size_t p_max = 0;
    if (no_adaptation) {
      const auto a = baselines::common_band_subset(train.data);
      const auto b = baselines::common_band_subset(test.data);
      ztr = a.feature_blocks();
      zte = b.feature_blocks();
      p_max = a.domains.front().dim();
    } else {
      const auto model = io::load_model(model_path);
      for (std::size_t m = 0; m < train.data.num_domains(); ++m)
        ztr.push_back(alignment::transform(model, m, train.data.domains[m].features).coordinates);
      for (std::size_t m = 0; m < test.data.num_domains(); ++m)
        zte.push_back(alignment::transform(model, m, test.data.domains[m].features).coordinates);
      p_max = model.p;
    }
    const auto& cfg = rc.experiment;
    const auto f = gather(train, test, ztr, zte, cfg);
    classify::CvGrid grid = cfg.grid;
    if (no_adaptation) grid.p_values = {p_max};
    const auto r = protocol::classify_and_score(f.train, f.y_train, f.test, f.y_test, f.test_domain,
                                                cfg.leading_domain, grid, cfg.folds, cfg.standardize,
                                                no_adaptation ? 0 : cfg.curve_max_dims, cfg.seed, cfg.svm,
                                                cfg.p_tolerance);
    io::write_text(out, io::report_to_json(r.all));
    if (!curve.empty()) {
      std::string s = "dimension,mean_OA,std\n";
      for (std::size_t p = 0; p < r.curve.size(); ++p)
        s += std::to_string(p + 1) + "," + io::format_double(r.curve[p]) + ",0\n";
      io::write_text(curve, s);
    }
    std::printf("OA %.4f  kappa %.4f  (p = %zu, C = %g)\n", r.all.overall_accuracy, r.all.kappa, r.chosen.p,
                r.chosen.c);
    return 0;
  }

  if (*exp_cmd) {
    const auto arch = synth::archetype_from_string(archetype);
    auto spec = synth::default_spec(arch);
    spec.seed = seed;
    auto cfg = protocol::default_experiment(arch);
    if (!config.empty()) {
      const auto text = io::read_text(config);
      const auto rc = io::parse_run_config(text);
      const auto defaults = cfg;
      cfg = rc.experiment;
      // Keys absent from the file keep the archetype defaults.
      const auto j = nlohmann::json::parse(text);
      if (!j.contains("labeled_per_class")) cfg.labeled_per_class = defaults.labeled_per_class;
      if (!j.contains("unlabeled")) cfg.unlabeled_per_domain = defaults.unlabeled_per_domain;
      if (!j.contains("train_on")) cfg.train_on = defaults.train_on;
      if (!j.contains("methods")) cfg.methods = defaults.methods;
    }
    cfg.seed = seed;
    const auto res = protocol::run_experiment(spec, cfg, reps);
    std::printf("%-20s %10s %8s %10s %8s\n", "method", "OA mean", "OA std", "kappa", "std");
    for (const auto& m : res.methods)
      std::printf("%-20s %10.4f %8.4f %10.4f %8.4f\n", protocol::to_string(m.method).c_str(), m.mean_oa, m.std_oa,
                  m.mean_kappa, m.std_kappa);
    std::printf("%zu repetitions in %.2f s\n", reps, res.seconds);
    if (!out.empty()) io::write_text(out, io::experiment_to_json(res, reps));
    if (!curve.empty()) {
      std::string s = "method,dimension,mean_OA,std\n";
      for (const auto& m : res.methods)
        for (std::size_t p = 0; p < m.curve_mean.size(); ++p)
          s += protocol::to_string(m.method) + "," + std::to_string(p + 1) + "," + io::format_double(m.curve_mean[p]) +
               "," + io::format_double(m.curve_std[p]) + "\n";
      io::write_text(curve, s);
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

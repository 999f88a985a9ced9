// Command-line workbench over the pedigree risk library. Every subcommand
// maps onto the C interface; see README.md for the pipeline walkthrough.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cli_util.hpp"
#include "pedrisk/pedrisk.h"
#include "pipeline.hpp"

using nlohmann::json;

namespace cli {

namespace {

// Sidecar provenance file next to each artifact: settings hash plus the
// seeds that produced it.
void write_meta(const std::string& artifact_path, const json& options) {
  json meta;
  meta["options"] = options;
  meta["config_hash"] = fnv64(options.dump());
  write_text(artifact_path + ".meta.json", meta.dump(2) + "\n");
}

struct SimulateOptions {
  std::size_t n = 1000;
  int horizon = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string prefix = "f";
  bool keep_excluded = false;
  std::string penetrance_path;
  std::string structure_path;
  std::string out_path;
  std::string outcomes_path;
  std::string truth_path;
};

int run_simulate(const SimulateOptions& opt) {
  PenetranceHandle pen = open_penetrance(opt.penetrance_path);
  json params = {{"n", opt.n},
                 {"horizon_years", opt.horizon},
                 {"seed", opt.seed},
                 {"workers", opt.workers},
                 {"prefix", opt.prefix},
                 {"keep_excluded", opt.keep_excluded}};
  if (!opt.structure_path.empty())
    params["structure"] = json::parse(slurp(opt.structure_path));
  CohortHandle cohort;
  check(pr_cohort_simulate(pen.get(), params.dump().c_str(), cohort.out()),
        "simulate");
  check(pr_cohort_write(cohort.get(), opt.out_path.c_str()), "write pedigrees");
  write_meta(opt.out_path, {{"command", "simulate"}, {"params", params}});
  if (!opt.outcomes_path.empty())
    check(pr_cohort_write_outcomes(cohort.get(), opt.outcomes_path.c_str()),
          "write outcomes");
  if (!opt.truth_path.empty())
    check(pr_cohort_write_truth(cohort.get(), opt.truth_path.c_str()),
          "write truth");
  std::size_t n = 0;
  pr_cohort_size(cohort.get(), &n);
  std::cout << "simulated " << n << " families -> " << opt.out_path << "\n";
  return 0;
}

struct PerturbOptions {
  std::string in_path;
  std::string op = "misreport";
  std::string config_path;
  double fraction = 0.2;
  bool unaffected_only = false;
  std::uint64_t seed = 1;
  std::string out_path;
};

int run_perturb(const PerturbOptions& opt) {
  CohortHandle cohort;
  check(pr_cohort_read(opt.in_path.c_str(), cohort.out()), "read " + opt.in_path);
  CohortHandle result;
  if (opt.op == "misreport") {
    std::string cfg;
    if (!opt.config_path.empty()) cfg = slurp(opt.config_path);
    check(pr_cohort_misreport(cohort.get(), cfg.empty() ? nullptr : cfg.c_str(),
                              opt.seed, result.out()),
          "misreport");
  } else if (opt.op == "drop") {
    check(pr_cohort_drop_relatives(cohort.get(), opt.fraction,
                                   opt.unaffected_only ? 1 : 0, opt.seed,
                                   result.out()),
          "drop");
  } else if (opt.op == "blank") {
    check(pr_cohort_blank_onsets(cohort.get(), opt.fraction, opt.seed,
                                 result.out()),
          "blank");
  } else if (opt.op == "impute") {
    check(pr_cohort_impute_onsets(cohort.get(), result.out()), "impute");
  } else {
    throw Fatal(2, "unknown perturb operation: " + opt.op);
  }
  check(pr_cohort_write(result.get(), opt.out_path.c_str()), "write pedigrees");
  write_meta(opt.out_path, {{"command", "perturb"},
                            {"op", opt.op},
                            {"fraction", opt.fraction},
                            {"unaffected_only", opt.unaffected_only},
                            {"seed", opt.seed},
                            {"in", opt.in_path}});
  std::cout << "perturbed (" << opt.op << ") -> " << opt.out_path << "\n";
  return 0;
}

struct EncodeOptions {
  std::string in_path;
  std::string outcomes_path;
  std::string reference = "default";
  std::uint64_t seed = 1;
  std::string out_path;
  bool print_loss = false;
};

int run_encode(const EncodeOptions& opt) {
  CohortHandle cohort;
  check(pr_cohort_read(opt.in_path.c_str(), cohort.out()), "read " + opt.in_path);
  if (!opt.outcomes_path.empty())
    check(pr_cohort_attach_outcomes(cohort.get(), opt.outcomes_path.c_str()),
          "attach outcomes");
  ReferenceHandle ref = open_reference(opt.reference);
  check(pr_encode_write_csv(cohort.get(), ref.get(), opt.seed,
                            opt.out_path.c_str()),
        "encode");
  write_meta(opt.out_path, {{"command", "encode"},
                            {"reference", opt.reference},
                            {"seed", opt.seed},
                            {"in", opt.in_path}});
  if (opt.print_loss) {
    double loss = 0.0;
    check(pr_encode_loss(cohort.get(), ref.get(), &loss), "loss");
    std::cout << "mapping loss: " << loss << "\n";
  }
  std::cout << "encoded -> " << opt.out_path << "\n";
  return 0;
}

struct TrainOptions {
  std::string in_path;
  std::string outcomes_path;
  std::string reference = "default";
  std::string kind = "fcnn";
  std::string loss = "squared_error";
  std::string activation = "elu";
  std::string hidden = "30,10";
  std::string channels = "10,5";
  double dropout = 0.2;
  int epochs = -1;  // -1 = per-kind default
  int batch_size = 256;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
  std::uint64_t encode_seed = 1;
  std::string out_path;
};

json train_options_json(const TrainOptions& opt) {
  json j = {{"kind", opt.kind},
            {"loss", opt.loss},
            {"activation", opt.activation},
            {"hidden", parse_int_list(opt.hidden)},
            {"channels", parse_int_list(opt.channels)},
            {"dropout", opt.dropout},
            {"batch_size", opt.batch_size},
            {"learning_rate", opt.learning_rate},
            {"weight_decay", opt.weight_decay},
            {"seed", opt.seed},
            {"encode_seed", opt.encode_seed}};
  if (opt.epochs > 0) j["epochs"] = opt.epochs;
  return j;
}

int run_train(const TrainOptions& opt) {
  CohortHandle cohort;
  check(pr_cohort_read(opt.in_path.c_str(), cohort.out()), "read " + opt.in_path);
  check(pr_cohort_attach_outcomes(cohort.get(), opt.outcomes_path.c_str()),
        "attach outcomes");
  ReferenceHandle ref = open_reference(opt.reference);
  json options = train_options_json(opt);
  options["meta"] = {{"command", "train"},
                     {"reference", opt.reference},
                     {"config_hash", fnv64(options.dump())}};
  ModelHandle model;
  check(pr_model_train(cohort.get(), ref.get(), options.dump().c_str(),
                       model.out()),
        "train");
  check(pr_model_save(model.get(), opt.out_path.c_str()), "save model");
  char* info = nullptr;
  check(pr_model_info(model.get(), &info), "model info");
  json info_json = json::parse(take_string(info));
  std::cout << "trained " << opt.kind << " ("
            << info_json.value("parameters", 0) << " parameters) -> "
            << opt.out_path << "\n";
  const json& losses = info_json["meta"]["epoch_loss"];
  if (losses.is_array() && !losses.empty())
    std::cout << "final training loss: " << losses.back().dump() << "\n";
  return 0;
}

struct TuneOptions {
  TrainOptions base;
  int candidates = 8;
  std::string out_path;
};

int run_tune(const TuneOptions& opt) {
  CohortHandle cohort;
  check(pr_cohort_read(opt.base.in_path.c_str(), cohort.out()),
        "read " + opt.base.in_path);
  check(pr_cohort_attach_outcomes(cohort.get(), opt.base.outcomes_path.c_str()),
        "attach outcomes");
  ReferenceHandle ref = open_reference(opt.base.reference);
  json options = train_options_json(opt.base);
  options["candidates"] = opt.candidates;
  char* report = nullptr;
  check(pr_model_tune(cohort.get(), ref.get(), options.dump().c_str(), &report),
        "tune");
  std::string text = take_string(report);
  if (!opt.out_path.empty()) {
    write_text(opt.out_path, text + "\n");
    std::cout << "search report -> " << opt.out_path << "\n";
  } else {
    std::cout << text << "\n";
  }
  return 0;
}

struct PredictOptions {
  std::string in_path;
  std::string model_path;       // learned model checkpoint
  bool mendelian = false;       // peeling engine instead
  bool baseline = false;        // family-history-adjusted population risk
  std::string penetrance_path;
  std::string risk_table_path;
  int horizon = 10;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out_path;
};

int run_predict(const PredictOptions& opt) {
  int modes = (opt.model_path.empty() ? 0 : 1) + (opt.mendelian ? 1 : 0) +
              (opt.baseline ? 1 : 0);
  if (modes != 1)
    throw Fatal(2, "choose exactly one of --model, --mendelian, --baseline");

  CohortHandle cohort;
  check(pr_cohort_read(opt.in_path.c_str(), cohort.out()), "read " + opt.in_path);
  std::size_t n = 0;
  pr_cohort_size(cohort.get(), &n);
  if (n == 0) throw Fatal(2, "empty cohort: " + opt.in_path);

  std::string text;
  if (opt.mendelian) {
    PenetranceHandle pen = open_penetrance(opt.penetrance_path);
    std::vector<double> risk(n), post(n * 4);
    check(pr_mendelian_predict(cohort.get(), pen.get(), opt.horizon,
                               opt.workers, risk.data(), post.data()),
          "mendelian predict");
    text =
        "family_id,posterior_noncarrier,posterior_l1,posterior_l2,"
        "posterior_both,risk_t\n";
    for (std::size_t i = 0; i < n; ++i) {
      char* id = nullptr;
      check(pr_cohort_family_id(cohort.get(), i, &id), "family id");
      char line[512];
      std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    take_string(id).c_str(), post[i * 4], post[i * 4 + 1],
                    post[i * 4 + 2], post[i * 4 + 3], risk[i]);
      text += line;
    }
  } else {
    std::vector<double> pred(n);
    if (opt.baseline) {
      check(pr_reference_risk(cohort.get(),
                              opt.risk_table_path.empty()
                                  ? nullptr
                                  : opt.risk_table_path.c_str(),
                              pred.data()),
            "baseline risk");
    } else {
      ModelHandle model;
      check(pr_model_load(opt.model_path.c_str(), model.out()),
            "load " + opt.model_path);
      check(pr_model_predict(model.get(), cohort.get(), opt.seed, pred.data()),
            "predict");
    }
    text = "family_id,y_pred\n";
    for (std::size_t i = 0; i < n; ++i) {
      char* id = nullptr;
      check(pr_cohort_family_id(cohort.get(), i, &id), "family id");
      char line[256];
      std::snprintf(line, sizeof(line), "%s,%.17g\n", take_string(id).c_str(),
                    pred[i]);
      text += line;
    }
  }
  write_text(opt.out_path, text);
  write_meta(opt.out_path,
             {{"command", "predict"},
              {"in", opt.in_path},
              {"model", opt.model_path},
              {"mendelian", opt.mendelian},
              {"baseline", opt.baseline},
              {"horizon", opt.horizon},
              {"seed", opt.seed}});
  std::cout << "predictions -> " << opt.out_path << "\n";
  return 0;
}

}  // namespace
}  // namespace cli

int main(int argc, char** argv) {
  CLI::App app{"pedigree cancer risk workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pr_version()));

  auto sim = std::make_shared<cli::SimulateOptions>();
  CLI::App* c_sim = app.add_subcommand("simulate", "draw synthetic families");
  c_sim->add_option("--n", sim->n, "number of families")->required();
  c_sim->add_option("--horizon", sim->horizon, "label horizon in years");
  c_sim->add_option("--seed", sim->seed, "master seed");
  c_sim->add_option("--workers", sim->workers, "worker threads");
  c_sim->add_option("--prefix", sim->prefix, "family id prefix");
  c_sim->add_flag("--keep-excluded", sim->keep_excluded,
                  "keep families the baseline filter would resample");
  c_sim->add_option("--penetrance", sim->penetrance_path, "penetrance json");
  c_sim->add_option("--structure", sim->structure_path, "structure json");
  c_sim->add_option("--out", sim->out_path, "pedigree csv/json")->required();
  c_sim->add_option("--outcomes", sim->outcomes_path, "labels csv");
  c_sim->add_option("--truth", sim->truth_path, "latent truth csv");

  auto pert = std::make_shared<cli::PerturbOptions>();
  CLI::App* c_pert = app.add_subcommand("perturb", "apply reporting noise");
  c_pert->add_option("--in", pert->in_path, "pedigree file")->required();
  c_pert->add_option("--op", pert->op, "misreport|drop|blank|impute");
  c_pert->add_option("--config", pert->config_path, "misreport rates json");
  c_pert->add_option("--fraction", pert->fraction, "drop/blank probability");
  c_pert->add_flag("--unaffected-only", pert->unaffected_only,
                   "drop only cancer-free relatives");
  c_pert->add_option("--seed", pert->seed, "master seed");
  c_pert->add_option("--out", pert->out_path, "output pedigree file")->required();

  auto enc = std::make_shared<cli::EncodeOptions>();
  CLI::App* c_enc = app.add_subcommand("encode", "standardize to the flat matrix");
  c_enc->add_option("--in", enc->in_path, "pedigree file")->required();
  c_enc->add_option("--outcomes", enc->outcomes_path, "labels csv");
  c_enc->add_option("--ref", enc->reference, "layout preset or json path");
  c_enc->add_option("--seed", enc->seed, "downsampling seed");
  c_enc->add_option("--out", enc->out_path, "encoded csv")->required();
  c_enc->add_flag("--print-loss", enc->print_loss, "report mapping loss");

  auto trn = std::make_shared<cli::TrainOptions>();
  CLI::App* c_trn = app.add_subcommand("train", "fit a model");
  c_trn->add_option("--in", trn->in_path, "pedigree file")->required();
  c_trn->add_option("--outcomes", trn->outcomes_path, "labels csv")->required();
  c_trn->add_option("--ref", trn->reference, "layout preset or json path");
  c_trn->add_option("--kind", trn->kind, "logistic|fcnn|pedigree_cnn");
  c_trn->add_option("--loss", trn->loss, "cross_entropy|squared_error");
  c_trn->add_option("--activation", trn->activation, "relu|elu|logistic");
  c_trn->add_option("--hidden", trn->hidden, "fcnn widths, comma separated");
  c_trn->add_option("--channels", trn->channels, "convolution channels");
  c_trn->add_option("--dropout", trn->dropout, "dropout after first layer");
  c_trn->add_option("--epochs", trn->epochs, "training epochs");
  c_trn->add_option("--batch", trn->batch_size, "minibatch size");
  c_trn->add_option("--lr", trn->learning_rate, "learning rate");
  c_trn->add_option("--weight-decay", trn->weight_decay, "L2 on weights");
  c_trn->add_option("--seed", trn->seed, "init/shuffle seed");
  c_trn->add_option("--encode-seed", trn->encode_seed, "downsampling seed");
  c_trn->add_option("--out", trn->out_path, "model checkpoint")->required();

  auto tun = std::make_shared<cli::TuneOptions>();
  CLI::App* c_tun = app.add_subcommand("tune", "random hyperparameter search");
  c_tun->add_option("--in", tun->base.in_path, "pedigree file")->required();
  c_tun->add_option("--outcomes", tun->base.outcomes_path, "labels csv")
      ->required();
  c_tun->add_option("--ref", tun->base.reference, "layout preset or json path");
  c_tun->add_option("--kind", tun->base.kind, "logistic|fcnn|pedigree_cnn");
  c_tun->add_option("--loss", tun->base.loss, "cross_entropy|squared_error");
  c_tun->add_option("--epochs", tun->base.epochs, "training epochs");
  c_tun->add_option("--batch", tun->base.batch_size, "minibatch size");
  c_tun->add_option("--seed", tun->base.seed, "search seed");
  c_tun->add_option("--encode-seed", tun->base.encode_seed, "downsampling seed");
  c_tun->add_option("--candidates", tun->candidates, "configurations to try");
  c_tun->add_option("--out", tun->out_path, "report json (stdout if omitted)");

  auto prd = std::make_shared<cli::PredictOptions>();
  CLI::App* c_prd = app.add_subcommand("predict", "score a cohort");
  c_prd->add_option("--in", prd->in_path, "pedigree file")->required();
  c_prd->add_option("--model", prd->model_path, "model checkpoint");
  c_prd->add_flag("--mendelian", prd->mendelian, "peeling engine");
  c_prd->add_flag("--baseline", prd->baseline, "population baseline risk");
  c_prd->add_option("--penetrance", prd->penetrance_path, "penetrance json");
  c_prd->add_option("--risk-table", prd->risk_table_path, "baseline table json");
  c_prd->add_option("--horizon", prd->horizon, "risk horizon in years");
  c_prd->add_option("--workers", prd->workers, "worker threads");
  c_prd->add_option("--seed", prd->seed, "downsampling seed");
  c_prd->add_option("--out", prd->out_path, "predictions csv")->required();

  auto evl = std::make_shared<cli::EvaluateOptions>();
  CLI::App* c_evl = app.add_subcommand("evaluate", "score predictions");
  c_evl->add_option("--pred", evl->pred_specs, "name=predictions.csv")
      ->required()
      ->expected(-1);
  c_evl->add_option("--labels", evl->labels_path, "labels csv");
  c_evl->add_option("--followup", evl->followup_path,
                    "follow-up csv for censoring weights");
  c_evl->add_option("--horizon", evl->horizon, "endpoint horizon in years");
  c_evl->add_option("--bootstrap", evl->bootstrap, "bootstrap replicates");
  c_evl->add_option("--ci", evl->ci_level, "interval level");
  c_evl->add_option("--seed", evl->seed, "bootstrap seed");
  c_evl->add_option("--corr-ref", evl->corr_ref,
                    "model name correlations are computed against");
  c_evl->add_option("--out", evl->out_path, "report json (stdout if omitted)");

  auto exp = std::make_shared<cli::ExperimentOptions>();
  CLI::App* c_exp = app.add_subcommand(
      "experiment", "training-set-size ladder against the peeling engine");
  c_exp->add_option("--train-sizes", exp->train_sizes, "ladder sizes")
      ->delimiter(',')
      ->expected(-1);
  c_exp->add_option("--test-size", exp->test_size, "test families");
  c_exp->add_option("--horizon", exp->horizon, "label horizon in years");
  c_exp->add_option("--seed", exp->seed, "master seed");
  c_exp->add_option("--workers", exp->workers, "worker threads");
  c_exp->add_option("--penetrance", exp->penetrance_path, "penetrance json");
  c_exp->add_option("--ref", exp->reference, "layout preset or json path");
  c_exp->add_option("--epochs-fcnn", exp->epochs_fcnn, "fcnn epochs");
  c_exp->add_option("--epochs-cnn", exp->epochs_cnn, "cnn epochs");
  c_exp->add_option("--lr", exp->learning_rate, "learning rate");
  c_exp->add_option("--batch", exp->batch_size, "minibatch size");
  c_exp->add_option("--bootstrap", exp->bootstrap,
                    "bootstrap replicates at the largest size");
  c_exp->add_option("--outdir", exp->out_dir, "artifact directory")->required();

  auto scn = std::make_shared<cli::ScenarioOptions>();
  CLI::App* c_scn = app.add_subcommand(
      "scenario", "counselee risk across canned family histories");
  c_scn->add_option("--penetrance", scn->penetrance_path, "penetrance json");
  c_scn->add_option("--horizon", scn->horizon, "risk horizon in years");
  c_scn->add_option("--out", scn->out_path, "table json");
  c_scn->add_option("--workdir", scn->work_dir, "where fixture files land");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_sim->parsed()) return cli::run_simulate(*sim);
    if (c_pert->parsed()) return cli::run_perturb(*pert);
    if (c_enc->parsed()) return cli::run_encode(*enc);
    if (c_trn->parsed()) return cli::run_train(*trn);
    if (c_tun->parsed()) return cli::run_tune(*tun);
    if (c_prd->parsed()) return cli::run_predict(*prd);
    if (c_evl->parsed()) return cli::run_evaluate(*evl);
    if (c_exp->parsed()) return cli::run_experiment(*exp);
    if (c_scn->parsed()) return cli::run_scenario(*scn);
  } catch (const cli::Fatal& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "cli_util.hpp"
#include "pedrisk/pedrisk.h"

using nlohmann::json;

namespace cli {

namespace {

struct PredFile {
  std::string name;
  std::map<std::string, double> by_id;
};

// Accepts both prediction layouts the predict subcommand writes: the
// mendelian table (risk_t column) and the flat score table (y_pred).
PredFile read_predictions(const std::string& name, const std::string& path) {
  PredFile out;
  out.name = name;
  auto rows = read_csv(path);
  if (rows.empty()) throw Fatal(2, path + ": empty prediction file");
  const auto& header = rows[0];
  std::size_t id_col = 0, val_col = std::string::npos;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "family_id") id_col = c;
    if (header[c] == "y_pred" || header[c] == "risk_t") val_col = c;
  }
  if (val_col == std::string::npos)
    throw Fatal(2, path + ": no y_pred or risk_t column");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() <= std::max(id_col, val_col))
      throw Fatal(2, path + ": short row");
    out.by_id[rows[r][id_col]] = std::stod(rows[r][val_col]);
  }
  return out;
}

void print_metrics_line(const std::string& name, const json& rep) {
  std::printf("%-14s", name.c_str());
  auto field = [&](const char* key) {
    if (rep.contains(key) && rep[key].is_number())
      std::printf("  %8.4f", rep[key].get<double>());
    else
      std::printf("  %8s", "-");
  };
  field("auc");
  field("oe");
  field("brier_sqrt");
  field("average_precision");
  std::printf("\n");
}

}  // namespace

int run_evaluate(const EvaluateOptions& opt) {
  if (opt.labels_path.empty() && opt.followup_path.empty())
    throw Fatal(2, "need --labels or --followup");

  // Subject order and the endpoint. With follow-up data the endpoint is
  // event-within-horizon and censoring weights are attached; otherwise the
  // label file is taken as a complete 0/1 endpoint.
  std::vector<std::string> ids;
  std::vector<double> labels;
  std::vector<double> weights;
  if (!opt.followup_path.empty()) {
    auto rows = read_csv(opt.followup_path);
    if (rows.size() < 2 || rows[0].size() < 3 || rows[0][0] != "family_id")
      throw Fatal(2, opt.followup_path +
                         ": expected family_id,time_years,event header");
    std::vector<double> times;
    std::vector<int> events;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() < 3) throw Fatal(2, opt.followup_path + ": short row");
      ids.push_back(rows[r][0]);
      times.push_back(std::stod(rows[r][1]));
      events.push_back(std::stoi(rows[r][2]));
    }
    weights.resize(ids.size());
    check(pr_ipcw_weights(times.data(), events.data(), ids.size(), opt.horizon,
                          weights.data()),
          "censoring weights");
    for (std::size_t i = 0; i < ids.size(); ++i)
      labels.push_back(events[i] != 0 && times[i] <= opt.horizon ? 1.0 : 0.0);
  } else {
    auto rows = read_csv(opt.labels_path);
    if (rows.size() < 2 || rows[0].size() < 2)
      throw Fatal(2, opt.labels_path + ": expected family_id,y0 header");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      ids.push_back(rows[r][0]);
      labels.push_back(std::stod(rows[r][1]));
    }
  }

  std::vector<PredFile> files;
  for (const std::string& spec : opt.pred_specs) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw Fatal(2, "prediction spec must be name=path: " + spec);
    files.push_back(read_predictions(spec.substr(0, eq), spec.substr(eq + 1)));
  }

  const std::size_t n = ids.size();
  std::vector<std::vector<double>> preds(files.size(), std::vector<double>(n));
  for (std::size_t m = 0; m < files.size(); ++m)
    for (std::size_t i = 0; i < n; ++i) {
      auto it = files[m].by_id.find(ids[i]);
      if (it == files[m].by_id.end())
        throw Fatal(2, files[m].name + ": no prediction for " + ids[i]);
      preds[m][i] = it->second;
    }

  json report;
  report["n"] = n;
  report["weighted"] = !weights.empty();
  report["models"] = json::object();
  std::printf("%-14s  %8s  %8s  %8s  %8s\n", "model", "auc", "oe", "rbrier",
              "ap");
  for (std::size_t m = 0; m < files.size(); ++m) {
    char* rep = nullptr;
    check(pr_metrics_report(preds[m].data(), labels.data(),
                            weights.empty() ? nullptr : weights.data(), n,
                            &rep),
          files[m].name);
    json j = json::parse(take_string(rep));
    print_metrics_line(files[m].name, j);
    report["models"][files[m].name] = j;
  }

  std::string corr_ref = opt.corr_ref.empty() ? files[0].name : opt.corr_ref;
  std::size_t ref_idx = files.size();
  for (std::size_t m = 0; m < files.size(); ++m)
    if (files[m].name == corr_ref) ref_idx = m;
  if (ref_idx == files.size())
    throw Fatal(2, "unknown --corr-ref model: " + corr_ref);
  report["correlation_reference"] = corr_ref;
  for (std::size_t m = 0; m < files.size(); ++m) {
    if (m == ref_idx) continue;
    double pe = 0.0, sp = 0.0;
    check(pr_correlation(preds[m].data(), preds[ref_idx].data(), n, &pe, &sp),
          "correlation");
    report["models"][files[m].name]["pearson_vs_ref"] = pe;
    report["models"][files[m].name]["spearman_vs_ref"] = sp;
  }

  if (opt.bootstrap > 0 && files.size() >= 1) {
    std::vector<const char*> names;
    std::vector<double> flat(files.size() * n);
    for (std::size_t m = 0; m < files.size(); ++m) {
      names.push_back(files[m].name.c_str());
      std::copy(preds[m].begin(), preds[m].end(), flat.begin() + m * n);
    }
    char* rep = nullptr;
    check(pr_bootstrap_compare(names.data(), names.size(), flat.data(),
                               labels.data(),
                               weights.empty() ? nullptr : weights.data(), n,
                               opt.bootstrap, opt.ci_level, opt.seed, &rep),
          "bootstrap");
    report["bootstrap"] = json::parse(take_string(rep));
  }

  if (!opt.out_path.empty()) {
    write_text(opt.out_path, report.dump(2) + "\n");
    std::cout << "report -> " << opt.out_path << "\n";
  }
  return 0;
}

namespace {

void write_score_csv(const std::string& path, pr_cohort* cohort,
                     const std::vector<double>& pred) {
  std::string text = "family_id,y_pred\n";
  for (std::size_t i = 0; i < pred.size(); ++i) {
    char* id = nullptr;
    check(pr_cohort_family_id(cohort, i, &id), "family id");
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%.17g\n", take_string(id).c_str(),
                  pred[i]);
    text += line;
  }
  write_text(path, text);
}

}  // namespace

int run_experiment(const ExperimentOptions& opt) {
  namespace fs = std::filesystem;
  if (opt.train_sizes.empty()) throw Fatal(2, "empty --train-sizes");
  fs::create_directories(opt.out_dir);
  auto path_in = [&](const std::string& name) {
    return (fs::path(opt.out_dir) / name).string();
  };

  PenetranceHandle pen = open_penetrance(opt.penetrance_path);
  ReferenceHandle ref = open_reference(opt.reference);
  int max_size = *std::max_element(opt.train_sizes.begin(),
                                   opt.train_sizes.end());

  std::cout << "simulating " << max_size << " training and " << opt.test_size
            << " test families\n";
  json train_params = {{"n", max_size},
                       {"horizon_years", opt.horizon},
                       {"seed", opt.seed},
                       {"workers", opt.workers},
                       {"prefix", "tr"}};
  CohortHandle train_all;
  check(pr_cohort_simulate(pen.get(), train_params.dump().c_str(),
                           train_all.out()),
        "simulate training cohort");
  json test_params = {{"n", opt.test_size},
                      {"horizon_years", opt.horizon},
                      {"seed", opt.seed + 1000000007ull},
                      {"workers", opt.workers},
                      {"prefix", "te"}};
  CohortHandle test;
  check(pr_cohort_simulate(pen.get(), test_params.dump().c_str(), test.out()),
        "simulate test cohort");
  check(pr_cohort_write(test.get(), path_in("test_families.csv").c_str()),
        "write test cohort");
  check(pr_cohort_write_outcomes(test.get(),
                                 path_in("test_outcomes.csv").c_str()),
        "write test outcomes");

  std::size_t n_test = 0;
  pr_cohort_size(test.get(), &n_test);
  std::vector<double> labels(n_test);
  check(pr_cohort_outcomes(test.get(), labels.data()), "test outcomes");

  std::cout << "scoring the test cohort with the peeling engine\n";
  std::vector<double> mend(n_test);
  check(pr_mendelian_predict(test.get(), pen.get(), opt.horizon, opt.workers,
                             mend.data(), nullptr),
        "mendelian predict");
  write_score_csv(path_in("pred_mendelian.csv"), test.get(), mend);

  json report;
  report["train_sizes"] = opt.train_sizes;
  report["test_size"] = opt.test_size;
  report["seed"] = opt.seed;
  report["results"] = json::array();

  char* mend_rep = nullptr;
  check(pr_metrics_report(mend.data(), labels.data(), nullptr, n_test,
                          &mend_rep),
        "mendelian metrics");
  report["mendelian"] = json::parse(take_string(mend_rep));
  std::printf("%-8s %-14s  %8s  %8s  %8s\n", "size", "model", "auc", "oe",
              "pearson");
  std::printf("%-8s %-14s  %8.4f  %8.4f  %8s\n", "-", "mendelian",
              report["mendelian"].value("auc", 0.0),
              report["mendelian"].value("oe", 0.0), "1.0");

  struct ModelRun {
    const char* kind;
    int epochs;
  };
  const ModelRun runs[] = {{"fcnn", opt.epochs_fcnn},
                           {"pedigree_cnn", opt.epochs_cnn}};

  std::vector<double> final_fcnn, final_cnn;
  for (int size : opt.train_sizes) {
    CohortHandle slice;
    check(pr_cohort_slice(train_all.get(), 0, static_cast<std::size_t>(size),
                          slice.out()),
          "slice");
    for (const ModelRun& run : runs) {
      std::string tag = std::string(run.kind) + "_" + std::to_string(size);
      std::cout << "training " << tag << "\n";
      json options = {{"kind", run.kind},
                      {"epochs", run.epochs},
                      {"batch_size", opt.batch_size},
                      {"learning_rate", opt.learning_rate},
                      {"seed", opt.seed},
                      {"encode_seed", opt.seed},
                      {"meta", {{"experiment_tag", tag}}}};
      ModelHandle model;
      check(pr_model_train(slice.get(), ref.get(), options.dump().c_str(),
                           model.out()),
            "train " + tag);
      check(pr_model_save(model.get(), path_in(tag + ".ckpt").c_str()),
            "save " + tag);
      std::vector<double> pred(n_test);
      check(pr_model_predict(model.get(), test.get(), opt.seed, pred.data()),
            "predict " + tag);
      write_score_csv(path_in("pred_" + tag + ".csv"), test.get(), pred);

      char* rep = nullptr;
      check(pr_metrics_report(pred.data(), labels.data(), nullptr, n_test,
                              &rep),
            "metrics " + tag);
      json metrics = json::parse(take_string(rep));
      double pe = 0.0, sp = 0.0;
      check(pr_correlation(pred.data(), mend.data(), n_test, &pe, &sp),
            "correlation " + tag);
      metrics["pearson_vs_mendelian"] = pe;
      metrics["spearman_vs_mendelian"] = sp;
      json entry = {{"size", size}, {"model", run.kind}, {"metrics", metrics}};
      report["results"].push_back(entry);
      std::printf("%-8d %-14s  %8.4f  %8.4f  %8.4f\n", size, run.kind,
                  metrics.value("auc", 0.0), metrics.value("oe", 0.0), pe);

      if (size == max_size) {
        if (std::string(run.kind) == "fcnn")
          final_fcnn = pred;
        else
          final_cnn = pred;
      }
    }
  }

  if (opt.bootstrap > 0 && !final_fcnn.empty() && !final_cnn.empty()) {
    std::cout << "bootstrap comparison at n=" << max_size << "\n";
    const char* names[] = {"mendelian", "fcnn", "pedigree_cnn"};
    std::vector<double> flat;
    flat.insert(flat.end(), mend.begin(), mend.end());
    flat.insert(flat.end(), final_fcnn.begin(), final_fcnn.end());
    flat.insert(flat.end(), final_cnn.begin(), final_cnn.end());
    char* rep = nullptr;
    check(pr_bootstrap_compare(names, 3, flat.data(), labels.data(), nullptr,
                               n_test, opt.bootstrap, 0.95, opt.seed, &rep),
          "bootstrap");
    report["bootstrap"] = json::parse(take_string(rep));
  }

  write_text(path_in("report.json"), report.dump(2) + "\n");
  std::cout << "report -> " << path_in("report.json") << "\n";
  return 0;
}

namespace {

// Shared 11-member household: counselee (40), parents, both grandparent
// couples (deceased), one aunt on each side, two maternal uncles. Variants
// layer cancer histories on top.
std::string scenario_csv() {
  struct Case {
    const char* id;
    int mgm_bc_onset;     // 0 = none
    bool mother_bc50;
    bool mother_oc60;
  };
  const Case cases[] = {{"A", 0, false, false},
                        {"B", 80, false, false},
                        {"C", 60, false, false},
                        {"D", 60, true, false},
                        {"E", 60, true, true}};
  std::string text =
      "family_id,member_id,mother_id,father_id,sex,current_age,deceased,"
      "bc_status,bc_onset_age,oc_status,oc_onset_age\n";
  for (const Case& c : cases) {
    auto row = [&](int id, const char* mom, const char* dad, int sex, int age,
                   int dead, int bc, int bc_age, int oc, int oc_age) {
      char line[160];
      std::snprintf(line, sizeof(line), "%s,%d,%s,%s,%d,%d,%d,%d,%d,%d,%d\n",
                    c.id, id, mom, dad, sex, age, dead, bc, bc_age, oc,
                    oc_age);
      text += line;
    };
    row(0, "1", "2", 0, 40, 0, 0, 0, 0, 0);
    row(1, "3", "4", 0, 67, 0, c.mother_bc50 ? 1 : 0, c.mother_bc50 ? 50 : 0,
        c.mother_oc60 ? 1 : 0, c.mother_oc60 ? 60 : 0);
    row(2, "5", "6", 1, 69, 0, 0, 0, 0, 0);
    row(3, "", "", 0, 85, 1, c.mgm_bc_onset > 0 ? 1 : 0, c.mgm_bc_onset, 0, 0);
    row(4, "", "", 1, 84, 1, 0, 0, 0, 0);
    row(5, "", "", 0, 83, 1, 0, 0, 0, 0);
    row(6, "", "", 1, 86, 1, 0, 0, 0, 0);
    row(7, "3", "4", 0, 64, 0, 0, 0, 0, 0);
    row(8, "3", "4", 1, 61, 0, 0, 0, 0, 0);
    row(9, "3", "4", 1, 62, 0, 0, 0, 0, 0);
    row(10, "5", "6", 0, 63, 0, 0, 0, 0, 0);
  }
  return text;
}

}  // namespace

int run_scenario(const ScenarioOptions& opt) {
  namespace fs = std::filesystem;
  fs::path dir = opt.work_dir.empty() ? fs::temp_directory_path()
                                      : fs::path(opt.work_dir);
  fs::create_directories(dir);
  std::string fixture = (dir / "scenario_families.csv").string();
  write_text(fixture, scenario_csv());

  PenetranceHandle pen = open_penetrance(opt.penetrance_path);
  CohortHandle cohort;
  check(pr_cohort_read(fixture.c_str(), cohort.out()), "read fixture");
  std::size_t n = 0;
  pr_cohort_size(cohort.get(), &n);
  std::vector<double> risk(n), post(n * 4);
  check(pr_mendelian_predict(cohort.get(), pen.get(), opt.horizon, 1,
                             risk.data(), post.data()),
        "scenario predict");

  json table = json::array();
  std::printf("%-8s  %12s  %12s  %12s  %12s  %10s\n", "variant",
              "p_noncarrier", "p_locus1", "p_locus2", "p_both", "risk");
  for (std::size_t i = 0; i < n; ++i) {
    char* id = nullptr;
    check(pr_cohort_family_id(cohort.get(), i, &id), "family id");
    std::string name = take_string(id);
    std::printf("%-8s  %12.6f  %12.6f  %12.6f  %12.6f  %10.6f\n", name.c_str(),
                post[i * 4], post[i * 4 + 1], post[i * 4 + 2], post[i * 4 + 3],
                risk[i]);
    table.push_back({{"variant", name},
                     {"posterior",
                      {post[i * 4], post[i * 4 + 1], post[i * 4 + 2],
                       post[i * 4 + 3]}},
                     {"risk", risk[i]}});
  }
  if (!opt.out_path.empty()) {
    write_text(opt.out_path,
               json{{"horizon", opt.horizon}, {"variants", table}}.dump(2) +
                   "\n");
    std::cout << "table -> " << opt.out_path << "\n";
  }
  return 0;
}

}  // namespace cli

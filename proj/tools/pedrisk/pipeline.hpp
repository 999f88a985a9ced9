#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cli {

struct EvaluateOptions {
  std::vector<std::string> pred_specs;  // name=path
  std::string labels_path;
  std::string followup_path;  // optional: family_id,time_years,event
  double horizon = 10.0;
  int bootstrap = 0;
  double ci_level = 0.95;
  std::uint64_t seed = 1;
  std::string corr_ref;  // model name correlations are taken against
  std::string out_path;  // empty = stdout only
};
int run_evaluate(const EvaluateOptions& opt);

struct ExperimentOptions {
  std::vector<int> train_sizes = {2500, 10000, 50000};
  int test_size = 20000;
  int horizon = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string penetrance_path;
  std::string reference = "default";
  int epochs_fcnn = 30;
  int epochs_cnn = 15;
  double learning_rate = 1e-3;
  int batch_size = 256;
  int bootstrap = 0;
  std::string out_dir;
};
int run_experiment(const ExperimentOptions& opt);

struct ScenarioOptions {
  std::string penetrance_path;
  int horizon = 10;
  std::string out_path;  // optional json
  std::string work_dir;  // where the fixture csv is written
};
int run_scenario(const ScenarioOptions& opt);

}  // namespace cli

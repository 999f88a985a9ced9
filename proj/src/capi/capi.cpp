#include "pedrisk/pedrisk.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/pedigree.hpp"
#include "core/rng.hpp"
#include "encode/encode.hpp"
#include "encode/reference.hpp"
#include "eval/bootstrap.hpp"
#include "eval/ipcw.hpp"
#include "eval/metrics.hpp"
#include "genetics/penetrance.hpp"
#include "mendelian/peeling.hpp"
#include "mendelian/recalibrate.hpp"
#include "nn/checkpoint.hpp"
#include "nn/network.hpp"
#include "nn/search.hpp"
#include "nn/train.hpp"
#include "sim/perturb.hpp"
#include "sim/simulate.hpp"
#include "sim/structure.hpp"

using nlohmann::json;

struct pr_cohort {
  pedrisk::Cohort c;
};
struct pr_penetrance {
  pedrisk::PenetranceModel m;
};
struct pr_reference {
  pedrisk::ReferenceStructure r;
};
struct pr_model {
  pedrisk::ModelBundle b;
};

namespace {

thread_local std::string g_error;

pr_status fail(pr_status code, const std::string& message) {
  g_error = message;
  return code;
}

// Runs the body and maps the library's exception types onto status codes.
template <typename Fn>
pr_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const pedrisk::IoError& e) {
    return fail(PR_ERR_IO, e.what());
  } catch (const pedrisk::ParseError& e) {
    return fail(PR_ERR_IO, e.what());
  } catch (const pedrisk::ValidationError& e) {
    return fail(PR_ERR_VALIDATION, e.what());
  } catch (const pedrisk::ArgumentError& e) {
    return fail(PR_ERR_INVALID_ARG, e.what());
  } catch (const pedrisk::NumericError& e) {
    return fail(PR_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PR_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return fail(PR_ERR_NUMERIC, e.what());
  }
}

pr_status require(bool ok, const char* message) {
  return ok ? PR_OK : fail(PR_ERR_INVALID_ARG, message);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_json_arg(const char* text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw pedrisk::ArgumentError(std::string(what) + ": invalid JSON");
  return j;
}

json metric_or_null(double (*fn)(const std::vector<double>&,
                                 const std::vector<double>&,
                                 const std::vector<double>&),
                    const std::vector<double>& preds,
                    const std::vector<double>& labels,
                    const std::vector<double>& weights) {
  try {
    return fn(preds, labels, weights);
  } catch (const pedrisk::NumericError&) {
    return nullptr;
  }
}

}  // namespace

extern "C" {

const char* pr_version(void) { return "1.0.0"; }

const char* pr_last_error(void) { return g_error.c_str(); }

void pr_string_free(char* s) { delete[] s; }

/* ---------------- penetrance ---------------- */

pr_status pr_penetrance_create_default(pr_penetrance** out) {
  if (pr_status s = require(out != nullptr, "null out pointer")) return s;
  return guarded([&] {
    auto* h = new pr_penetrance{pedrisk::build_penetrance(pedrisk::PenetranceConfig{})};
    *out = h;
    return PR_OK;
  });
}

pr_status pr_penetrance_load(const char* json_path, pr_penetrance** out) {
  if (pr_status s = require(json_path && out, "null argument")) return s;
  return guarded([&] {
    auto cfg = pedrisk::load_penetrance_config(json_path);
    *out = new pr_penetrance{pedrisk::build_penetrance(cfg)};
    return PR_OK;
  });
}

pr_status pr_penetrance_from_json(const char* json_text, pr_penetrance** out) {
  if (pr_status s = require(json_text && out, "null argument")) return s;
  return guarded([&] {
    auto cfg = pedrisk::parse_penetrance_config(json_text);
    *out = new pr_penetrance{pedrisk::build_penetrance(cfg)};
    return PR_OK;
  });
}

pr_status pr_penetrance_save(const pr_penetrance* p, const char* json_path) {
  if (pr_status s = require(p && json_path, "null argument")) return s;
  return guarded([&] {
    pedrisk::save_penetrance_config(p->m.config(), json_path);
    return PR_OK;
  });
}

pr_status pr_penetrance_lifetime(const pr_penetrance* p, int carrier_class,
                                 int sex, int cancer, double* out) {
  if (pr_status s = require(p && out, "null argument")) return s;
  if (pr_status s = require(carrier_class >= 0 && carrier_class < 4 &&
                                (sex == 0 || sex == 1) &&
                                (cancer == 0 || cancer == 1),
                            "index out of range"))
    return s;
  *out = p->m.lifetime(carrier_class, static_cast<pedrisk::Sex>(sex),
                       static_cast<pedrisk::Cancer>(cancer));
  return PR_OK;
}

pr_status pr_penetrance_cumulative(const pr_penetrance* p, int carrier_class,
                                   int sex, int cancer, int age, double* out) {
  if (pr_status s = require(p && out, "null argument")) return s;
  if (pr_status s = require(carrier_class >= 0 && carrier_class < 4 &&
                                (sex == 0 || sex == 1) &&
                                (cancer == 0 || cancer == 1) && age >= 0 &&
                                age <= pedrisk::kMaxAge,
                            "index out of range"))
    return s;
  *out = p->m.cumulative(carrier_class, static_cast<pedrisk::Sex>(sex),
                         static_cast<pedrisk::Cancer>(cancer), age);
  return PR_OK;
}

void pr_penetrance_free(pr_penetrance* p) { delete p; }

/* ---------------- cohorts ---------------- */

pr_status pr_cohort_read(const char* path, pr_cohort** out) {
  if (pr_status s = require(path && out, "null argument")) return s;
  return guarded([&] {
    auto* h = new pr_cohort;
    h->c.families = pedrisk::io::read_pedigrees(path);
    for (const auto& p : h->c.families) pedrisk::require_valid(p);
    *out = h;
    return PR_OK;
  });
}

pr_status pr_cohort_write(const pr_cohort* c, const char* path) {
  if (pr_status s = require(c && path, "null argument")) return s;
  return guarded([&] {
    pedrisk::io::write_pedigrees(c->c.families, path);
    return PR_OK;
  });
}

pr_status pr_cohort_simulate(const pr_penetrance* p, const char* params_json,
                             pr_cohort** out) {
  if (pr_status s = require(p && params_json && out, "null argument")) return s;
  return guarded([&] {
    json j = parse_json_arg(params_json, "simulate params");
    pedrisk::SimParams params;
    if (!j.contains("n")) throw pedrisk::ArgumentError("simulate params: missing n");
    params.n_families = j.at("n").get<std::size_t>();
    params.horizon_years = j.value("horizon_years", 10);
    params.seed = j.value("seed", 1ull);
    params.workers = j.value("workers", 1);
    params.family_id_prefix = j.value("prefix", std::string("f"));
    params.keep_excluded = j.value("keep_excluded", false);
    pedrisk::StructureDistribution structure =
        j.contains("structure")
            ? pedrisk::StructureDistribution::parse(j["structure"].dump())
            : pedrisk::StructureDistribution::defaults();
    auto* h = new pr_cohort{pedrisk::simulate_cohort(params, structure, p->m)};
    *out = h;
    return PR_OK;
  });
}

pr_status pr_cohort_size(const pr_cohort* c, size_t* out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  *out = c->c.size();
  return PR_OK;
}

pr_status pr_cohort_slice(const pr_cohort* c, size_t start, size_t count,
                          pr_cohort** out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  if (pr_status s = require(start <= c->c.size() &&
                                count <= c->c.size() - start,
                            "slice out of range"))
    return s;
  return guarded([&] {
    auto* h = new pr_cohort;
    h->c.families.assign(c->c.families.begin() + start,
                         c->c.families.begin() + start + count);
    if (c->c.has_outcomes())
      h->c.outcomes.assign(c->c.outcomes.begin() + start,
                           c->c.outcomes.begin() + start + count);
    if (c->c.truth.size() == c->c.size())
      h->c.truth.assign(c->c.truth.begin() + start,
                        c->c.truth.begin() + start + count);
    *out = h;
    return PR_OK;
  });
}

pr_status pr_cohort_family_id(const pr_cohort* c, size_t index, char** out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  if (pr_status s = require(index < c->c.size(), "family index out of range"))
    return s;
  *out = dup_string(c->c.families[index].family_id);
  return PR_OK;
}

pr_status pr_cohort_member_count(const pr_cohort* c, size_t index, int* out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  if (pr_status s = require(index < c->c.size(), "family index out of range"))
    return s;
  *out = static_cast<int>(c->c.families[index].size());
  return PR_OK;
}

pr_status pr_cohort_has_outcomes(const pr_cohort* c, int* out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  *out = c->c.has_outcomes() ? 1 : 0;
  return PR_OK;
}

pr_status pr_cohort_outcomes(const pr_cohort* c, double* out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  if (pr_status s = require(c->c.has_outcomes(), "cohort has no outcomes"))
    return s;
  for (std::size_t i = 0; i < c->c.size(); ++i)
    out[i] = static_cast<double>(c->c.outcomes[i]);
  return PR_OK;
}

pr_status pr_cohort_attach_outcomes(pr_cohort* c, const char* csv_path) {
  if (pr_status s = require(c && csv_path, "null argument")) return s;
  return guarded([&] {
    pedrisk::io::attach_outcomes(c->c, pedrisk::io::read_outcomes_csv(csv_path));
    return PR_OK;
  });
}

pr_status pr_cohort_write_outcomes(const pr_cohort* c, const char* csv_path) {
  if (pr_status s = require(c && csv_path, "null argument")) return s;
  return guarded([&] {
    if (!c->c.has_outcomes())
      throw pedrisk::ValidationError("cohort has no outcomes to write");
    std::vector<pedrisk::io::Outcome> rows;
    rows.reserve(c->c.size());
    for (std::size_t i = 0; i < c->c.size(); ++i)
      rows.push_back({c->c.families[i].family_id, c->c.outcomes[i]});
    pedrisk::io::write_outcomes_csv(rows, csv_path);
    return PR_OK;
  });
}

pr_status pr_cohort_write_truth(const pr_cohort* c, const char* csv_path) {
  if (pr_status s = require(c && csv_path, "null argument")) return s;
  return guarded([&] {
    if (c->c.truth.size() != c->c.size())
      throw pedrisk::ValidationError("cohort carries no simulator truth");
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"family_id", "carrier_class", "latent_bc_onset"});
    for (std::size_t i = 0; i < c->c.size(); ++i)
      rows.push_back({c->c.families[i].family_id,
                      std::to_string(c->c.truth[i].counselee_class),
                      std::to_string(c->c.truth[i].latent_bc_onset)});
    pedrisk::csv::write_file(csv_path, {}, rows);
    return PR_OK;
  });
}

pr_status pr_cohort_misreport(const pr_cohort* c, const char* config_json,
                              unsigned long long seed, pr_cohort** out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  return guarded([&] {
    pedrisk::MisreportConfig cfg =
        config_json ? pedrisk::MisreportConfig::parse(config_json)
                    : pedrisk::MisreportConfig{};
    auto* h = new pr_cohort{{pedrisk::perturb_misreport(c->c.families, cfg, seed),
                             c->c.outcomes, c->c.truth}};
    *out = h;
    return PR_OK;
  });
}

pr_status pr_cohort_drop_relatives(const pr_cohort* c, double fraction,
                                   int unaffected_only,
                                   unsigned long long seed, pr_cohort** out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  if (pr_status s = require(fraction >= 0.0 && fraction <= 1.0,
                            "fraction must lie in [0, 1]"))
    return s;
  return guarded([&] {
    auto mode = unaffected_only ? pedrisk::DropMode::UnaffectedOnly
                                : pedrisk::DropMode::Any;
    auto* h = new pr_cohort{
        {pedrisk::drop_relatives(c->c.families, fraction, mode, seed),
         c->c.outcomes, c->c.truth}};
    *out = h;
    return PR_OK;
  });
}

pr_status pr_cohort_blank_onsets(const pr_cohort* c, double fraction,
                                 unsigned long long seed, pr_cohort** out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  if (pr_status s = require(fraction >= 0.0 && fraction <= 1.0,
                            "fraction must lie in [0, 1]"))
    return s;
  return guarded([&] {
    auto* h = new pr_cohort{
        {pedrisk::blank_onset_ages(c->c.families, fraction, seed),
         c->c.outcomes, c->c.truth}};
    *out = h;
    return PR_OK;
  });
}

pr_status pr_cohort_impute_onsets(const pr_cohort* c, pr_cohort** out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  return guarded([&] {
    auto* h = new pr_cohort{{pedrisk::impute_onset_ages(c->c.families),
                             c->c.outcomes, c->c.truth}};
    *out = h;
    return PR_OK;
  });
}

void pr_cohort_free(pr_cohort* c) { delete c; }

/* ---------------- mendelian engine ---------------- */

pr_status pr_mendelian_predict(const pr_cohort* c, const pr_penetrance* p,
                               int horizon_years, int workers,
                               double* risk_out, double* posterior_out) {
  if (pr_status s = require(c && p && risk_out, "null argument")) return s;
  if (pr_status s = require(horizon_years > 0, "horizon must be positive"))
    return s;
  return guarded([&] {
    auto preds = pedrisk::mendelian_predict(c->c, p->m, horizon_years,
                                            workers < 1 ? 1 : workers);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      risk_out[i] = preds[i].risk;
      if (posterior_out)
        for (int k = 0; k < 4; ++k)
          posterior_out[i * 4 + k] = preds[i].posterior[k];
    }
    return PR_OK;
  });
}

pr_status pr_mendelian_brute_force(const pr_cohort* c, const pr_penetrance* p,
                                   size_t family_index, double* posterior_out) {
  if (pr_status s = require(c && p && posterior_out, "null argument")) return s;
  if (pr_status s = require(family_index < c->c.size(),
                            "family index out of range"))
    return s;
  return guarded([&] {
    auto post =
        pedrisk::brute_force_posterior(c->c.families[family_index], p->m);
    for (int k = 0; k < 4; ++k) posterior_out[k] = post[k];
    return PR_OK;
  });
}

pr_status pr_reference_risk(const pr_cohort* c, const char* table_json_path,
                            double* out) {
  if (pr_status s = require(c && out, "null argument")) return s;
  return guarded([&] {
    pedrisk::ReferenceRiskTable table =
        table_json_path ? pedrisk::ReferenceRiskTable::load(table_json_path)
                        : pedrisk::ReferenceRiskTable::default_table();
    for (std::size_t i = 0; i < c->c.size(); ++i)
      out[i] = pedrisk::reference_risk(c->c.families[i], table);
    return PR_OK;
  });
}

/* ---------------- reference layouts & encoding ---------------- */

pr_status pr_reference_preset(const char* name, pr_reference** out) {
  if (pr_status s = require(name && out, "null argument")) return s;
  return guarded([&] {
    *out = new pr_reference{pedrisk::ReferenceStructure::preset(name)};
    return PR_OK;
  });
}

pr_status pr_reference_load(const char* json_path, pr_reference** out) {
  if (pr_status s = require(json_path && out, "null argument")) return s;
  return guarded([&] {
    *out = new pr_reference{pedrisk::ReferenceStructure::load(json_path)};
    return PR_OK;
  });
}

pr_status pr_reference_save(const pr_reference* r, const char* json_path) {
  if (pr_status s = require(r && json_path, "null argument")) return s;
  return guarded([&] {
    r->r.save(json_path);
    return PR_OK;
  });
}

pr_status pr_reference_slot_count(const pr_reference* r, int* out) {
  if (pr_status s = require(r && out, "null argument")) return s;
  *out = r->r.total_slots();
  return PR_OK;
}

void pr_reference_free(pr_reference* r) { delete r; }

pr_status pr_encode_write_csv(const pr_cohort* c, const pr_reference* r,
                              unsigned long long seed, const char* csv_path) {
  if (pr_status s = require(c && r && csv_path, "null argument")) return s;
  return guarded([&] {
    pedrisk::EncodedDataset data =
        pedrisk::encode_families(c->c.families, r->r, seed);
    if (c->c.has_outcomes()) {
      data.y.assign(c->c.outcomes.begin(), c->c.outcomes.end());
    }
    pedrisk::write_encoded_csv(csv_path, data);
    return PR_OK;
  });
}

pr_status pr_encode_loss(const pr_cohort* c, const pr_reference* r,
                         double* out) {
  if (pr_status s = require(c && r && out, "null argument")) return s;
  return guarded([&] {
    *out = pedrisk::summarize_loss(c->c.families, r->r);
    return PR_OK;
  });
}

/* ---------------- models ---------------- */

namespace {

pedrisk::LossKind loss_from_string(const std::string& name) {
  if (name == "cross_entropy") return pedrisk::LossKind::CrossEntropy;
  if (name == "squared_error") return pedrisk::LossKind::SquaredError;
  throw pedrisk::ArgumentError("unknown loss: " + name);
}

pedrisk::Activation activation_from_string(const std::string& name) {
  if (name == "relu") return pedrisk::Activation::Relu;
  if (name == "elu") return pedrisk::Activation::Elu;
  if (name == "logistic") return pedrisk::Activation::Logistic;
  throw pedrisk::ArgumentError("unknown activation: " + name);
}

pedrisk::ModelKind kind_from_string(const std::string& name) {
  if (name == "logistic") return pedrisk::ModelKind::Logistic;
  if (name == "fcnn") return pedrisk::ModelKind::Fcnn;
  if (name == "pedigree_cnn") return pedrisk::ModelKind::PedigreeCnn;
  throw pedrisk::ArgumentError("unknown model kind: " + name);
}

struct TrainOptions {
  pedrisk::ArchitectureSpec spec;
  pedrisk::TrainConfig train;
  pedrisk::NeighborhoodSpec nbr;
  std::uint64_t encode_seed = 1;
  json meta = json::object();
};

TrainOptions parse_train_options(const json& j,
                                 const pedrisk::ReferenceStructure& ref) {
  TrainOptions opt;
  opt.spec.kind = kind_from_string(j.value("kind", std::string("fcnn")));
  opt.spec.hidden = j.value("hidden", std::vector<int>{30, 10});
  opt.spec.channels = j.value("channels", std::vector<int>{10, 5});
  opt.spec.activation =
      activation_from_string(j.value("activation", std::string("elu")));
  opt.spec.dropout = j.value("dropout", 0.2);
  opt.spec.n_slots = ref.total_slots();
  opt.spec.slot_features = pedrisk::kFeaturesPerSlot;
  opt.spec.extra_inputs = 0;
  opt.train.loss = loss_from_string(
      j.value("loss", std::string("squared_error")));
  opt.train.epochs = j.value(
      "epochs", opt.spec.kind == pedrisk::ModelKind::PedigreeCnn ? 15 : 30);
  opt.train.batch_size = j.value("batch_size", 256);
  opt.train.learning_rate = j.value("learning_rate", 1e-3);
  opt.train.weight_decay = j.value("weight_decay", 0.0);
  opt.train.seed = j.value("seed", 1ull);
  opt.encode_seed = j.value("encode_seed", 1ull);
  if (j.contains("neighborhood")) {
    const json& nb = j["neighborhood"];
    opt.nbr.m_sisters = nb.value("m_sisters", opt.nbr.m_sisters);
    opt.nbr.m_brothers = nb.value("m_brothers", opt.nbr.m_brothers);
    opt.nbr.m_daughters = nb.value("m_daughters", opt.nbr.m_daughters);
    opt.nbr.m_sons = nb.value("m_sons", opt.nbr.m_sons);
  }
  if (j.contains("meta")) opt.meta = j["meta"];
  return opt;
}

}  // namespace

pr_status pr_model_train(const pr_cohort* train, const pr_reference* r,
                         const char* options_json, pr_model** out) {
  if (pr_status s = require(train && r && options_json && out, "null argument"))
    return s;
  return guarded([&] {
    if (!train->c.has_outcomes())
      throw pedrisk::ValidationError("training cohort has no outcomes");
    json j = parse_json_arg(options_json, "train options");
    TrainOptions opt = parse_train_options(j, r->r);

    pedrisk::EncodedDataset data = pedrisk::encode_families(
        train->c.families, r->r, opt.encode_seed);
    data.y.assign(train->c.outcomes.begin(), train->c.outcomes.end());
    pedrisk::FeatureScaler scaler;
    scaler.fit(data);
    scaler.apply(data);
    pedrisk::Mat X = pedrisk::dataset_matrix(data);
    pedrisk::Vec y = pedrisk::dataset_labels(data);

    pedrisk::NeighborhoodMap nbr;
    const pedrisk::NeighborhoodMap* nbr_ptr = nullptr;
    if (opt.spec.kind == pedrisk::ModelKind::PedigreeCnn) {
      nbr = pedrisk::build_neighborhoods(
          r->r, opt.nbr, pedrisk::derive_seed(opt.encode_seed, 0x6e626872ull));
      nbr_ptr = &nbr;
    }
    pedrisk::Network net =
        pedrisk::Network::init(opt.spec, nbr_ptr, opt.train.seed);
    pedrisk::TrainResult result = pedrisk::train_network(net, X, y, {}, opt.train);

    auto* h = new pr_model;
    h->b.spec = opt.spec;
    h->b.loss = opt.train.loss;
    h->b.ref = r->r;
    h->b.nbr_spec = opt.nbr;
    h->b.net = std::move(net);
    h->b.scaler = std::move(scaler);
    json meta = opt.meta;
    meta["train"] = {{"epochs", opt.train.epochs},
                     {"batch_size", opt.train.batch_size},
                     {"learning_rate", opt.train.learning_rate},
                     {"weight_decay", opt.train.weight_decay},
                     {"loss", pedrisk::loss_kind_name(opt.train.loss)},
                     {"seed", opt.train.seed},
                     {"encode_seed", opt.encode_seed},
                     {"n_train", train->c.size()}};
    meta["epoch_loss"] = result.epoch_loss;
    meta["ref_hash"] = r->r.hash();
    h->b.meta_json = meta.dump();
    *out = h;
    return PR_OK;
  });
}

pr_status pr_model_tune(const pr_cohort* train, const pr_reference* r,
                        const char* options_json, char** report_json) {
  if (pr_status s =
          require(train && r && options_json && report_json, "null argument"))
    return s;
  return guarded([&] {
    if (!train->c.has_outcomes())
      throw pedrisk::ValidationError("tuning cohort has no outcomes");
    json j = parse_json_arg(options_json, "tune options");
    TrainOptions opt = parse_train_options(j, r->r);

    pedrisk::SearchSpace space;
    auto int_range = [&](const char* key, int& lo, int& hi) {
      if (!j.contains(key)) return;
      auto v = j[key].get<std::vector<int>>();
      if (v.size() != 2)
        throw pedrisk::ArgumentError(std::string(key) + " wants [lo, hi]");
      lo = v[0];
      hi = v[1];
    };
    auto real_range = [&](const char* key, double& lo, double& hi) {
      if (!j.contains(key)) return;
      auto v = j[key].get<std::vector<double>>();
      if (v.size() != 2)
        throw pedrisk::ArgumentError(std::string(key) + " wants [lo, hi]");
      lo = v[0];
      hi = v[1];
    };
    int_range("layers_range", space.layers_min, space.layers_max);
    int_range("width_range", space.width_min, space.width_max);
    int_range("filters_range", space.filters_min, space.filters_max);
    real_range("lr_range", space.lr_min, space.lr_max);
    real_range("decay_range", space.decay_min, space.decay_max);
    real_range("dropout_range", space.dropout_min, space.dropout_max);
    if (j.contains("activations")) {
      space.activations.clear();
      for (const auto& name : j["activations"])
        space.activations.push_back(
            activation_from_string(name.get<std::string>()));
    }
    int candidates = j.value("candidates", 8);

    pedrisk::EncodedDataset data = pedrisk::encode_families(
        train->c.families, r->r, opt.encode_seed);
    data.y.assign(train->c.outcomes.begin(), train->c.outcomes.end());
    pedrisk::FeatureScaler scaler;
    scaler.fit(data);
    scaler.apply(data);
    pedrisk::Mat X = pedrisk::dataset_matrix(data);
    pedrisk::Vec y = pedrisk::dataset_labels(data);

    pedrisk::NeighborhoodMap nbr;
    const pedrisk::NeighborhoodMap* nbr_ptr = nullptr;
    if (opt.spec.kind == pedrisk::ModelKind::PedigreeCnn) {
      nbr = pedrisk::build_neighborhoods(
          r->r, opt.nbr, pedrisk::derive_seed(opt.encode_seed, 0x6e626872ull));
      nbr_ptr = &nbr;
    }
    pedrisk::SearchResult result = pedrisk::random_search(
        opt.spec, opt.train, space, nbr_ptr, X, y, candidates, opt.train.seed);

    json rep;
    rep["kind"] = pedrisk::model_kind_name(opt.spec.kind);
    rep["candidates"] = json::array();
    for (const auto& cand : result.candidates) {
      json c = {{"learning_rate", cand.train.learning_rate},
                {"weight_decay", cand.train.weight_decay},
                {"dropout", cand.spec.dropout},
                {"activation", pedrisk::activation_name(cand.spec.activation)},
                {"holdout_auc", cand.holdout_auc}};
      if (opt.spec.kind == pedrisk::ModelKind::Fcnn)
        c["hidden"] = cand.spec.hidden;
      else if (opt.spec.kind == pedrisk::ModelKind::PedigreeCnn)
        c["channels"] = cand.spec.channels;
      rep["candidates"].push_back(c);
    }
    rep["best"] = result.best;
    *report_json = dup_string(rep.dump(2));
    return PR_OK;
  });
}

pr_status pr_model_save(const pr_model* m, const char* path) {
  if (pr_status s = require(m && path, "null argument")) return s;
  return guarded([&] {
    pedrisk::save_model(path, m->b);
    return PR_OK;
  });
}

pr_status pr_model_load(const char* path, pr_model** out) {
  if (pr_status s = require(path && out, "null argument")) return s;
  return guarded([&] {
    auto* h = new pr_model;
    h->b = pedrisk::load_model(path);
    *out = h;
    return PR_OK;
  });
}

pr_status pr_model_predict(const pr_model* m, const pr_cohort* c,
                           unsigned long long seed, double* out) {
  if (pr_status s = require(m && c && out, "null argument")) return s;
  return guarded([&] {
    pedrisk::EncodedDataset data =
        pedrisk::encode_families(c->c.families, m->b.ref, seed);
    m->b.scaler.apply(data);
    pedrisk::Mat X = pedrisk::dataset_matrix(data);
    pedrisk::Vec p = m->b.net.predict(X);
    for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = p(i);
    return PR_OK;
  });
}

pr_status pr_model_info(const pr_model* m, char** json_out) {
  if (pr_status s = require(m && json_out, "null argument")) return s;
  return guarded([&] {
    json info;
    info["kind"] = pedrisk::model_kind_name(m->b.spec.kind);
    info["loss"] = pedrisk::loss_kind_name(m->b.loss);
    info["activation"] = pedrisk::activation_name(m->b.spec.activation);
    info["hidden"] = m->b.spec.hidden;
    info["channels"] = m->b.spec.channels;
    info["dropout"] = m->b.spec.dropout;
    info["n_slots"] = m->b.spec.n_slots;
    info["slot_features"] = m->b.spec.slot_features;
    info["parameters"] = m->b.net.num_params();
    json meta = json::parse(m->b.meta_json, nullptr, false);
    info["meta"] = meta.is_discarded() ? json::object() : meta;
    *json_out = dup_string(info.dump(2));
    return PR_OK;
  });
}

void pr_model_free(pr_model* m) { delete m; }

/* ---------------- evaluation ---------------- */

pr_status pr_metrics_report(const double* preds, const double* labels,
                            const double* weights, size_t n, char** json_out) {
  if (pr_status s = require(preds && labels && json_out, "null argument"))
    return s;
  if (pr_status s = require(n > 0, "empty input")) return s;
  return guarded([&] {
    std::vector<double> p(preds, preds + n), l(labels, labels + n);
    std::vector<double> w;
    if (weights) w.assign(weights, weights + n);

    json rep;
    rep["n"] = n;
    rep["oe"] = metric_or_null(pedrisk::oe_ratio, p, l, w);
    rep["auc"] = metric_or_null(pedrisk::auc, p, l, w);
    rep["average_precision"] = metric_or_null(pedrisk::average_precision, p, l, w);
    double br = pedrisk::brier(p, l, w);
    rep["brier"] = br;
    rep["brier_sqrt"] = std::sqrt(br);
    rep["calibration"] = json::array();
    for (const auto& bin : pedrisk::calibration_bins(p, l, w)) {
      rep["calibration"].push_back({{"mean_pred", bin.mean_pred},
                                    {"mean_obs", bin.mean_obs},
                                    {"count", bin.count},
                                    {"weight", bin.weight}});
    }
    *json_out = dup_string(rep.dump(2));
    return PR_OK;
  });
}

pr_status pr_correlation(const double* a, const double* b, size_t n,
                         double* pearson_out, double* spearman_out) {
  if (pr_status s = require(a && b, "null argument")) return s;
  if (pr_status s = require(n > 1, "needs at least two points")) return s;
  return guarded([&] {
    std::vector<double> va(a, a + n), vb(b, b + n);
    if (pearson_out) *pearson_out = pedrisk::pearson(va, vb);
    if (spearman_out) *spearman_out = pedrisk::spearman(va, vb);
    return PR_OK;
  });
}

pr_status pr_bootstrap_compare(const char* const* names, size_t n_models,
                               const double* preds, const double* labels,
                               const double* weights, size_t n,
                               int replicates, double ci_level,
                               unsigned long long seed, char** json_out) {
  if (pr_status s = require(names && preds && labels && json_out, "null argument"))
    return s;
  if (pr_status s = require(n_models > 0 && n > 0, "empty input")) return s;
  if (pr_status s = require(ci_level > 0.0 && ci_level < 1.0,
                            "ci_level must lie in (0, 1)"))
    return s;
  return guarded([&] {
    std::vector<std::string> model_names;
    std::vector<std::vector<double>> model_preds;
    for (size_t m = 0; m < n_models; ++m) {
      if (!names[m]) throw pedrisk::ArgumentError("null model name");
      model_names.emplace_back(names[m]);
      model_preds.emplace_back(preds + m * n, preds + (m + 1) * n);
    }
    std::vector<double> l(labels, labels + n);
    std::vector<double> w;
    if (weights) w.assign(weights, weights + n);
    pedrisk::BootstrapComparison cmp = pedrisk::bootstrap_compare(
        model_names, model_preds, l, w, replicates, ci_level, seed);

    json rep;
    rep["replicates"] = cmp.replicates;
    rep["models"] = json::array();
    for (size_t m = 0; m < n_models; ++m) {
      rep["models"].push_back(
          {{"name", cmp.names[m]},
           {"auc",
            {{"point", cmp.auc[m].point}, {"lo", cmp.auc[m].lo},
             {"hi", cmp.auc[m].hi}, {"valid", cmp.auc[m].valid_replicates}}},
           {"oe",
            {{"point", cmp.oe[m].point}, {"lo", cmp.oe[m].lo},
             {"hi", cmp.oe[m].hi}, {"valid", cmp.oe[m].valid_replicates}}},
           {"brier",
            {{"point", cmp.brier[m].point}, {"lo", cmp.brier[m].lo},
             {"hi", cmp.brier[m].hi},
             {"valid", cmp.brier[m].valid_replicates}}}});
    }
    rep["auc_wins"] = cmp.auc_wins;
    rep["oe_wins"] = cmp.oe_wins;
    *json_out = dup_string(rep.dump(2));
    return PR_OK;
  });
}

pr_status pr_ipcw_weights(const double* times, const int* events, size_t n,
                          double horizon, double* weights_out) {
  if (pr_status s = require(times && events && weights_out, "null argument"))
    return s;
  if (pr_status s = require(n > 0, "empty input")) return s;
  return guarded([&] {
    std::vector<pedrisk::FollowUp> subjects;
    subjects.reserve(n);
    for (size_t i = 0; i < n; ++i)
      subjects.push_back({times[i], events[i] != 0});
    std::vector<double> w = pedrisk::ipcw_weights(subjects, horizon);
    std::copy(w.begin(), w.end(), weights_out);
    return PR_OK;
  });
}

}  // extern "C"

#include "nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

#include "core/errors.hpp"

namespace pedrisk {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'P', 'R', 'N', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::ifstream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw IoError("checkpoint: truncated file");
}

json spec_to_json(const ArchitectureSpec& spec) {
  return json{{"kind", model_kind_name(spec.kind)},
              {"hidden", spec.hidden},
              {"channels", spec.channels},
              {"activation", activation_name(spec.activation)},
              {"dropout", spec.dropout},
              {"n_slots", spec.n_slots},
              {"slot_features", spec.slot_features},
              {"extra_inputs", spec.extra_inputs}};
}

ModelKind kind_from_name(const std::string& name) {
  if (name == "logistic") return ModelKind::Logistic;
  if (name == "fcnn") return ModelKind::Fcnn;
  if (name == "pedigree_cnn") return ModelKind::PedigreeCnn;
  throw ParseError("checkpoint: unknown model kind " + name);
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "elu") return Activation::Elu;
  if (name == "logistic") return Activation::Logistic;
  throw ParseError("checkpoint: unknown activation " + name);
}

ArchitectureSpec spec_from_json(const json& j) {
  ArchitectureSpec spec;
  spec.kind = kind_from_name(j.at("kind").get<std::string>());
  spec.hidden = j.at("hidden").get<std::vector<int>>();
  spec.channels = j.at("channels").get<std::vector<int>>();
  spec.activation = activation_from_name(j.at("activation").get<std::string>());
  spec.dropout = j.at("dropout").get<double>();
  spec.n_slots = j.at("n_slots").get<int>();
  spec.slot_features = j.at("slot_features").get<int>();
  spec.extra_inputs = j.at("extra_inputs").get<int>();
  return spec;
}

}  // namespace

void save_model(const std::string& path, const ModelBundle& bundle) {
  json header;
  header["spec"] = spec_to_json(bundle.spec);
  header["loss"] = loss_kind_name(bundle.loss);
  header["ref_slots"] = bundle.ref.slots;
  header["nbr_spec"] = {{"m_sisters", bundle.nbr_spec.m_sisters},
                        {"m_brothers", bundle.nbr_spec.m_brothers},
                        {"m_daughters", bundle.nbr_spec.m_daughters},
                        {"m_sons", bundle.nbr_spec.m_sons}};
  const NeighborhoodMap& nbr = bundle.net.neighborhoods();
  header["nbr_slots"] = nbr.n_slots;
  header["nbr_width"] = nbr.width;

  std::vector<double> params;
  bundle.net.get_params(params);
  header["param_count"] = params.size();
  if (!bundle.scaler.fitted())
    throw ArgumentError("checkpoint: scaler must be fitted before saving");
  header["scaler_dim"] = bundle.scaler.mins().size();
  json meta = json::parse(bundle.meta_json, nullptr, false);
  header["meta"] = meta.is_discarded() ? json::object() : meta;

  std::string head = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  put_bytes(out, kMagic, sizeof(kMagic));
  put_bytes(out, &kVersion, sizeof(kVersion));
  std::uint64_t head_len = head.size();
  put_bytes(out, &head_len, sizeof(head_len));
  put_bytes(out, head.data(), head.size());
  if (!nbr.idx.empty()) {
    std::vector<std::int32_t> idx(nbr.idx.begin(), nbr.idx.end());
    put_bytes(out, idx.data(), idx.size() * sizeof(std::int32_t));
  }
  put_bytes(out, params.data(), params.size() * sizeof(double));
  put_bytes(out, bundle.scaler.mins().data(),
            bundle.scaler.mins().size() * sizeof(double));
  put_bytes(out, bundle.scaler.ranges().data(),
            bundle.scaler.ranges().size() * sizeof(double));
  if (!out) throw IoError("write failed: " + path);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  get_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ParseError("checkpoint: bad magic");
  std::uint32_t version = 0;
  get_bytes(in, &version, sizeof(version));
  if (version != kVersion) throw ParseError("checkpoint: unsupported version");
  std::uint64_t head_len = 0;
  get_bytes(in, &head_len, sizeof(head_len));
  if (head_len > (1ull << 24)) throw ParseError("checkpoint: oversized header");
  std::string head(head_len, '\0');
  get_bytes(in, head.data(), head.size());
  json header = json::parse(head, nullptr, false);
  if (header.is_discarded()) throw ParseError("checkpoint: corrupt header");

  ModelBundle bundle;
  bundle.spec = spec_from_json(header.at("spec"));
  std::string loss = header.at("loss").get<std::string>();
  bundle.loss = loss == "squared_error" ? LossKind::SquaredError
                                        : LossKind::CrossEntropy;
  auto ref_slots = header.at("ref_slots").get<std::vector<int>>();
  if (ref_slots.size() != static_cast<std::size_t>(kNumRelativeTypes))
    throw ParseError("checkpoint: reference slot table has wrong length");
  for (int i = 0; i < kNumRelativeTypes; ++i) bundle.ref.slots[i] = ref_slots[i];
  const json& ns = header.at("nbr_spec");
  bundle.nbr_spec.m_sisters = ns.at("m_sisters").get<int>();
  bundle.nbr_spec.m_brothers = ns.at("m_brothers").get<int>();
  bundle.nbr_spec.m_daughters = ns.at("m_daughters").get<int>();
  bundle.nbr_spec.m_sons = ns.at("m_sons").get<int>();
  bundle.meta_json = header.value("meta", json::object()).dump();

  NeighborhoodMap nbr;
  nbr.n_slots = header.at("nbr_slots").get<int>();
  nbr.width = header.at("nbr_width").get<int>();
  std::size_t idx_count =
      static_cast<std::size_t>(nbr.n_slots) * static_cast<std::size_t>(nbr.width);
  if (idx_count > 0) {
    std::vector<std::int32_t> idx(idx_count);
    get_bytes(in, idx.data(), idx.size() * sizeof(std::int32_t));
    nbr.idx.assign(idx.begin(), idx.end());
  }

  bundle.net = Network::init(bundle.spec,
                             bundle.spec.kind == ModelKind::PedigreeCnn ? &nbr
                                                                        : nullptr,
                             0);
  if (bundle.spec.kind != ModelKind::PedigreeCnn && idx_count > 0)
    bundle.net.set_neighborhoods(std::move(nbr));

  std::size_t param_count = header.at("param_count").get<std::size_t>();
  if (param_count != bundle.net.num_params())
    throw ParseError("checkpoint: parameter count does not match geometry");
  std::vector<double> params(param_count);
  get_bytes(in, params.data(), params.size() * sizeof(double));
  bundle.net.set_params(params);

  std::size_t dim = header.at("scaler_dim").get<std::size_t>();
  std::vector<double> mins(dim), ranges(dim);
  get_bytes(in, mins.data(), dim * sizeof(double));
  get_bytes(in, ranges.data(), dim * sizeof(double));
  bundle.scaler.restore(std::move(mins), std::move(ranges));
  return bundle;
}

}  // namespace pedrisk

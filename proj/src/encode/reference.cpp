#include "encode/reference.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace pedrisk {

namespace {

using nlohmann::json;

int type_count(const ReferenceStructure& ref, RelativeType t) {
  return ref.slots[static_cast<int>(t)];
}

ReferenceStructure make(std::initializer_list<std::pair<RelativeType, int>> counts) {
  ReferenceStructure ref;
  for (const auto& [t, n] : counts) ref.slots[static_cast<int>(t)] = n;
  return ref;
}

// The simulator's maximal observable household; 26 slots in total.
ReferenceStructure preset_default() {
  return make({{RelativeType::Mother, 1},
               {RelativeType::Father, 1},
               {RelativeType::MaternalGrandmother, 1},
               {RelativeType::MaternalGrandfather, 1},
               {RelativeType::PaternalGrandmother, 1},
               {RelativeType::PaternalGrandfather, 1},
               {RelativeType::MaternalAunt, 2},
               {RelativeType::MaternalUncle, 3},
               {RelativeType::PaternalAunt, 3},
               {RelativeType::PaternalUncle, 2},
               {RelativeType::Sister, 2},
               {RelativeType::Brother, 3},
               {RelativeType::Daughter, 2},
               {RelativeType::Son, 2}});
}

// 14 slots: core household plus one relative of each collateral type.
ReferenceStructure preset_q1s() {
  return make({{RelativeType::Mother, 1},
               {RelativeType::Father, 1},
               {RelativeType::MaternalGrandmother, 1},
               {RelativeType::MaternalGrandfather, 1},
               {RelativeType::PaternalGrandmother, 1},
               {RelativeType::PaternalGrandfather, 1},
               {RelativeType::MaternalAunt, 1},
               {RelativeType::MaternalUncle, 1},
               {RelativeType::PaternalAunt, 1},
               {RelativeType::PaternalUncle, 1},
               {RelativeType::Sister, 1},
               {RelativeType::Brother, 1},
               {RelativeType::Daughter, 1}});
}

// 20 slots.
ReferenceStructure preset_q2s() {
  return make({{RelativeType::Mother, 1},
               {RelativeType::Father, 1},
               {RelativeType::MaternalGrandmother, 1},
               {RelativeType::MaternalGrandfather, 1},
               {RelativeType::PaternalGrandmother, 1},
               {RelativeType::PaternalGrandfather, 1},
               {RelativeType::MaternalAunt, 2},
               {RelativeType::MaternalUncle, 2},
               {RelativeType::PaternalAunt, 1},
               {RelativeType::PaternalUncle, 1},
               {RelativeType::Sister, 2},
               {RelativeType::Brother, 2},
               {RelativeType::Daughter, 2},
               {RelativeType::Son, 1}});
}

// 19 slots, symmetric collateral counts.
ReferenceStructure preset_app19() {
  return make({{RelativeType::Mother, 1},
               {RelativeType::Father, 1},
               {RelativeType::MaternalGrandmother, 1},
               {RelativeType::MaternalGrandfather, 1},
               {RelativeType::PaternalGrandmother, 1},
               {RelativeType::PaternalGrandfather, 1},
               {RelativeType::MaternalAunt, 1},
               {RelativeType::MaternalUncle, 1},
               {RelativeType::PaternalAunt, 1},
               {RelativeType::PaternalUncle, 1},
               {RelativeType::Sister, 2},
               {RelativeType::Brother, 2},
               {RelativeType::Daughter, 2},
               {RelativeType::Son, 2}});
}

bool female_slot_type(RelativeType t) {
  switch (t) {
    case RelativeType::Counselee:  // female by convention
    case RelativeType::Mother:
    case RelativeType::MaternalGrandmother:
    case RelativeType::PaternalGrandmother:
    case RelativeType::MaternalAunt:
    case RelativeType::PaternalAunt:
    case RelativeType::Sister:
    case RelativeType::Daughter:
      return true;
    default:
      return false;
  }
}

}  // namespace

int ReferenceStructure::total_slots() const {
  int n = 0;
  for (int c : slots) n += c;
  return n;
}

int ReferenceStructure::slot_offset(RelativeType t) const {
  int off = 0;
  for (int i = 0; i < static_cast<int>(t); ++i) off += slots[i];
  return off;
}

RelativeType ReferenceStructure::type_of_slot(int slot) const {
  int off = 0;
  for (int i = 0; i < kNumRelativeTypes; ++i) {
    off += slots[i];
    if (slot < off) return static_cast<RelativeType>(i);
  }
  throw ArgumentError("slot index out of range");
}

ReferenceStructure ReferenceStructure::preset(const std::string& name) {
  if (name == "default" || name == "sim26" || name == "q3s") return preset_default();
  if (name == "q1s") return preset_q1s();
  if (name == "q2s") return preset_q2s();
  if (name == "app19") return preset_app19();
  throw ArgumentError("unknown reference preset: " + name);
}

ReferenceStructure ReferenceStructure::parse(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ParseError("reference structure: invalid JSON");
  if (!j.is_object() || !j.contains("slots") || !j["slots"].is_object())
    throw ParseError("reference structure: expected object with \"slots\"");
  ReferenceStructure ref;
  for (const auto& [key, val] : j["slots"].items()) {
    std::optional<RelativeType> t = relative_type_from_name(key);
    if (!t || *t == RelativeType::Other)
      throw ParseError("reference structure: unknown relative type " + key);
    RelativeType type = *t;
    int n = val.get<int>();
    if (n < 0 || n > 16)
      throw ValidationError("reference structure: slot count out of range for " + key);
    ref.slots[static_cast<int>(type)] = n;
  }
  if (ref.slots[0] != 1)
    throw ValidationError("reference structure: counselee slot count must be 1");
  return ref;
}

ReferenceStructure ReferenceStructure::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open " + json_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ReferenceStructure::save(const std::string& json_path) const {
  json j;
  for (int i = 0; i < kNumRelativeTypes; ++i) {
    RelativeType t = static_cast<RelativeType>(i);
    if (t == RelativeType::Other) continue;
    j["slots"][relative_type_name(t)] = slots[i];
  }
  std::ofstream out(json_path);
  if (!out) throw IoError("cannot open " + json_path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + json_path);
}

std::uint64_t ReferenceStructure::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int c : slots) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

NeighborhoodMap build_neighborhoods(const ReferenceStructure& ref,
                                    const NeighborhoodSpec& spec,
                                    std::uint64_t seed) {
  const int n = ref.total_slots();
  const int w = spec.width();

  // Slot-level skeleton: each slot gets the parent slots its relative type
  // implies. Children attach to the counselee (treated as their mother).
  std::vector<int> mother(n, -1), father(n, -1);
  auto first_slot = [&](RelativeType t) -> int {
    return type_count(ref, t) > 0 ? ref.slot_offset(t) : -1;
  };
  for (int s = 0; s < n; ++s) {
    switch (ref.type_of_slot(s)) {
      case RelativeType::Counselee:
      case RelativeType::Sister:
      case RelativeType::Brother:
        mother[s] = first_slot(RelativeType::Mother);
        father[s] = first_slot(RelativeType::Father);
        break;
      case RelativeType::Mother:
      case RelativeType::MaternalAunt:
      case RelativeType::MaternalUncle:
        mother[s] = first_slot(RelativeType::MaternalGrandmother);
        father[s] = first_slot(RelativeType::MaternalGrandfather);
        break;
      case RelativeType::Father:
      case RelativeType::PaternalAunt:
      case RelativeType::PaternalUncle:
        mother[s] = first_slot(RelativeType::PaternalGrandmother);
        father[s] = first_slot(RelativeType::PaternalGrandfather);
        break;
      case RelativeType::Daughter:
      case RelativeType::Son:
        mother[s] = 0;
        break;
      default:
        break;
    }
  }

  auto shares_parent = [&](int a, int b) {
    bool m = mother[a] >= 0 && mother[a] == mother[b];
    bool f = father[a] >= 0 && father[a] == father[b];
    return m || f;
  };

  Rng rng(seed);
  auto pick = [&](std::vector<int>& pool, int cap) {
    if (static_cast<int>(pool.size()) > cap) {
      std::vector<std::uint32_t> keep =
          rng.sample_without_replacement(pool.size(), cap);
      std::sort(keep.begin(), keep.end());
      std::vector<int> out;
      out.reserve(cap);
      for (std::uint32_t k : keep) out.push_back(pool[k]);
      pool = std::move(out);
    }
  };

  NeighborhoodMap map;
  map.n_slots = n;
  map.width = w;
  map.idx.assign(static_cast<std::size_t>(n) * w, -1);
  for (int s = 0; s < n; ++s) {
    std::vector<int> sisters, brothers, daughters, sons;
    for (int o = 0; o < n; ++o) {
      if (o == s) continue;
      bool fem = female_slot_type(ref.type_of_slot(o));
      if (shares_parent(s, o)) (fem ? sisters : brothers).push_back(o);
      if (mother[o] == s || father[o] == s) (fem ? daughters : sons).push_back(o);
    }
    pick(sisters, spec.m_sisters);
    pick(brothers, spec.m_brothers);
    pick(daughters, spec.m_daughters);
    pick(sons, spec.m_sons);

    int* row = &map.idx[static_cast<std::size_t>(s) * w];
    row[0] = s;
    row[1] = mother[s];
    row[2] = father[s];
    int base = 3;
    auto put = [&](const std::vector<int>& v, int cap) {
      for (std::size_t k = 0; k < v.size(); ++k) row[base + static_cast<int>(k)] = v[k];
      base += cap;
    };
    put(sisters, spec.m_sisters);
    put(brothers, spec.m_brothers);
    put(daughters, spec.m_daughters);
    put(sons, spec.m_sons);
  }
  return map;
}

}  // namespace pedrisk

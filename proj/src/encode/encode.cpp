#include "encode/encode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace pedrisk {

namespace {

void fill_slot(double* cell, const Member& m) {
  cell[0] = m.current_age ? static_cast<double>(*m.current_age) : 0.0;
  cell[1] = m.bc_affected ? 1.0 : 0.0;
  cell[2] = m.oc_affected ? 1.0 : 0.0;
  cell[3] = (m.bc_affected && m.bc_onset_age && *m.bc_onset_age > 0)
                ? static_cast<double>(*m.bc_onset_age)
                : 0.0;
  cell[4] = (m.oc_affected && m.oc_onset_age && *m.oc_onset_age > 0)
                ? static_cast<double>(*m.oc_onset_age)
                : 0.0;
  cell[5] = m.sex == Sex::Male ? 1.0 : 0.0;
  cell[6] = 0.0;
}

// Members of one type that fit its slot budget, original order; overfull
// lists are thinned by seeded sampling so no family position is favored.
std::vector<int> placed_members(std::vector<int>& pool, int cap, Rng& rng) {
  if (static_cast<int>(pool.size()) > cap) {
    std::vector<std::uint32_t> keep =
        rng.sample_without_replacement(pool.size(), cap);
    std::sort(keep.begin(), keep.end());
    std::vector<int> out;
    out.reserve(cap);
    for (std::uint32_t k : keep) out.push_back(pool[k]);
    return out;
  }
  return pool;
}

}  // namespace

std::vector<double> standardize_family(const Pedigree& p,
                                       const ReferenceStructure& ref,
                                       std::uint64_t seed) {
  const int n_slots = ref.total_slots();
  std::vector<double> x(static_cast<std::size_t>(n_slots) * kFeaturesPerSlot, 0.0);
  for (int s = 0; s < n_slots; ++s)
    x[static_cast<std::size_t>(s) * kFeaturesPerSlot + 6] = 1.0;

  std::vector<RelativeType> types = classify_all(p);
  std::array<std::vector<int>, kNumRelativeTypes> by_type;
  for (std::size_t i = 0; i < p.members.size(); ++i)
    by_type[static_cast<int>(types[i])].push_back(static_cast<int>(i));

  Rng rng(seed);
  for (int t = 0; t < kNumRelativeTypes; ++t) {
    int cap = ref.slots[t];
    if (cap == 0) continue;
    std::vector<int> kept = placed_members(by_type[t], cap, rng);
    int base = ref.slot_offset(static_cast<RelativeType>(t));
    for (std::size_t k = 0; k < kept.size(); ++k) {
      double* cell =
          &x[static_cast<std::size_t>(base + static_cast<int>(k)) * kFeaturesPerSlot];
      fill_slot(cell, p.members[kept[k]]);
    }
  }
  return x;
}

EncodedDataset encode_families(const std::vector<Pedigree>& families,
                               const ReferenceStructure& ref,
                               std::uint64_t seed,
                               const std::vector<std::vector<double>>* extras) {
  EncodedDataset out;
  out.n_slots = ref.total_slots();
  std::size_t extra_dim = 0;
  if (extras) {
    if (extras->size() != families.size())
      throw ArgumentError("extra covariates: one vector per family required");
    extra_dim = extras->empty() ? 0 : (*extras)[0].size();
  }
  out.n = families.size();
  out.dim = static_cast<std::size_t>(out.n_slots) * kFeaturesPerSlot + extra_dim;
  out.x.resize(out.n * out.dim);
  out.family_ids.reserve(out.n);
  for (std::size_t i = 0; i < families.size(); ++i) {
    out.family_ids.push_back(families[i].family_id);
    std::vector<double> row =
        standardize_family(families[i], ref, derive_seed(seed, i));
    double* dst = out.row(i);
    std::copy(row.begin(), row.end(), dst);
    if (extra_dim > 0) {
      const std::vector<double>& ex = (*extras)[i];
      if (ex.size() != extra_dim)
        throw ArgumentError("extra covariates: ragged lengths");
      std::copy(ex.begin(), ex.end(), dst + row.size());
    }
  }
  return out;
}

double summarize_loss(const std::vector<Pedigree>& families,
                      const ReferenceStructure& ref) {
  if (families.empty()) return 0.0;
  double total = 0.0;
  for (const Pedigree& p : families) {
    std::vector<RelativeType> types = classify_all(p);
    std::array<int, kNumRelativeTypes> counts{};
    for (RelativeType t : types) counts[static_cast<int>(t)]++;
    int mapped = 0;
    for (int t = 0; t < kNumRelativeTypes; ++t)
      mapped += std::min(counts[t], ref.slots[t]);
    total += 1.0 - static_cast<double>(mapped) /
                       static_cast<double>(p.members.size());
  }
  return total / static_cast<double>(families.size());
}

void FeatureScaler::fit(const EncodedDataset& data) {
  if (data.n == 0) throw ArgumentError("scaler fit: empty dataset");
  min_.assign(data.dim, std::numeric_limits<double>::infinity());
  std::vector<double> max(data.dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.n; ++i) {
    const double* r = data.row(i);
    for (std::size_t j = 0; j < data.dim; ++j) {
      min_[j] = std::min(min_[j], r[j]);
      max[j] = std::max(max[j], r[j]);
    }
  }
  range_.resize(data.dim);
  for (std::size_t j = 0; j < data.dim; ++j) range_[j] = max[j] - min_[j];
  fitted_ = true;
}

void FeatureScaler::apply(EncodedDataset& data) const {
  if (!fitted_) throw ArgumentError("scaler applied before fit");
  if (data.dim != min_.size())
    throw ArgumentError("scaler applied to mismatched column count");
  for (std::size_t i = 0; i < data.n; ++i) {
    double* r = data.row(i);
    for (std::size_t j = 0; j < data.dim; ++j)
      r[j] = range_[j] > 0.0 ? (r[j] - min_[j]) / range_[j] : 0.0;
  }
}

void FeatureScaler::restore(std::vector<double> mins, std::vector<double> ranges) {
  if (mins.size() != ranges.size())
    throw ArgumentError("scaler restore: length mismatch");
  min_ = std::move(mins);
  range_ = std::move(ranges);
  fitted_ = true;
}

void write_encoded_csv(const std::string& path, const EncodedDataset& data) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.n + 1);
  std::vector<std::string> header = {"family_id", "y"};
  for (std::size_t j = 0; j < data.dim; ++j)
    header.push_back("x" + std::to_string(j));
  rows.push_back(std::move(header));
  for (std::size_t i = 0; i < data.n; ++i) {
    std::vector<std::string> row;
    row.reserve(data.dim + 2);
    row.push_back(data.family_ids[i]);
    row.push_back(data.y.empty() ? "nan" : csv::format_double(data.y[i]));
    const double* r = data.row(i);
    for (std::size_t j = 0; j < data.dim; ++j)
      row.push_back(csv::format_double(r[j]));
    rows.push_back(std::move(row));
  }
  csv::write_file(path, {}, rows);
}

EncodedDataset read_encoded_csv(const std::string& path) {
  std::vector<csv::Row> rows = csv::read_file(path);
  if (rows.empty()) throw ParseError("encoded matrix: missing header");
  const csv::Row& header = rows[0];
  if (header.fields.size() < 2 || header.fields[0] != "family_id" ||
      header.fields[1] != "y")
    throw ParseError("encoded matrix: unexpected header", header.line_number);
  EncodedDataset out;
  out.dim = header.fields.size() - 2;
  out.n = rows.size() - 1;
  out.x.resize(out.n * out.dim);
  out.family_ids.reserve(out.n);
  bool any_y = false;
  std::vector<double> ys;
  ys.reserve(out.n);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const csv::Row& row = rows[i];
    if (row.fields.size() != header.fields.size())
      throw ParseError("encoded matrix: ragged row", row.line_number);
    out.family_ids.push_back(row.fields[0]);
    double y = std::nan("");
    if (row.fields[1] != "nan") {
      y = csv::to_double(row.fields[1], "y", row.line_number);
      any_y = true;
    }
    ys.push_back(y);
    double* r = out.row(i - 1);
    for (std::size_t j = 0; j < out.dim; ++j)
      r[j] = csv::to_double(row.fields[2 + j], "x", row.line_number);
  }
  if (any_y) out.y = std::move(ys);
  return out;
}

}  // namespace pedrisk

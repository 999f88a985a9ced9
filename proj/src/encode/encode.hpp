#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/pedigree.hpp"
#include "encode/reference.hpp"

namespace pedrisk {

// Per-slot feature columns, in order: current_age, breast status, ovarian
// status, breast onset age, ovarian onset age, sex (1 = male), absence
// indicator (1 = slot unfilled; all other columns zero in that case).
constexpr int kFeaturesPerSlot = 7;

// Maps one family onto the reference layout. Members are classified against
// the counselee; each lands in the next free slot of its type, unplaceable
// members (type exhausted or unclassifiable) are dropped. When a type is
// overfull the kept members are drawn without replacement using `seed` and
// laid out in original member order.
std::vector<double> standardize_family(const Pedigree& p,
                                       const ReferenceStructure& ref,
                                       std::uint64_t seed);

struct EncodedDataset {
  std::vector<std::string> family_ids;
  std::size_t n = 0;
  std::size_t dim = 0;        // columns per row = n_slots*7 + extra columns
  int n_slots = 0;
  std::vector<double> x;      // row-major, n * dim
  std::vector<double> y;      // empty when outcomes are absent

  const double* row(std::size_t i) const { return &x[i * dim]; }
  double* row(std::size_t i) { return &x[i * dim]; }
};

// Encodes every family; per-family seeds derive from `seed` by cohort index.
// `extras` optionally appends per-family covariate columns after the slot
// block (each inner vector must share one length).
EncodedDataset encode_families(const std::vector<Pedigree>& families,
                               const ReferenceStructure& ref,
                               std::uint64_t seed,
                               const std::vector<std::vector<double>>* extras = nullptr);

// Fraction of relatives that standardization discards, averaged over
// families. The counselee always maps, so the value lives in [0, 1).
double summarize_loss(const std::vector<Pedigree>& families,
                      const ReferenceStructure& ref);

// Column-wise min-max scaler to [0, 1]. Constant columns map to 0.
class FeatureScaler {
 public:
  void fit(const EncodedDataset& data);
  void apply(EncodedDataset& data) const;
  bool fitted() const { return fitted_; }

  const std::vector<double>& mins() const { return min_; }
  const std::vector<double>& ranges() const { return range_; }
  void restore(std::vector<double> mins, std::vector<double> ranges);

 private:
  std::vector<double> min_, range_;
  bool fitted_ = false;
};

// Encoded-matrix CSV: header row `family_id,y,x0,...`, y written as `nan`
// when outcomes are absent.
void write_encoded_csv(const std::string& path, const EncodedDataset& data);
EncodedDataset read_encoded_csv(const std::string& path);

}  // namespace pedrisk

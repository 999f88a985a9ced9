#pragma once

#include <array>
#include <cstdint>

namespace pedrisk {

// Two autosomal dominant loci, each summarized by the pathogenic allele
// count {0,1,2}. The joint genotype packs both counts into one index.
constexpr int kNumLoci = 2;
constexpr int kAlleleStates = 3;
constexpr int kNumGenotypes = 9;  // 3 * 3
constexpr int kNumClasses = 4;    // collapsed carrier classes

inline constexpr int genotype_index(int count1, int count2) {
  return count1 * kAlleleStates + count2;
}
inline constexpr int locus1_count(int g) { return g / kAlleleStates; }
inline constexpr int locus2_count(int g) { return g % kAlleleStates; }

// Class order: 0 noncarrier, 1 locus1 only, 2 locus2 only, 3 both.
inline constexpr int carrier_class_of(int g) {
  return (locus1_count(g) > 0 ? 1 : 0) + (locus2_count(g) > 0 ? 2 : 0);
}

// Hardy-Weinberg genotype probabilities for one locus.
std::array<double, 3> hwe_prior(double allele_freq);

// Joint founder prior over the 9 genotypes; loci are independent.
std::array<double, kNumGenotypes> founder_prior(double freq1, double freq2);

// P(child count | mother count, father count) for one locus: each parent
// transmits the pathogenic allele with probability count/2.
double locus_transmission(int child, int mother, int father);

// Flattened joint table T[gc * 81 + gm * 9 + gf]; loci transmit
// independently, so the joint factorizes as a product of the per-locus
// tables. Built once, shared.
const std::array<double, kNumGenotypes * kNumGenotypes * kNumGenotypes>&
joint_transmission();

inline double transmission(int gc, int gm, int gf) {
  return joint_transmission()[gc * 81 + gm * 9 + gf];
}

}  // namespace pedrisk

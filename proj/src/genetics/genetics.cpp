#include "genetics/genetics.hpp"

namespace pedrisk {

std::array<double, 3> hwe_prior(double allele_freq) {
  double f = allele_freq;
  return {(1.0 - f) * (1.0 - f), 2.0 * f * (1.0 - f), f * f};
}

std::array<double, kNumGenotypes> founder_prior(double freq1, double freq2) {
  auto p1 = hwe_prior(freq1);
  auto p2 = hwe_prior(freq2);
  std::array<double, kNumGenotypes> out{};
  for (int c1 = 0; c1 < 3; ++c1)
    for (int c2 = 0; c2 < 3; ++c2)
      out[genotype_index(c1, c2)] = p1[c1] * p2[c2];
  return out;
}

double locus_transmission(int child, int mother, int father) {
  double tm = mother / 2.0;  // P(mother passes the pathogenic allele)
  double tf = father / 2.0;
  switch (child) {
    case 0:
      return (1.0 - tm) * (1.0 - tf);
    case 1:
      return tm * (1.0 - tf) + (1.0 - tm) * tf;
    case 2:
      return tm * tf;
    default:
      return 0.0;
  }
}

const std::array<double, kNumGenotypes * kNumGenotypes * kNumGenotypes>&
joint_transmission() {
  static const auto table = [] {
    std::array<double, kNumGenotypes * kNumGenotypes * kNumGenotypes> t{};
    for (int gc = 0; gc < kNumGenotypes; ++gc)
      for (int gm = 0; gm < kNumGenotypes; ++gm)
        for (int gf = 0; gf < kNumGenotypes; ++gf)
          t[gc * 81 + gm * 9 + gf] =
              locus_transmission(locus1_count(gc), locus1_count(gm),
                                 locus1_count(gf)) *
              locus_transmission(locus2_count(gc), locus2_count(gm),
                                 locus2_count(gf));
    return t;
  }();
  return table;
}

}  // namespace pedrisk

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/pedigree.hpp"

namespace pedrisk {

// Fixed slot layout shared by every standardized family: one slot per
// reference relative, laid out in canonical type order (counselee, mother,
// father, grandparents, aunts/uncles, siblings, children).
struct ReferenceStructure {
  std::array<int, kNumRelativeTypes> slots{};

  ReferenceStructure() { slots[0] = 1; }

  int total_slots() const;
  int slot_offset(RelativeType t) const;  // first slot index of the type
  RelativeType type_of_slot(int slot) const;

  // Named presets: "default" (the 26-slot layout used by the simulator,
  // same counts as "q3s"), quartile layouts "q1","q1s","q2","q2s","q3s",
  // "q4", and the 19-slot "app19".
  static ReferenceStructure preset(const std::string& name);
  static ReferenceStructure load(const std::string& json_path);
  static ReferenceStructure parse(const std::string& json_text);
  void save(const std::string& json_path) const;

  // Stable content hash; stored in checkpoints so a model refuses inputs
  // encoded against a different layout.
  std::uint64_t hash() const;
};

// Neighborhood template widths: self + mother + father + m_sisters +
// m_brothers + m_daughters + m_sons slots per neighborhood.
struct NeighborhoodSpec {
  int m_sisters = 3;
  int m_brothers = 3;
  int m_daughters = 2;
  int m_sons = 2;
  int width() const { return 3 + m_sisters + m_brothers + m_daughters + m_sons; }
};

// Per-slot gather indices into the slot array; -1 marks an absent relative
// whose features read as zeros. Overfull within-type lists are downsampled
// without replacement using `seed`; order within a type follows slot index.
struct NeighborhoodMap {
  int n_slots = 0;
  int width = 0;
  std::vector<int> idx;  // n_slots * width

  int at(int slot, int k) const { return idx[slot * width + k]; }
};

NeighborhoodMap build_neighborhoods(const ReferenceStructure& ref,
                                    const NeighborhoodSpec& spec,
                                    std::uint64_t seed);

}  // namespace pedrisk

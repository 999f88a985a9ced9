#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pedrisk {

enum class Sex : int { Female = 0, Male = 1 };

// One person at baseline. Ages are integer years in [0, 94]; current_age is
// the age today if alive, the age at death otherwise, and nullopt if unknown.
// Onset ages are 0 for never affected, >0 for the diagnosis age, and nullopt
// when the person is affected but the age was not recorded.
struct Member {
  int id = 0;
  std::optional<int> mother_id;
  std::optional<int> father_id;
  Sex sex = Sex::Female;
  std::optional<int> current_age;
  bool deceased = false;
  bool bc_affected = false;
  std::optional<int> bc_onset_age = 0;
  bool oc_affected = false;
  std::optional<int> oc_onset_age = 0;
};

struct Pedigree {
  std::string family_id;
  std::vector<Member> members;  // index == Member::id, index 0 is counselee

  const Member& counselee() const { return members.at(0); }
  std::size_t size() const { return members.size(); }
};

// Slot-canonical order: this enum drives both classification and the slot
// layout of standardized inputs, so keep the order in sync with
// ReferenceStructure.
enum class RelativeType : int {
  Counselee = 0,
  Mother,
  Father,
  MaternalGrandmother,
  MaternalGrandfather,
  PaternalGrandmother,
  PaternalGrandfather,
  MaternalAunt,
  MaternalUncle,
  PaternalAunt,
  PaternalUncle,
  Sister,
  Brother,
  Daughter,
  Son,
  Other,
};
constexpr int kNumRelativeTypes = 16;

const char* relative_type_name(RelativeType t);
std::optional<RelativeType> relative_type_from_name(const std::string& name);

// Clinical degree of the type: 1 for parents/siblings/children, 2 for
// grandparents/aunts/uncles, 0 for the counselee, -1 for Other.
int relative_type_degree(RelativeType t);

struct Violation {
  int member_id = -1;
  std::string rule;
  std::string message;
};

// Structural and field-level checks; returns every violation found rather
// than stopping at the first.
std::vector<Violation> validate(const Pedigree& p);

void require_valid(const Pedigree& p);

// Relationship of member r to the counselee, derived from parent links and
// sex only. Half-siblings count as siblings, half-aunts as aunts.
RelativeType classify_relative(const Pedigree& p, int r);

std::vector<RelativeType> classify_all(const Pedigree& p);

// True if `ancestor` appears on some parent chain above `descendant`.
bool is_ancestor(const Pedigree& p, int ancestor, int descendant);

struct FamilyTruth {
  int counselee_class = 0;       // carrier class drawn for the counselee
  int latent_bc_onset = 0;       // 0 = never, else onset age in 1..94
};

// A batch of families plus optional aligned labels/truth (empty when absent).
struct Cohort {
  std::vector<Pedigree> families;
  std::vector<std::int8_t> outcomes;  // y0 per family
  std::vector<FamilyTruth> truth;     // simulator bookkeeping

  std::size_t size() const { return families.size(); }
  bool has_outcomes() const { return outcomes.size() == families.size(); }
};

}  // namespace pedrisk

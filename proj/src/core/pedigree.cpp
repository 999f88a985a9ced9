#include "core/pedigree.hpp"

#include <algorithm>
#include <array>

#include "core/errors.hpp"

namespace pedrisk {

namespace {

const std::array<const char*, kNumRelativeTypes> kTypeNames = {
    "counselee",
    "mother",
    "father",
    "maternal_grandmother",
    "maternal_grandfather",
    "paternal_grandmother",
    "paternal_grandfather",
    "maternal_aunt",
    "maternal_uncle",
    "paternal_aunt",
    "paternal_uncle",
    "sister",
    "brother",
    "daughter",
    "son",
    "other",
};

bool in_range(const Pedigree& p, int id) {
  return id >= 0 && static_cast<std::size_t>(id) < p.members.size();
}

// Collects all ancestors of `start` (excluding itself). Walks parent links;
// cycles are guarded by a visit cap so validate() can report them instead of
// hanging.
void collect_ancestors(const Pedigree& p, int start, std::vector<bool>& mark) {
  std::vector<int> stack;
  stack.push_back(start);
  std::size_t guard = 0;
  const std::size_t limit = p.members.size() * p.members.size() + 16;
  while (!stack.empty() && guard++ < limit) {
    int cur = stack.back();
    stack.pop_back();
    const Member& m = p.members[cur];
    for (const auto& pid : {m.mother_id, m.father_id}) {
      if (pid && in_range(p, *pid) && !mark[*pid]) {
        mark[*pid] = true;
        stack.push_back(*pid);
      }
    }
  }
}

}  // namespace

const char* relative_type_name(RelativeType t) {
  return kTypeNames[static_cast<int>(t)];
}

std::optional<RelativeType> relative_type_from_name(const std::string& name) {
  for (int i = 0; i < kNumRelativeTypes; ++i)
    if (name == kTypeNames[i]) return static_cast<RelativeType>(i);
  return std::nullopt;
}

int relative_type_degree(RelativeType t) {
  switch (t) {
    case RelativeType::Counselee:
      return 0;
    case RelativeType::Mother:
    case RelativeType::Father:
    case RelativeType::Sister:
    case RelativeType::Brother:
    case RelativeType::Daughter:
    case RelativeType::Son:
      return 1;
    case RelativeType::Other:
      return -1;
    default:
      return 2;
  }
}

std::vector<Violation> validate(const Pedigree& p) {
  std::vector<Violation> out;
  auto add = [&](int id, const char* rule, std::string msg) {
    out.push_back(Violation{id, rule, std::move(msg)});
  };

  if (p.members.empty()) {
    add(-1, "counselee", "pedigree has no members");
    return out;
  }

  const int n = static_cast<int>(p.members.size());
  for (int i = 0; i < n; ++i) {
    const Member& m = p.members[i];
    if (m.id != i)
      add(m.id, "member_index", "member id does not match its position");

    if (m.current_age && (*m.current_age < 0 || *m.current_age > 94))
      add(m.id, "age_range", "current_age outside [0, 94]");

    for (const auto* side : {&m.mother_id, &m.father_id}) {
      const auto& pid = *side;
      if (!pid) continue;
      if (!in_range(p, *pid) || *pid == m.id) {
        add(m.id, "parent_ref", "parent id out of range or self");
        continue;
      }
      bool is_mother = side == &m.mother_id;
      Sex want = is_mother ? Sex::Female : Sex::Male;
      if (p.members[*pid].sex != want)
        add(m.id, "parent_sex",
            is_mother ? "mother_id refers to a male member"
                      : "father_id refers to a female member");
    }
    if (m.mother_id && m.father_id && *m.mother_id == *m.father_id)
      add(m.id, "parent_ref", "mother_id equals father_id");

    // Affection status and onset age must agree; a missing onset age is only
    // meaningful for an affected member.
    auto check_onset = [&](bool affected, const std::optional<int>& onset,
                           const char* cancer) {
      if (affected) {
        if (onset && *onset <= 0)
          add(m.id, "onset_status",
              std::string(cancer) + " affected but onset age is not positive");
        if (onset && *onset > 94)
          add(m.id, "age_range", std::string(cancer) + " onset above 94");
        if (onset && m.current_age && *onset > *m.current_age)
          add(m.id, "onset_order",
              std::string(cancer) + " onset after current age");
      } else {
        if (!onset || *onset != 0)
          add(m.id, "onset_status",
              std::string(cancer) + " unaffected but onset age is not 0");
      }
    };
    check_onset(m.bc_affected, m.bc_onset_age, "breast");
    check_onset(m.oc_affected, m.oc_onset_age, "ovarian");

    if (m.oc_affected && m.sex != Sex::Female)
      add(m.id, "ovarian_sex", "ovarian cancer recorded for a male member");
  }

  // Ancestor table: reused for self-ancestry and marriage-loop checks.
  std::vector<std::vector<bool>> anc(n);
  for (int i = 0; i < n; ++i) {
    anc[i].assign(n, false);
    collect_ancestors(p, i, anc[i]);
    if (anc[i][i]) add(i, "ancestry_cycle", "member is its own ancestor");
  }

  // Mates must not be blood relatives: a shared ancestor (or one mate being
  // the other's ancestor) creates a pedigree loop the engine cannot peel.
  std::vector<std::pair<int, int>> couples;
  for (const Member& m : p.members) {
    if (m.mother_id && m.father_id && in_range(p, *m.mother_id) &&
        in_range(p, *m.father_id)) {
      auto c = std::make_pair(*m.mother_id, *m.father_id);
      if (std::find(couples.begin(), couples.end(), c) == couples.end())
        couples.push_back(c);
    }
  }
  for (auto [a, b] : couples) {
    if (anc[a][a] || anc[b][b]) continue;  // already reported as a cycle
    bool related = anc[a][b] || anc[b][a];
    for (int k = 0; !related && k < n; ++k) related = anc[a][k] && anc[b][k];
    if (related)
      add(a, "marriage_loop",
          "mates " + std::to_string(a) + " and " + std::to_string(b) +
              " are blood relatives");
  }

  return out;
}

void require_valid(const Pedigree& p) {
  auto v = validate(p);
  if (!v.empty()) {
    std::string msg = "pedigree '" + p.family_id + "' invalid: [member " +
                      std::to_string(v.front().member_id) + "] " +
                      v.front().rule + ": " + v.front().message;
    if (v.size() > 1)
      msg += " (+" + std::to_string(v.size() - 1) + " more violations)";
    throw ValidationError(msg);
  }
}

RelativeType classify_relative(const Pedigree& p, int r) {
  if (r == 0) return RelativeType::Counselee;
  if (!in_range(p, r)) throw ArgumentError("member index out of range");

  const Member& self = p.members[0];
  const Member& m = p.members[r];
  auto mother = self.mother_id;
  auto father = self.father_id;

  if (mother && r == *mother) return RelativeType::Mother;
  if (father && r == *father) return RelativeType::Father;

  if (mother) {
    const Member& mo = p.members[*mother];
    if (mo.mother_id && *mo.mother_id == r)
      return RelativeType::MaternalGrandmother;
    if (mo.father_id && *mo.father_id == r)
      return RelativeType::MaternalGrandfather;
  }
  if (father) {
    const Member& fa = p.members[*father];
    if (fa.mother_id && *fa.mother_id == r)
      return RelativeType::PaternalGrandmother;
    if (fa.father_id && *fa.father_id == r)
      return RelativeType::PaternalGrandfather;
  }

  auto shares_parent = [&](const Member& a, const Member& b) {
    return (a.mother_id && b.mother_id && *a.mother_id == *b.mother_id) ||
           (a.father_id && b.father_id && *a.father_id == *b.father_id);
  };

  if (mother && shares_parent(m, p.members[*mother]))
    return m.sex == Sex::Female ? RelativeType::MaternalAunt
                                : RelativeType::MaternalUncle;
  if (father && shares_parent(m, p.members[*father]))
    return m.sex == Sex::Female ? RelativeType::PaternalAunt
                                : RelativeType::PaternalUncle;

  if (shares_parent(m, self))
    return m.sex == Sex::Female ? RelativeType::Sister : RelativeType::Brother;

  if ((m.mother_id && *m.mother_id == 0) || (m.father_id && *m.father_id == 0))
    return m.sex == Sex::Female ? RelativeType::Daughter : RelativeType::Son;

  return RelativeType::Other;
}

std::vector<RelativeType> classify_all(const Pedigree& p) {
  std::vector<RelativeType> out(p.members.size());
  for (std::size_t r = 0; r < p.members.size(); ++r)
    out[r] = classify_relative(p, static_cast<int>(r));
  return out;
}

bool is_ancestor(const Pedigree& p, int ancestor, int descendant) {
  if (!in_range(p, ancestor) || !in_range(p, descendant)) return false;
  std::vector<bool> mark(p.members.size(), false);
  collect_ancestors(p, descendant, mark);
  return mark[ancestor];
}

}  // namespace pedrisk

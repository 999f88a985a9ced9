#include <fstream>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/pedigree.hpp"
#include "doctest.h"

using namespace pedrisk;

namespace {

Member person(int id, Sex sex, int age, std::optional<int> mother = {},
              std::optional<int> father = {}) {
  Member m;
  m.id = id;
  m.sex = sex;
  m.current_age = age;
  m.mother_id = mother;
  m.father_id = father;
  return m;
}

// Counselee 0 with parents 1, 2, maternal grandparents 3, 4, sister 5,
// maternal aunt 6, daughter 7.
Pedigree base_family() {
  Pedigree p;
  p.family_id = "t";
  p.members.push_back(person(0, Sex::Female, 40, 1, 2));
  p.members.push_back(person(1, Sex::Female, 67, 3, 4));
  p.members.push_back(person(2, Sex::Male, 69));
  p.members.push_back(person(3, Sex::Female, 85));
  p.members.push_back(person(4, Sex::Male, 86));
  p.members.push_back(person(5, Sex::Female, 38, 1, 2));
  p.members.push_back(person(6, Sex::Female, 64, 3, 4));
  p.members.push_back(person(7, Sex::Female, 15, 0));
  return p;
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
  for (const auto& x : v)
    if (x.rule == rule) return true;
  return false;
}

}  // namespace

TEST_CASE("valid family passes") {
  CHECK(validate(base_family()).empty());
  CHECK_NOTHROW(require_valid(base_family()));
}

TEST_CASE("relative classification") {
  auto p = base_family();
  auto types = classify_all(p);
  CHECK(types[0] == RelativeType::Counselee);
  CHECK(types[1] == RelativeType::Mother);
  CHECK(types[2] == RelativeType::Father);
  CHECK(types[3] == RelativeType::MaternalGrandmother);
  CHECK(types[4] == RelativeType::MaternalGrandfather);
  CHECK(types[5] == RelativeType::Sister);
  CHECK(types[6] == RelativeType::MaternalAunt);
  CHECK(types[7] == RelativeType::Daughter);
}

TEST_CASE("half relatives classify like full ones") {
  auto p = base_family();
  // Half-sister: shares only the mother.
  p.members.push_back(person(8, Sex::Female, 30, 1, {}));
  CHECK(classify_relative(p, 8) == RelativeType::Sister);
  // Half-uncle: mother's half-brother through grandmother only.
  p.members.push_back(person(9, Sex::Male, 60, 3, {}));
  CHECK(classify_relative(p, 9) == RelativeType::MaternalUncle);
}

TEST_CASE("unrelated and distant members classify as other") {
  auto p = base_family();
  p.members.push_back(person(8, Sex::Male, 50));  // no links
  CHECK(classify_relative(p, 8) == RelativeType::Other);
  // Cousin: child of the maternal aunt.
  p.members.push_back(person(9, Sex::Female, 30, 6, {}));
  CHECK(classify_relative(p, 9) == RelativeType::Other);
}

TEST_CASE("sex of parent links is enforced") {
  auto p = base_family();
  p.members[7].mother_id = 2;  // father listed as mother
  auto v = validate(p);
  CHECK(!v.empty());
  CHECK(has_rule(v, "parent_sex"));
}

TEST_CASE("onset consistency is enforced") {
  auto p = base_family();

  SUBCASE("status without onset age") {
    p.members[1].bc_affected = true;
    p.members[1].bc_onset_age = 0;
    CHECK(has_rule(validate(p), "onset_status"));
  }
  SUBCASE("onset age without status") {
    p.members[1].bc_onset_age = 45;
    CHECK(has_rule(validate(p), "onset_status"));
  }
  SUBCASE("onset after current age") {
    p.members[1].bc_affected = true;
    p.members[1].bc_onset_age = 70;  // current_age 67
    CHECK(has_rule(validate(p), "onset_order"));
  }
  SUBCASE("male ovarian cancer") {
    p.members[2].oc_affected = true;
    p.members[2].oc_onset_age = 60;
    CHECK(has_rule(validate(p), "ovarian_sex"));
  }
  SUBCASE("affected with unrecorded onset age is legal") {
    p.members[1].bc_affected = true;
    p.members[1].bc_onset_age.reset();
    CHECK(validate(p).empty());
  }
}

TEST_CASE("graph structure is enforced") {
  SUBCASE("self-ancestor cycle") {
    auto p = base_family();
    p.members[3].mother_id = 1;  // grandmother's mother is her own daughter
    CHECK(has_rule(validate(p), "ancestry_cycle"));
  }
  SUBCASE("dangling parent reference") {
    auto p = base_family();
    p.members[7].father_id = 42;
    CHECK(has_rule(validate(p), "parent_ref"));
  }
  SUBCASE("mates who are blood relatives") {
    auto p = base_family();
    p.members[2].mother_id = 3;  // parents become half-siblings
    CHECK(has_rule(validate(p), "marriage_loop"));
  }
  SUBCASE("require_valid throws with family id in the message") {
    auto p = base_family();
    p.members[7].father_id = 42;
    CHECK_THROWS_AS(require_valid(p), ValidationError);
  }
}

TEST_CASE("ancestor query walks parent chains") {
  auto p = base_family();
  CHECK(is_ancestor(p, 1, 0));
  CHECK(is_ancestor(p, 3, 0));
  CHECK(is_ancestor(p, 3, 7));
  CHECK(!is_ancestor(p, 0, 3));
  CHECK(!is_ancestor(p, 5, 0));
}

TEST_CASE("pedigree csv roundtrip") {
  auto p = base_family();
  p.members[1].bc_affected = true;
  p.members[1].bc_onset_age = 45;
  p.members[3].deceased = true;
  p.members[3].oc_affected = true;
  p.members[3].oc_onset_age.reset();  // affected, age unrecorded
  p.members[2].current_age.reset();   // age unknown

  std::string path = "pedigree_roundtrip.csv";
  io::write_pedigrees_csv({p}, path);
  auto back = io::read_pedigrees_csv(path);
  REQUIRE(back.size() == 1);
  const auto& q = back[0];
  REQUIRE(q.size() == p.size());
  CHECK(q.family_id == "t");
  CHECK(q.members[1].bc_affected);
  CHECK(q.members[1].bc_onset_age == 45);
  CHECK(q.members[3].deceased);
  CHECK(q.members[3].oc_affected);
  CHECK(!q.members[3].oc_onset_age.has_value());
  CHECK(!q.members[2].current_age.has_value());
  CHECK(q.members[7].mother_id == 0);
  CHECK(!q.members[7].father_id.has_value());
}

TEST_CASE("reader rejects malformed rows") {
  std::string path = "pedigree_bad.csv";
  {
    std::ofstream out(path);
    out << "family_id,member_id,mother_id,father_id,sex,current_age,deceased,"
           "bc_status,bc_onset_age,oc_status,oc_onset_age\n";
    out << "f,0,,,0,40,0,0,0,0,0\n";
    out << "f,1,,,2,67,0,0,0,0,0\n";  // sex out of range
  }
  CHECK_THROWS_AS(io::read_pedigrees_csv(path), ParseError);
}

#pragma once

#include <string>
#include <vector>

#include "core/pedigree.hpp"

namespace pedrisk::io {

// Pedigree table, one row per member:
//   family_id,member_id,mother_id,father_id,sex,current_age,deceased,
//   bc_status,bc_onset_age,oc_status,oc_onset_age
// Empty cells mean missing. member_id 0 marks the counselee; ids may be
// sparse in the file and are renumbered densely (counselee first, the rest
// in file order). An empty file yields an empty list.
std::vector<Pedigree> read_pedigrees_csv(const std::string& path);
std::vector<Pedigree> parse_pedigrees_csv(const std::string& text);
void write_pedigrees_csv(const std::vector<Pedigree>& peds,
                         const std::string& path,
                         const std::vector<std::string>& comments = {});

// Same data as JSON: [{"family_id": ..., "members": [{...}]}]. Field names
// match the CSV columns; missing values are nulls or omitted keys.
std::vector<Pedigree> read_pedigrees_json(const std::string& path);
void write_pedigrees_json(const std::vector<Pedigree>& peds,
                          const std::string& path);

// Dispatch on explicit format ("csv"/"json") or the file extension.
std::vector<Pedigree> read_pedigrees(const std::string& path,
                                     const std::string& format = "");
void write_pedigrees(const std::vector<Pedigree>& peds,
                     const std::string& path, const std::string& format = "");

// Outcome labels: family_id,y0 with y0 in {0,1}.
struct Outcome {
  std::string family_id;
  int y0 = 0;
};
std::vector<Outcome> read_outcomes_csv(const std::string& path);
void write_outcomes_csv(const std::vector<Outcome>& rows,
                        const std::string& path,
                        const std::vector<std::string>& comments = {});

// Aligns outcome rows to cohort order by family_id; every family must be
// covered exactly once.
void attach_outcomes(Cohort& cohort, const std::vector<Outcome>& rows);

// Model scores: carrier-class posterior plus the horizon risk.
struct PredictionRow {
  std::string family_id;
  double posterior[4] = {0, 0, 0, 0};
  double risk = 0.0;
};
std::vector<PredictionRow> read_predictions_csv(const std::string& path);
void write_predictions_csv(const std::vector<PredictionRow>& rows,
                           const std::string& path,
                           const std::vector<std::string>& comments = {});

}  // namespace pedrisk::io

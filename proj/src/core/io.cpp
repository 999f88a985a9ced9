#include "core/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "json.hpp"

namespace pedrisk::io {

namespace {

using nlohmann::json;

const std::vector<std::string> kPedigreeHeader = {
    "family_id", "member_id", "mother_id",    "father_id", "sex",
    "current_age", "deceased", "bc_status",   "bc_onset_age",
    "oc_status",   "oc_onset_age"};

struct RawMember {
  Member m;
  int file_id = 0;
  std::optional<int> raw_mother, raw_father;
  std::size_t line = 0;
};

void check_header(const csv::Row& row) {
  if (row.fields.size() != kPedigreeHeader.size())
    throw ParseError("pedigree header has wrong column count", row.line_number);
  for (std::size_t i = 0; i < kPedigreeHeader.size(); ++i)
    if (row.fields[i] != kPedigreeHeader[i])
      throw ParseError("unexpected pedigree column '" + row.fields[i] +
                           "', wanted '" + kPedigreeHeader[i] + "'",
                       row.line_number);
}

// Affected members may carry a missing onset age; unaffected members are
// normalized to onset 0 whether the cell was 0 or empty.
void normalize_onset(bool affected, std::optional<int>& onset) {
  if (!affected) onset = 0;
}

Pedigree assemble_family(const std::string& family_id,
                         std::vector<RawMember>& raw) {
  // Counselee (file id 0) moves to index 0; the rest keep file order.
  std::map<int, int> id_map;
  std::vector<const RawMember*> ordered;
  const RawMember* counselee = nullptr;
  for (const auto& r : raw) {
    if (id_map.count(r.file_id))
      throw ParseError("duplicate member_id " + std::to_string(r.file_id) +
                           " in family " + family_id,
                       r.line);
    id_map[r.file_id] = 0;  // placeholder
    if (r.file_id == 0) counselee = &r;
  }
  if (!counselee)
    throw ParseError("family " + family_id + " has no counselee (member_id 0)",
                     raw.front().line);
  ordered.push_back(counselee);
  for (const auto& r : raw)
    if (&r != counselee) ordered.push_back(&r);
  for (std::size_t i = 0; i < ordered.size(); ++i)
    id_map[ordered[i]->file_id] = static_cast<int>(i);

  Pedigree p;
  p.family_id = family_id;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    Member m = ordered[i]->m;
    m.id = static_cast<int>(i);
    auto remap = [&](const std::optional<int>& ref) -> std::optional<int> {
      if (!ref) return std::nullopt;
      auto it = id_map.find(*ref);
      if (it == id_map.end())
        throw ParseError("family " + family_id + ": parent id " +
                             std::to_string(*ref) + " not a member",
                         ordered[i]->line);
      return it->second;
    };
    m.mother_id = remap(ordered[i]->raw_mother);
    m.father_id = remap(ordered[i]->raw_father);
    p.members.push_back(m);
  }
  return p;
}

std::vector<Pedigree> rows_to_pedigrees(const std::vector<csv::Row>& rows) {
  std::vector<Pedigree> out;
  if (rows.empty()) return out;
  check_header(rows.front());

  std::vector<std::string> family_order;
  std::map<std::string, std::vector<RawMember>> families;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const csv::Row& row = rows[i];
    if (row.fields.size() != kPedigreeHeader.size())
      throw ParseError("pedigree row has wrong column count", row.line_number);
    const auto& f = row.fields;
    std::size_t ln = row.line_number;
    if (f[0].empty()) throw ParseError("empty family_id", ln);

    RawMember r;
    r.line = ln;
    r.file_id = csv::to_int(f[1], "member_id", ln);
    r.raw_mother = csv::to_opt_int(f[2], "mother_id", ln);
    r.raw_father = csv::to_opt_int(f[3], "father_id", ln);
    int sex = csv::to_int(f[4], "sex", ln);
    if (sex != 0 && sex != 1) throw ParseError("sex must be 0 or 1", ln);
    r.m.sex = static_cast<Sex>(sex);
    r.m.current_age = csv::to_opt_int(f[5], "current_age", ln);
    int dec = csv::to_int(f[6], "deceased", ln);
    if (dec != 0 && dec != 1) throw ParseError("deceased must be 0 or 1", ln);
    r.m.deceased = dec == 1;
    int bc = csv::to_int(f[7], "bc_status", ln);
    if (bc != 0 && bc != 1) throw ParseError("bc_status must be 0 or 1", ln);
    r.m.bc_affected = bc == 1;
    r.m.bc_onset_age = csv::to_opt_int(f[8], "bc_onset_age", ln);
    int oc = csv::to_int(f[9], "oc_status", ln);
    if (oc != 0 && oc != 1) throw ParseError("oc_status must be 0 or 1", ln);
    r.m.oc_affected = oc == 1;
    r.m.oc_onset_age = csv::to_opt_int(f[10], "oc_onset_age", ln);
    normalize_onset(r.m.bc_affected, r.m.bc_onset_age);
    normalize_onset(r.m.oc_affected, r.m.oc_onset_age);

    if (!families.count(f[0])) family_order.push_back(f[0]);
    families[f[0]].push_back(r);
  }

  for (const auto& fid : family_order)
    out.push_back(assemble_family(fid, families[fid]));
  return out;
}

std::string opt_to_str(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

json member_to_json(const Member& m) {
  json j;
  j["member_id"] = m.id;
  if (m.mother_id) j["mother_id"] = *m.mother_id; else j["mother_id"] = nullptr;
  if (m.father_id) j["father_id"] = *m.father_id; else j["father_id"] = nullptr;
  j["sex"] = static_cast<int>(m.sex);
  if (m.current_age) j["current_age"] = *m.current_age;
  else j["current_age"] = nullptr;
  j["deceased"] = m.deceased ? 1 : 0;
  j["bc_status"] = m.bc_affected ? 1 : 0;
  if (m.bc_onset_age) j["bc_onset_age"] = *m.bc_onset_age;
  else j["bc_onset_age"] = nullptr;
  j["oc_status"] = m.oc_affected ? 1 : 0;
  if (m.oc_onset_age) j["oc_onset_age"] = *m.oc_onset_age;
  else j["oc_onset_age"] = nullptr;
  return j;
}

std::optional<int> json_opt_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    throw ParseError(std::string("field '") + key + "' must be an integer", 0);
  return v.get<int>();
}

}  // namespace

std::vector<Pedigree> parse_pedigrees_csv(const std::string& text) {
  return rows_to_pedigrees(csv::parse(text));
}

std::vector<Pedigree> read_pedigrees_csv(const std::string& path) {
  return rows_to_pedigrees(csv::read_file(path));
}

void write_pedigrees_csv(const std::vector<Pedigree>& peds,
                         const std::string& path,
                         const std::vector<std::string>& comments) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back(kPedigreeHeader);
  for (const auto& p : peds) {
    for (const auto& m : p.members) {
      rows.push_back({p.family_id, std::to_string(m.id),
                      opt_to_str(m.mother_id), opt_to_str(m.father_id),
                      std::to_string(static_cast<int>(m.sex)),
                      opt_to_str(m.current_age), m.deceased ? "1" : "0",
                      m.bc_affected ? "1" : "0", opt_to_str(m.bc_onset_age),
                      m.oc_affected ? "1" : "0", opt_to_str(m.oc_onset_age)});
    }
  }
  csv::write_file(path, comments, rows);
}

std::vector<Pedigree> read_pedigrees_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad JSON: ") + e.what(), 0);
  }
  if (!doc.is_array()) throw ParseError("top-level JSON must be an array", 0);

  std::vector<Pedigree> out;
  for (const auto& fam : doc) {
    std::vector<RawMember> raw;
    std::string fid = fam.value("family_id", std::string());
    if (fid.empty()) throw ParseError("family_id missing or empty", 0);
    if (!fam.contains("members") || !fam["members"].is_array())
      throw ParseError("family " + fid + " lacks a members array", 0);
    for (const auto& jm : fam["members"]) {
      RawMember r;
      auto fileid = json_opt_int(jm, "member_id");
      if (!fileid) throw ParseError("member_id missing in family " + fid, 0);
      r.file_id = *fileid;
      r.raw_mother = json_opt_int(jm, "mother_id");
      r.raw_father = json_opt_int(jm, "father_id");
      int sex = jm.value("sex", 0);
      if (sex != 0 && sex != 1)
        throw ParseError("sex must be 0 or 1 in family " + fid, 0);
      r.m.sex = static_cast<Sex>(sex);
      r.m.current_age = json_opt_int(jm, "current_age");
      r.m.deceased = jm.value("deceased", 0) == 1;
      r.m.bc_affected = jm.value("bc_status", 0) == 1;
      r.m.bc_onset_age = json_opt_int(jm, "bc_onset_age");
      r.m.oc_affected = jm.value("oc_status", 0) == 1;
      r.m.oc_onset_age = json_opt_int(jm, "oc_onset_age");
      normalize_onset(r.m.bc_affected, r.m.bc_onset_age);
      normalize_onset(r.m.oc_affected, r.m.oc_onset_age);
      raw.push_back(r);
    }
    if (raw.empty()) throw ParseError("family " + fid + " has no members", 0);
    out.push_back(assemble_family(fid, raw));
  }
  return out;
}

void write_pedigrees_json(const std::vector<Pedigree>& peds,
                          const std::string& path) {
  json doc = json::array();
  for (const auto& p : peds) {
    json fam;
    fam["family_id"] = p.family_id;
    fam["members"] = json::array();
    for (const auto& m : p.members) fam["members"].push_back(member_to_json(m));
    doc.push_back(fam);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

namespace {
std::string detect_format(const std::string& path, const std::string& format) {
  if (!format.empty()) return format;
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "json") return "json";
  return "csv";
}
}  // namespace

std::vector<Pedigree> read_pedigrees(const std::string& path,
                                     const std::string& format) {
  std::string f = detect_format(path, format);
  if (f == "json") return read_pedigrees_json(path);
  if (f == "csv") return read_pedigrees_csv(path);
  throw ArgumentError("unknown pedigree format: " + f);
}

void write_pedigrees(const std::vector<Pedigree>& peds,
                     const std::string& path, const std::string& format) {
  std::string f = detect_format(path, format);
  if (f == "json") return write_pedigrees_json(peds, path);
  if (f == "csv") return write_pedigrees_csv(peds, path);
  throw ArgumentError("unknown pedigree format: " + f);
}

std::vector<Outcome> read_outcomes_csv(const std::string& path) {
  auto rows = csv::read_file(path);
  std::vector<Outcome> out;
  if (rows.empty()) return out;
  const auto& h = rows.front().fields;
  if (h.size() != 2 || h[0] != "family_id" || h[1] != "y0")
    throw ParseError("outcomes header must be family_id,y0",
                     rows.front().line_number);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    if (f.size() != 2)
      throw ParseError("outcome row has wrong column count",
                       rows[i].line_number);
    int y = csv::to_int(f[1], "y0", rows[i].line_number);
    if (y != 0 && y != 1)
      throw ParseError("y0 must be 0 or 1", rows[i].line_number);
    out.push_back(Outcome{f[0], y});
  }
  return out;
}

void write_outcomes_csv(const std::vector<Outcome>& rows,
                        const std::string& path,
                        const std::vector<std::string>& comments) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"family_id", "y0"});
  for (const auto& r : rows) table.push_back({r.family_id, std::to_string(r.y0)});
  csv::write_file(path, comments, table);
}

void attach_outcomes(Cohort& cohort, const std::vector<Outcome>& rows) {
  std::map<std::string, int> lookup;
  for (const auto& r : rows) {
    if (!lookup.emplace(r.family_id, r.y0).second)
      throw ValidationError("duplicate outcome for family " + r.family_id);
  }
  cohort.outcomes.clear();
  cohort.outcomes.reserve(cohort.families.size());
  for (const auto& p : cohort.families) {
    auto it = lookup.find(p.family_id);
    if (it == lookup.end())
      throw ValidationError("no outcome for family " + p.family_id);
    cohort.outcomes.push_back(static_cast<std::int8_t>(it->second));
  }
}

std::vector<PredictionRow> read_predictions_csv(const std::string& path) {
  auto rows = csv::read_file(path);
  std::vector<PredictionRow> out;
  if (rows.empty()) return out;
  const std::vector<std::string> want = {
      "family_id",    "posterior_noncarrier", "posterior_l1",
      "posterior_l2", "posterior_both",       "risk_t"};
  const auto& h = rows.front().fields;
  if (h != want)
    throw ParseError("unexpected predictions header", rows.front().line_number);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    std::size_t ln = rows[i].line_number;
    if (f.size() != want.size())
      throw ParseError("prediction row has wrong column count", ln);
    PredictionRow r;
    r.family_id = f[0];
    for (int k = 0; k < 4; ++k)
      r.posterior[k] = csv::to_double(f[1 + k], "posterior", ln);
    r.risk = csv::to_double(f[5], "risk_t", ln);
    out.push_back(r);
  }
  return out;
}

void write_predictions_csv(const std::vector<PredictionRow>& rows,
                           const std::string& path,
                           const std::vector<std::string>& comments) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"family_id", "posterior_noncarrier", "posterior_l1",
                   "posterior_l2", "posterior_both", "risk_t"});
  for (const auto& r : rows) {
    table.push_back({r.family_id, csv::format_double(r.posterior[0]),
                     csv::format_double(r.posterior[1]),
                     csv::format_double(r.posterior[2]),
                     csv::format_double(r.posterior[3]),
                     csv::format_double(r.risk)});
  }
  csv::write_file(path, comments, table);
}

}  // namespace pedrisk::io

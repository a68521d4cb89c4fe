#include "smartlmm/design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smartlmm/errors.hpp"

namespace smartlmm {

std::string to_string(const DtrIndex& dtr) {
  std::ostringstream os;
  os << "(" << (dtr.a1 > 0 ? "+1" : "-1") << ",";
  if (dtr.a2)
    os << (*dtr.a2 > 0 ? "+1" : "-1");
  else
    os << ".";
  os << ")";
  return os.str();
}

bool SmartDesign::rerandomized(int a1, int r) const {
  return rerandomized_cells.count({a1, r}) > 0;
}

double SmartDesign::prob_a1(int a1) const {
  return a1 > 0 ? p_a1 : 1.0 - p_a1;
}

double SmartDesign::prob_a2(int a1, int r, int a2) const {
  auto it = p_a2_given.find({a1, r});
  if (it == p_a2_given.end())
    throw InvalidQueryError("no second-stage randomization declared for cell (a1=" +
                            std::to_string(a1) + ", r=" + std::to_string(r) + ")");
  return a2 > 0 ? it->second : 1.0 - it->second;
}

// a2 codes must be declared exactly for arms with at least one re-randomized cell
static bool arm_rerandomizes(const SmartDesign& design, int a1) {
  return design.rerandomized(a1, 0) || design.rerandomized(a1, 1);
}

void SmartDesign::validate() const {
  if (dtrs.empty()) throw ValidationError("design declares no embedded DTRs");
  if (!(p_a1 > 0.0 && p_a1 < 1.0))
    throw PositivityError("P(A1=+1) must lie strictly in (0,1)");
  for (const auto& cell : rerandomized_cells) {
    auto it = p_a2_given.find(cell);
    if (it == p_a2_given.end())
      throw ValidationError("re-randomized cell (a1=" + std::to_string(cell.first) +
                            ", r=" + std::to_string(cell.second) +
                            ") has no stage-2 probability");
    if (!(it->second > 0.0 && it->second < 1.0))
      throw PositivityError("stage-2 probability for cell (a1=" +
                            std::to_string(cell.first) + ", r=" +
                            std::to_string(cell.second) +
                            ") must lie strictly in (0,1)");
  }
  for (const auto& dtr : dtrs) {
    if (dtr.a1 != 1 && dtr.a1 != -1)
      throw ValidationError("DTR stage-1 code must be +1 or -1");
    if (dtr.a2 && *dtr.a2 != 1 && *dtr.a2 != -1)
      throw ValidationError("DTR stage-2 code must be +1 or -1");
    bool rerand = arm_rerandomizes(*this, dtr.a1);
    if (rerand && !dtr.a2)
      throw ValidationError("DTR " + to_string(dtr) +
                            " needs a stage-2 code: its arm re-randomizes");
    if (!rerand && dtr.a2)
      throw ValidationError("DTR " + to_string(dtr) +
                            " carries a stage-2 code but its arm never re-randomizes");
  }
}

int SmartDesign::dtr_position(const DtrIndex& dtr) const {
  auto it = std::find(dtrs.begin(), dtrs.end(), dtr);
  return it == dtrs.end() ? -1 : static_cast<int>(it - dtrs.begin());
}

SmartDesign SmartDesign::autism() {
  SmartDesign d;
  d.dtrs = {DtrIndex{1, 1}, DtrIndex{1, -1}, DtrIndex{-1, std::nullopt}};
  d.p_a1 = 0.5;
  d.rerandomized_cells = {{1, 0}};
  d.p_a2_given[{1, 0}] = 0.5;
  return d;
}

SmartDesign SmartDesign::symmetric_two_stage() {
  SmartDesign d;
  d.dtrs = {DtrIndex{1, 1}, DtrIndex{1, -1}, DtrIndex{-1, 1}, DtrIndex{-1, -1}};
  d.p_a1 = 0.5;
  d.rerandomized_cells = {{1, 0}, {-1, 0}};
  d.p_a2_given[{1, 0}] = 0.5;
  d.p_a2_given[{-1, 0}] = 0.5;
  return d;
}

int SubjectRecord::n_observed() const {
  int n = 0;
  for (bool o : observed) n += o ? 1 : 0;
  return n;
}

void SubjectRecord::validate(const SmartDesign& design) const {
  const auto n = times.size();
  if (y.size() != static_cast<Eigen::Index>(n) || observed.size() != n)
    throw ValidationError("subject " + id + ": times/y/observed lengths differ");
  for (std::size_t j = 1; j < n; ++j)
    if (!(times[j] > times[j - 1]))
      throw ValidationError("subject " + id + ": times must be strictly increasing");
  if (a1 != 1 && a1 != -1)
    throw ValidationError("subject " + id + ": a1 must be +1 or -1");
  if (r != 0 && r != 1)
    throw ValidationError("subject " + id + ": r must be 0 or 1");
  const bool rerand = design.rerandomized(a1, r);
  if (rerand && !a2)
    throw ValidationError("subject " + id + ": a2 missing for a re-randomized cell");
  if (!rerand && a2)
    throw ValidationError("subject " + id + ": a2 present for a cell with no second randomization");
  if (a2 && *a2 != 1 && *a2 != -1)
    throw ValidationError("subject " + id + ": a2 must be +1 or -1");
}

static void validate_dtr_query(const DtrIndex& dtr, const SmartDesign& design) {
  const bool rerand = arm_rerandomizes(design, dtr.a1);
  if (rerand && !dtr.a2)
    throw InvalidQueryError("DTR " + to_string(dtr) +
                            " lacks a stage-2 code for an arm that re-randomizes");
  if (!rerand && dtr.a2)
    throw InvalidQueryError("a2 queried for a cell with no second randomization: DTR " +
                            to_string(dtr));
}

int consistency_indicator(const SubjectRecord& subject, const DtrIndex& dtr,
                          const SmartDesign& design) {
  validate_dtr_query(dtr, design);
  if (subject.a1 != dtr.a1) return 0;
  if (design.rerandomized(subject.a1, subject.r)) {
    if (!subject.a2)
      throw ValidationError("subject " + subject.id +
                            " lacks a2 in a re-randomized cell");
    return (*subject.a2 == *dtr.a2) ? 1 : 0;
  }
  return 1;
}

double design_weight(const SubjectRecord& subject, const DtrIndex& dtr,
                     const SmartDesign& design) {
  if (consistency_indicator(subject, dtr, design) == 0) return 0.0;
  double p1 = design.prob_a1(dtr.a1);
  if (!(p1 > 0.0))
    throw PositivityError("P(A1=" + std::to_string(dtr.a1) + ") is zero");
  double w = 1.0 / p1;
  if (design.rerandomized(subject.a1, subject.r)) {
    double p2 = design.prob_a2(subject.a1, subject.r, *subject.a2);
    if (!(p2 > 0.0))
      throw PositivityError("P(A2=" + std::to_string(*subject.a2) + " | a1=" +
                            std::to_string(subject.a1) + ", r=" +
                            std::to_string(subject.r) + ") is zero");
    w /= p2;
  }
  return w;
}

std::vector<AugmentedReplicate> augment_dataset(
    const std::vector<SubjectRecord>& subjects, const SmartDesign& design) {
  std::vector<AugmentedReplicate> out;
  out.reserve(subjects.size() * design.dtrs.size());
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    for (const auto& dtr : design.dtrs) {
      const double w = design_weight(subjects[i], dtr, design);
      if (w > 0.0)
        out.push_back(AugmentedReplicate{static_cast<int>(i), dtr, w});
    }
  }
  return out;
}

}  // namespace smartlmm

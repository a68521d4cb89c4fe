#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace smartlmm {

// Index of one embedded dynamic treatment regimen. Stage-1 and stage-2 codes
// are +1/-1; a2 is empty for regimens whose starting arm is never
// re-randomized (e.g. the AAC arm of the autism trial).
struct DtrIndex {
  int a1 = 1;
  std::optional<int> a2;

  bool operator==(const DtrIndex&) const = default;
};

std::string to_string(const DtrIndex& dtr);

// A two-stage SMART: the set of embedded DTRs, the stage-1 randomization
// probability, and which (a1, responder-status) cells re-randomize at stage 2.
struct SmartDesign {
  std::vector<DtrIndex> dtrs;
  double p_a1 = 0.5;                                   // P(A1 = +1)
  std::map<std::pair<int, int>, double> p_a2_given;    // (a1, r) -> P(A2 = +1)
  std::set<std::pair<int, int>> rerandomized_cells;    // (a1, r)

  bool rerandomized(int a1, int r) const;
  double prob_a1(int a1) const;
  double prob_a2(int a1, int r, int a2) const;

  // Throws ValidationError/PositivityError on an inconsistent design.
  void validate() const;

  int dtr_position(const DtrIndex& dtr) const;  // -1 if absent

  // The autism trial: JASP vs JASP+AAC at stage 1, only slow responders to
  // JASP re-randomized. Three embedded DTRs.
  static SmartDesign autism();
  // Common symmetric design: all slow responders re-randomized, four DTRs.
  static SmartDesign symmetric_two_stage();
};

// One participant's observed data in subject-level (wide) form. `observed`
// marks which entries of `y` are present; unobserved rows are deleted from
// every design matrix downstream.
struct SubjectRecord {
  std::string id;
  std::vector<double> times;
  Eigen::VectorXd y;
  std::vector<bool> observed;
  Eigen::VectorXd covariates;
  int a1 = 1;
  int r = 0;
  std::optional<int> a2;

  int n_observed() const;
  // Checks internal shape and membership in the design.
  void validate(const SmartDesign& design) const;
};

// I^(a1,a2)(A1, R, A2): 1 iff the subject's realized sequence is observable
// under `dtr`. Throws InvalidQueryError when `dtr` does not belong to the
// design's two-stage family (e.g. a2 supplied for an arm that never
// re-randomizes).
int consistency_indicator(const SubjectRecord& subject, const DtrIndex& dtr,
                          const SmartDesign& design);

// Known inverse-probability weight W-tilde_i(a1,a2) = I * W. Zero when the
// subject is not observable under `dtr`; throws PositivityError if the design
// declares a zero randomization probability.
double design_weight(const SubjectRecord& subject, const DtrIndex& dtr,
                     const SmartDesign& design);

// One row of the augmented dataset: subject `subject_index` contributes a
// replicate under each DTR it is observable under, carrying that DTR's weight.
struct AugmentedReplicate {
  int subject_index = -1;
  DtrIndex dtr;
  double weight = 0.0;
};

std::vector<AugmentedReplicate> augment_dataset(
    const std::vector<SubjectRecord>& subjects, const SmartDesign& design);

}  // namespace smartlmm

/*
 * Copyright 2026 The ODT Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Integer program for an optimal tree of fixed shape.
//
// Variables (all in [0,1]):
//   V_k_g  group g tested at decision node k
//   Z_k_j  feature j in the left-going subset at node k
//   C_i_b  sample i lands in leaf b
// Node and leaf ids are 1-based, sample/feature/group ids 0-based.
//
// Rows:
//   ONEGRP_k          sum_g V_k_g = 1
//   LINK_k_j          Z_k_j - V_k_g(j) <= 0
//   ANCH_k_g          Z_k_anchor(g) - V_k_g = 0        (anchor-eligible k)
//   NONEMPTY_k_g      sum_{j in g} Z_k_j - V_k_g >= 0  (forbid_trivial)
//   NOTFULL_k_g       sum_{j in g} Z_k_j - (|g|-1) V_k_g <= 0
//   LEFT_i_k          sum_{b left of k} C_i_b - sum_j a_ij Z_k_j <= 0
//   RIGHT_i_k         sum_{b right of k} C_i_b + sum_j a_ij Z_k_j <= 1
//   LEFT_i_k_b,
//   RIGHT_i_k_b       the same per leaf when not strengthened
//   PICK_i            sum_b C_i_b = 1 (only for the unstrengthened model
//                     that keeps every C)
//   SPEC / SENS       rate floor in the constrained modes
//
// Routing rows without any C term are vacuous and are not emitted.

#ifndef ODT_MILP_MODEL_H_
#define ODT_MILP_MODEL_H_

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "odt/dataset.h"
#include "odt/rational.h"
#include "odt/topology.h"

namespace odt {

enum class BuildMode { kAccuracy, kMaxSensitivity, kMaxSpecificity };

std::string_view BuildModeName(BuildMode mode);
BuildMode ParseBuildMode(std::string_view name);

struct BuildConfig {
  bool strengthen = true;
  bool anchor = true;
  // Only z above the leaf-adjacent nodes stay integer; in constrained modes
  // v and all z stay integer too.
  bool relax_integrality = true;
  bool drop_unused_c = true;
  bool forbid_trivial = false;
  Rational class_weight = Rational{1, 1};
  BuildMode mode = BuildMode::kAccuracy;
  // Minimum specificity for kMaxSensitivity, minimum sensitivity for
  // kMaxSpecificity. Ignored in kAccuracy.
  Rational min_rate = Rational{0, 1};

  // Throws InvalidConfig.
  void Validate() const;
  nlohmann::json ToJson() const;
  static BuildConfig FromJson(const nlohmann::json& json);
};

enum class VarRole { kV, kZ, kC, kOther };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  bool integer = false;
  VarRole role = VarRole::kOther;
  // (k, g), (k, j) or (i, b) depending on role.
  int index0 = -1;
  int index1 = -1;
};

enum class Sense : char { kLe = 'L', kEq = 'E', kGe = 'G' };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // ascending variable index, no zeros
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

struct ModelMetadata {
  std::string topology;
  int num_samples = 0;
  int num_features = 0;
  int num_groups = 0;
  int num_positive = 0;
  int num_negative = 0;
  // Objective coefficients are integers; divide by this to get the
  // weighted accuracy in units of samples.
  int64_t objective_scale = 1;
  nlohmann::json config;
};

class MilpModel {
 public:
  std::string name = "odt";
  bool maximize = true;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<double> objective;  // one coefficient per variable
  ModelMetadata metadata;

  int num_variables() const { return static_cast<int>(variables.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }

  int AddVariable(Variable var);
  int AddConstraint(Constraint row);

  // -1 when absent.
  int FindVariable(std::string_view name) const;
  int FindConstraint(std::string_view name) const;

  // Layout lookups for built models; -1 when the variable was not created.
  int VIndex(int k, int g) const;
  int ZIndex(int k, int j) const;
  int CIndex(int i, int b) const;

  // Recomputes name maps and role indices from variable names. Needed after
  // parsing a file.
  void RebuildIndex();

  double ObjectiveValue(const std::vector<double>& x) const;
  // Largest row or bound violation of x.
  double MaxViolation(const std::vector<double>& x) const;
  bool ObjectiveIsIntegral() const;

 private:
  std::unordered_map<std::string, int> var_by_name_;
  std::unordered_map<std::string, int> row_by_name_;
  std::vector<std::vector<int>> v_index_;
  std::vector<std::vector<int>> z_index_;
  std::vector<std::vector<int>> c_index_;
};

// Names, bounds, integrality, rows, sense and objective coincide.
// Metadata is not compared.
bool SameContent(const MilpModel& a, const MilpModel& b, std::string* why = nullptr);

MilpModel BuildModel(const EncodedDataset& data, const TreeTopology& topology,
                     const BuildConfig& config);

struct ModelStats {
  int rows = 0;
  int columns = 0;
  int integer_columns = 0;
  long long nonzeros = 0;
};

ModelStats ComputeModelStats(const MilpModel& model);
nlohmann::json ModelStatsToJson(const ModelStats& stats);

// Fixed-layout MPS with free-width names. Names longer than 255 characters
// or containing whitespace raise NameOverflow.
std::string ExportMps(const MilpModel& model);
std::string ExportLp(const MilpModel& model);
// Throws ParseError carrying the offending line number.
MilpModel ParseMps(std::string_view text);

}  // namespace odt

#endif  // ODT_MILP_MODEL_H_

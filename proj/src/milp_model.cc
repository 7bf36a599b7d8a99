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

#include "odt/milp_model.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "odt/errors.h"

namespace odt {
namespace {

std::string Name(char prefix, int a, int b) {
  return std::string(1, prefix) + "_" + std::to_string(a) + "_" +
         std::to_string(b);
}

// Parses "P_a_b" into (a, b). Returns false for anything else.
bool SplitName(std::string_view name, char prefix, int* a, int* b) {
  if (name.size() < 5 || name[0] != prefix || name[1] != '_') return false;
  const char* p = name.data() + 2;
  const char* end = name.data() + name.size();
  auto r1 = std::from_chars(p, end, *a);
  if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != '_') return false;
  auto r2 = std::from_chars(r1.ptr + 1, end, *b);
  return r2.ec == std::errc() && r2.ptr == end;
}

void SetIndex(std::vector<std::vector<int>>& table, int a, int b, int value) {
  if (a < 0 || b < 0) return;
  if (static_cast<int>(table.size()) <= a) table.resize(a + 1);
  if (static_cast<int>(table[a].size()) <= b) table[a].resize(b + 1, -1);
  table[a][b] = value;
}

int GetIndex(const std::vector<std::vector<int>>& table, int a, int b) {
  if (a < 0 || b < 0 || a >= static_cast<int>(table.size())) return -1;
  if (b >= static_cast<int>(table[a].size())) return -1;
  return table[a][b];
}

void Normalize(Constraint& row) {
  std::sort(row.terms.begin(), row.terms.end(),
            [](const Term& x, const Term& y) { return x.var < y.var; });
  std::vector<Term> merged;
  for (const Term& t : row.terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  row.terms = std::move(merged);
}

}  // namespace

std::string_view BuildModeName(BuildMode mode) {
  switch (mode) {
    case BuildMode::kAccuracy:
      return "accuracy";
    case BuildMode::kMaxSensitivity:
      return "max_sensitivity";
    case BuildMode::kMaxSpecificity:
      return "max_specificity";
  }
  return "?";
}

BuildMode ParseBuildMode(std::string_view name) {
  for (BuildMode m : {BuildMode::kAccuracy, BuildMode::kMaxSensitivity,
                      BuildMode::kMaxSpecificity}) {
    if (BuildModeName(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown build mode '" + std::string(name) + "'");
}

void BuildConfig::Validate() const {
  if (class_weight.num <= 0 || class_weight.den <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "class weight must be positive");
  }
  if (min_rate.den <= 0 || min_rate.num < 0 || min_rate.num > min_rate.den) {
    throw Error(ErrorCode::kInvalidConfig,
                "rate floor must lie in [0,1], got " + min_rate.ToString());
  }
}

nlohmann::json BuildConfig::ToJson() const {
  nlohmann::json j;
  j["strengthen"] = strengthen;
  j["anchor"] = anchor;
  j["relax_integrality"] = relax_integrality;
  j["drop_unused_c"] = drop_unused_c;
  j["forbid_trivial"] = forbid_trivial;
  j["class_weight"] = class_weight.ToString();
  j["mode"] = std::string(BuildModeName(mode));
  j["min_rate"] = min_rate.ToString();
  return j;
}

BuildConfig BuildConfig::FromJson(const nlohmann::json& json) {
  BuildConfig c;
  c.strengthen = json.value("strengthen", c.strengthen);
  c.anchor = json.value("anchor", c.anchor);
  c.relax_integrality = json.value("relax_integrality", c.relax_integrality);
  c.drop_unused_c = json.value("drop_unused_c", c.drop_unused_c);
  c.forbid_trivial = json.value("forbid_trivial", c.forbid_trivial);
  c.class_weight = Rational::Parse(json.value("class_weight", std::string("1")));
  c.mode = ParseBuildMode(json.value("mode", std::string("accuracy")));
  c.min_rate = Rational::Parse(json.value("min_rate", std::string("0")));
  c.Validate();
  return c;
}

int MilpModel::AddVariable(Variable var) {
  const int id = num_variables();
  var_by_name_[var.name] = id;
  switch (var.role) {
    case VarRole::kV:
      SetIndex(v_index_, var.index0, var.index1, id);
      break;
    case VarRole::kZ:
      SetIndex(z_index_, var.index0, var.index1, id);
      break;
    case VarRole::kC:
      SetIndex(c_index_, var.index0, var.index1, id);
      break;
    case VarRole::kOther:
      break;
  }
  variables.push_back(std::move(var));
  objective.push_back(0.0);
  return id;
}

int MilpModel::AddConstraint(Constraint row) {
  Normalize(row);
  const int id = num_constraints();
  row_by_name_[row.name] = id;
  constraints.push_back(std::move(row));
  return id;
}

int MilpModel::FindVariable(std::string_view name) const {
  auto it = var_by_name_.find(std::string(name));
  return it == var_by_name_.end() ? -1 : it->second;
}

int MilpModel::FindConstraint(std::string_view name) const {
  auto it = row_by_name_.find(std::string(name));
  return it == row_by_name_.end() ? -1 : it->second;
}

int MilpModel::VIndex(int k, int g) const { return GetIndex(v_index_, k, g); }
int MilpModel::ZIndex(int k, int j) const { return GetIndex(z_index_, k, j); }
int MilpModel::CIndex(int i, int b) const { return GetIndex(c_index_, i, b); }

void MilpModel::RebuildIndex() {
  var_by_name_.clear();
  row_by_name_.clear();
  v_index_.clear();
  z_index_.clear();
  c_index_.clear();
  objective.resize(variables.size(), 0.0);
  for (int id = 0; id < num_variables(); ++id) {
    Variable& v = variables[id];
    int a = -1;
    int b = -1;
    v.role = VarRole::kOther;
    if (SplitName(v.name, 'V', &a, &b)) {
      v.role = VarRole::kV;
      SetIndex(v_index_, a, b, id);
    } else if (SplitName(v.name, 'Z', &a, &b)) {
      v.role = VarRole::kZ;
      SetIndex(z_index_, a, b, id);
    } else if (SplitName(v.name, 'C', &a, &b)) {
      v.role = VarRole::kC;
      SetIndex(c_index_, a, b, id);
    }
    v.index0 = v.role == VarRole::kOther ? -1 : a;
    v.index1 = v.role == VarRole::kOther ? -1 : b;
    var_by_name_[v.name] = id;
  }
  for (int r = 0; r < num_constraints(); ++r) {
    row_by_name_[constraints[r].name] = r;
  }
}

double MilpModel::ObjectiveValue(const std::vector<double>& x) const {
  double total = 0.0;
  for (int j = 0; j < num_variables(); ++j) total += objective[j] * x[j];
  return total;
}

double MilpModel::MaxViolation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, variables[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables[j].upper);
  }
  for (const Constraint& row : constraints) {
    double lhs = 0.0;
    for (const Term& t : row.terms) lhs += t.coef * x[t.var];
    switch (row.sense) {
      case Sense::kLe:
        worst = std::max(worst, lhs - row.rhs);
        break;
      case Sense::kGe:
        worst = std::max(worst, row.rhs - lhs);
        break;
      case Sense::kEq:
        worst = std::max(worst, std::abs(lhs - row.rhs));
        break;
    }
  }
  return worst;
}

bool MilpModel::ObjectiveIsIntegral() const {
  return std::all_of(objective.begin(), objective.end(),
                     [](double c) { return c == std::floor(c); });
}

bool SameContent(const MilpModel& a, const MilpModel& b, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.maximize != b.maximize) return fail("objective sense differs");
  if (a.num_variables() != b.num_variables()) {
    return fail("variable count differs");
  }
  if (a.num_constraints() != b.num_constraints()) {
    return fail("constraint count differs");
  }
  for (int j = 0; j < a.num_variables(); ++j) {
    const Variable& x = a.variables[j];
    const Variable& y = b.variables[j];
    if (x.name != y.name || x.lower != y.lower || x.upper != y.upper ||
        x.integer != y.integer) {
      return fail("variable " + x.name + " differs");
    }
    if (a.objective[j] != b.objective[j]) {
      return fail("objective coefficient of " + x.name + " differs");
    }
  }
  for (int r = 0; r < a.num_constraints(); ++r) {
    const Constraint& x = a.constraints[r];
    const Constraint& y = b.constraints[r];
    if (x.name != y.name || x.sense != y.sense || x.rhs != y.rhs ||
        x.terms.size() != y.terms.size()) {
      return fail("row " + x.name + " differs");
    }
    for (size_t t = 0; t < x.terms.size(); ++t) {
      if (x.terms[t].var != y.terms[t].var ||
          x.terms[t].coef != y.terms[t].coef) {
        return fail("row " + x.name + " coefficients differ");
      }
    }
  }
  return true;
}

MilpModel BuildModel(const EncodedDataset& data, const TreeTopology& topology,
                     const BuildConfig& config) {
  config.Validate();
  const GroupSchema& schema = data.schema();
  const int num_nodes = topology.num_decision_nodes();
  const int num_leaves = topology.num_leaves();
  const int n = data.num_samples();
  const int d = data.num_features();
  const int num_groups = data.num_groups();
  const int num_pos = static_cast<int>(data.positive_indices().size());
  const int num_neg = static_cast<int>(data.negative_indices().size());

  if (config.mode != BuildMode::kAccuracy && (num_pos == 0 || num_neg == 0)) {
    throw Error(ErrorCode::kEmptyClass,
                "constrained modes need both classes in the training set");
  }

  MilpModel model;
  model.metadata.topology = topology.name();
  model.metadata.num_samples = n;
  model.metadata.num_features = d;
  model.metadata.num_groups = num_groups;
  model.metadata.num_positive = num_pos;
  model.metadata.num_negative = num_neg;
  model.metadata.config = config.ToJson();
  model.metadata.config["topology"] = topology.ToString();

  const bool all_integer = !config.relax_integrality;
  // The rate floor row admits fractional vertices, so constrained modes keep
  // every v and z integral; c stays relaxed since an integral tree caps it
  // by the true routing.
  const bool tree_integer = all_integer || config.mode != BuildMode::kAccuracy;

  for (int k = 1; k <= num_nodes; ++k) {
    for (int g = 0; g < num_groups; ++g) {
      model.AddVariable(
          {Name('V', k, g), 0.0, 1.0, tree_integer, VarRole::kV, k, g});
    }
  }
  for (int k = 1; k <= num_nodes; ++k) {
    const bool integral = tree_integer || !topology.IsLeafAdjacent(k);
    for (int j = 0; j < d; ++j) {
      model.AddVariable(
          {Name('Z', k, j), 0.0, 1.0, integral, VarRole::kZ, k, j});
    }
  }
  auto keep_c = [&](int i, int b) {
    if (!config.drop_unused_c) return true;
    return (data.Label(i) > 0) == TreeTopology::IsPositiveLeaf(b);
  };
  for (int i = 0; i < n; ++i) {
    for (int b = 1; b <= num_leaves; ++b) {
      if (!keep_c(i, b)) continue;
      model.AddVariable(
          {Name('C', i, b), 0.0, 1.0, all_integer, VarRole::kC, i, b});
    }
  }

  // Objective.
  int64_t pos_weight = 1;
  int64_t neg_weight = 1;
  switch (config.mode) {
    case BuildMode::kAccuracy:
      pos_weight = config.class_weight.den;
      neg_weight = config.class_weight.num;
      model.metadata.objective_scale = config.class_weight.den;
      break;
    case BuildMode::kMaxSensitivity:
      neg_weight = 0;
      break;
    case BuildMode::kMaxSpecificity:
      pos_weight = 0;
      break;
  }
  for (int i = 0; i < n; ++i) {
    const bool positive = data.Label(i) > 0;
    for (int b = 1; b <= num_leaves; ++b) {
      const int c = model.CIndex(i, b);
      if (c < 0 || positive != TreeTopology::IsPositiveLeaf(b)) continue;
      model.objective[c] = static_cast<double>(positive ? pos_weight : neg_weight);
    }
  }

  // Tree structure rows.
  for (int k = 1; k <= num_nodes; ++k) {
    Constraint row{"ONEGRP_" + std::to_string(k), {}, Sense::kEq, 1.0};
    for (int g = 0; g < num_groups; ++g) {
      row.terms.push_back({model.VIndex(k, g), 1.0});
    }
    model.AddConstraint(std::move(row));
  }
  for (int k = 1; k <= num_nodes; ++k) {
    for (int j = 0; j < d; ++j) {
      model.AddConstraint({"LINK_" + std::to_string(k) + "_" + std::to_string(j),
                           {{model.ZIndex(k, j), 1.0},
                            {model.VIndex(k, schema.GroupOf(j)), -1.0}},
                           Sense::kLe,
                           0.0});
    }
  }
  if (config.anchor) {
    for (int k : topology.AnchorEligible()) {
      for (int g = 0; g < num_groups; ++g) {
        model.AddConstraint({"ANCH_" + std::to_string(k) + "_" + std::to_string(g),
                             {{model.ZIndex(k, schema.Anchor(g)), 1.0},
                              {model.VIndex(k, g), -1.0}},
                             Sense::kEq,
                             0.0});
      }
    }
  }
  if (config.forbid_trivial) {
    for (int k = 1; k <= num_nodes; ++k) {
      for (int g = 0; g < num_groups; ++g) {
        const std::string suffix =
            std::to_string(k) + "_" + std::to_string(g);
        Constraint more{"NONEMPTY_" + suffix, {}, Sense::kGe, 0.0};
        Constraint less{"NOTFULL_" + suffix, {}, Sense::kLe, 0.0};
        for (int j : schema.group(g).features) {
          more.terms.push_back({model.ZIndex(k, j), 1.0});
          less.terms.push_back({model.ZIndex(k, j), 1.0});
        }
        more.terms.push_back({model.VIndex(k, g), -1.0});
        less.terms.push_back(
            {model.VIndex(k, g), -static_cast<double>(schema.GroupSize(g) - 1)});
        model.AddConstraint(std::move(more));
        model.AddConstraint(std::move(less));
      }
    }
  }

  // Routing rows. L(i,k) = sum_j a_ij Z_k_j and R(i,k) = 1 - L(i,k).
  std::vector<std::vector<int>> left_leaves(num_nodes + 1);
  std::vector<std::vector<int>> right_leaves(num_nodes + 1);
  for (int b = 1; b <= num_leaves; ++b) {
    for (int k : topology.path(b).left) left_leaves[k].push_back(b);
    for (int k : topology.path(b).right) right_leaves[k].push_back(b);
  }
  auto add_split_terms = [&](Constraint& row, int i, int k, double sign) {
    for (int g = 0; g < num_groups; ++g) {
      row.terms.push_back({model.ZIndex(k, data.ActiveFeature(i, g)), sign});
    }
  };
  for (int i = 0; i < n; ++i) {
    const std::string si = std::to_string(i);
    for (int k = 1; k <= num_nodes; ++k) {
      const std::string sk = std::to_string(k);
      if (config.strengthen) {
        Constraint left{"LEFT_" + si + "_" + sk, {}, Sense::kLe, 0.0};
        for (int b : left_leaves[k]) {
          if (int c = model.CIndex(i, b); c >= 0) left.terms.push_back({c, 1.0});
        }
        if (!left.terms.empty()) {
          add_split_terms(left, i, k, -1.0);
          model.AddConstraint(std::move(left));
        }
        Constraint right{"RIGHT_" + si + "_" + sk, {}, Sense::kLe, 1.0};
        for (int b : right_leaves[k]) {
          if (int c = model.CIndex(i, b); c >= 0) right.terms.push_back({c, 1.0});
        }
        if (!right.terms.empty()) {
          add_split_terms(right, i, k, 1.0);
          model.AddConstraint(std::move(right));
        }
      } else {
        for (int b : left_leaves[k]) {
          const int c = model.CIndex(i, b);
          if (c < 0) continue;
          Constraint left{"LEFT_" + si + "_" + sk + "_" + std::to_string(b),
                          {{c, 1.0}},
                          Sense::kLe,
                          0.0};
          add_split_terms(left, i, k, -1.0);
          model.AddConstraint(std::move(left));
        }
        for (int b : right_leaves[k]) {
          const int c = model.CIndex(i, b);
          if (c < 0) continue;
          Constraint right{"RIGHT_" + si + "_" + sk + "_" + std::to_string(b),
                           {{c, 1.0}},
                           Sense::kLe,
                           1.0};
          add_split_terms(right, i, k, 1.0);
          model.AddConstraint(std::move(right));
        }
      }
    }
    if (!config.strengthen && !config.drop_unused_c) {
      Constraint pick{"PICK_" + si, {}, Sense::kEq, 1.0};
      for (int b = 1; b <= num_leaves; ++b) {
        pick.terms.push_back({model.CIndex(i, b), 1.0});
      }
      model.AddConstraint(std::move(pick));
    }
  }

  // Rate floor for the constrained modes.
  if (config.mode != BuildMode::kAccuracy) {
    const bool spec = config.mode == BuildMode::kMaxSensitivity;
    const std::vector<int>& members =
        spec ? data.negative_indices() : data.positive_indices();
    Constraint floor{spec ? "SPEC" : "SENS", {}, Sense::kGe,
                     static_cast<double>(config.min_rate.CeilTimes(
                         static_cast<int64_t>(members.size())))};
    for (int i : members) {
      for (int b = 1; b <= num_leaves; ++b) {
        if (TreeTopology::IsPositiveLeaf(b) == spec) continue;
        floor.terms.push_back({model.CIndex(i, b), 1.0});
      }
    }
    model.AddConstraint(std::move(floor));
  }
  return model;
}

ModelStats ComputeModelStats(const MilpModel& model) {
  ModelStats s;
  s.rows = model.num_constraints();
  s.columns = model.num_variables();
  for (const Variable& v : model.variables) s.integer_columns += v.integer;
  for (const Constraint& row : model.constraints) {
    s.nonzeros += static_cast<long long>(row.terms.size());
  }
  return s;
}

nlohmann::json ModelStatsToJson(const ModelStats& stats) {
  return {{"rows", stats.rows},
          {"columns", stats.columns},
          {"integer_columns", stats.integer_columns},
          {"nonzeros", stats.nonzeros}};
}

}  // namespace odt

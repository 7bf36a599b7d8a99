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

#include "odt/lp_solver.h"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "odt/errors.h"

namespace odt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArtificialBound = 1e7;
constexpr double kMinWeight = 1e-8;
constexpr double kEtaDropTolerance = 1e-14;

struct Eta {
  int pos = 0;
  double pivot_inv = 1.0;
  std::vector<int> index;
  std::vector<double> value;
};

struct Candidate {
  int var;
  double ratio;   // |d_j| / |alpha_j|
  double harris;  // (|d_j| + tol) / |alpha_j|
  double abs_alpha;
};

}  // namespace

std::string_view LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
    case LpStatus::kTimeLimit:
      return "time_limit";
    case LpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "?";
}

LpProblem LpFromModel(const MilpModel& model) {
  LpProblem p;
  p.num_rows = model.num_constraints();
  p.num_cols = model.num_variables();
  p.cost.resize(p.num_cols);
  p.col_lower.resize(p.num_cols);
  p.col_upper.resize(p.num_cols);
  for (int j = 0; j < p.num_cols; ++j) {
    p.cost[j] = model.maximize ? -model.objective[j] : model.objective[j];
    p.col_lower[j] = model.variables[j].lower;
    p.col_upper[j] = model.variables[j].upper;
  }
  std::vector<int> count(p.num_cols, 0);
  for (const Constraint& row : model.constraints) {
    for (const Term& t : row.terms) ++count[t.var];
    double lo = -kInf;
    double up = kInf;
    if (row.sense != Sense::kGe) up = row.rhs;
    if (row.sense != Sense::kLe) lo = row.rhs;
    p.row_lower.push_back(lo);
    p.row_upper.push_back(up);
  }
  p.col_start.assign(p.num_cols + 1, 0);
  for (int j = 0; j < p.num_cols; ++j) {
    p.col_start[j + 1] = p.col_start[j] + count[j];
  }
  p.row_index.resize(p.col_start.back());
  p.value.resize(p.col_start.back());
  std::vector<int> fill(p.col_start.begin(), p.col_start.end() - 1);
  for (int r = 0; r < p.num_rows; ++r) {
    for (const Term& t : model.constraints[r].terms) {
      p.row_index[fill[t.var]] = r;
      p.value[fill[t.var]] = t.coef;
      ++fill[t.var];
    }
  }
  return p;
}

class DualSimplex::Impl {
 public:
  Impl(LpProblem problem, LpOptions options)
      : p_(std::move(problem)), opt_(options) {
    m_ = p_.num_rows;
    n_ = p_.num_cols;
    total_ = m_ + n_;
    if (static_cast<int>(p_.col_start.size()) != n_ + 1) {
      throw Error(ErrorCode::kDimensionMismatch, "bad column pointer array");
    }
    // Row-wise copy for pivot row computation.
    std::vector<int> count(m_, 0);
    for (int r : p_.row_index) ++count[r];
    rstart_.assign(m_ + 1, 0);
    for (int i = 0; i < m_; ++i) rstart_[i + 1] = rstart_[i] + count[i];
    rcol_.resize(rstart_.back());
    rval_.resize(rstart_.back());
    std::vector<int> fill(rstart_.begin(), rstart_.end() - 1);
    for (int j = 0; j < n_; ++j) {
      for (int e = p_.col_start[j]; e < p_.col_start[j + 1]; ++e) {
        const int i = p_.row_index[e];
        rcol_[fill[i]] = j;
        rval_[fill[i]] = p_.value[e];
        ++fill[i];
      }
    }
    cost_.assign(total_, 0.0);
    std::copy(p_.cost.begin(), p_.cost.end(), cost_.begin());
    lower_.assign(total_, 0.0);
    upper_.assign(total_, 0.0);
    artificial_.assign(total_, 0);
    for (int j = 0; j < n_; ++j) ApplyColumnBounds(j, p_.col_lower[j], p_.col_upper[j]);
    for (int i = 0; i < m_; ++i) {
      lower_[n_ + i] = -p_.row_upper[i];
      upper_[n_ + i] = -p_.row_lower[i];
    }
    x_.assign(total_, 0.0);
    d_.assign(total_, 0.0);
    y_.assign(m_, 0.0);
    SlackBasis();
  }

  void ApplyColumnBounds(int j, double lo, double up) {
    artificial_[j] = 0;
    if (lo == -kInf) {
      lo = -kArtificialBound;
      artificial_[j] |= 1;
    }
    if (up == kInf) {
      up = kArtificialBound;
      artificial_[j] |= 2;
    }
    lower_[j] = lo;
    upper_[j] = up;
  }

  void SlackBasis() {
    status_.assign(total_, BasisStatus::kAtLower);
    head_.resize(m_);
    pos_.assign(total_, -1);
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = i;
      status_[n_ + i] = BasisStatus::kBasic;
    }
    for (int j = 0; j < n_; ++j) {
      status_[j] = cost_[j] >= 0 ? BasisStatus::kAtLower : BasisStatus::kAtUpper;
    }
    weight_.assign(m_, 1.0);
    factored_ = false;
  }

  // ---- basis factorisation -------------------------------------------

  bool Factor() {
    etas_.clear();
    ss_row_.assign(m_, -1);
    logical_pos_.assign(m_, -1);
    ss_cols_.clear();
    ss_col_pos_.clear();
    for (int r = 0; r < m_; ++r) {
      const int j = head_[r];
      if (j >= n_) {
        logical_pos_[j - n_] = r;
      } else {
        ss_cols_.push_back(j);
        ss_col_pos_.push_back(r);
      }
    }
    ss_rows_.clear();
    for (int i = 0; i < m_; ++i) {
      if (logical_pos_[i] < 0) {
        ss_row_[i] = static_cast<int>(ss_rows_.size());
        ss_rows_.push_back(i);
      }
    }
    const int size = static_cast<int>(ss_cols_.size());
    if (static_cast<int>(ss_rows_.size()) != size) return false;
    factored_ = true;
    if (size == 0) return true;
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < size; ++t) {
      const int j = ss_cols_[t];
      for (int e = p_.col_start[j]; e < p_.col_start[j + 1]; ++e) {
        const int s = ss_row_[p_.row_index[e]];
        if (s >= 0) trip.emplace_back(s, t, p_.value[e]);
      }
    }
    Eigen::SparseMatrix<double> mat(size, size);
    mat.setFromTriplets(trip.begin(), trip.end());
    mat.makeCompressed();
    lu_.analyzePattern(mat);
    lu_.factorize(mat);
    if (lu_.info() != Eigen::Success) {
      factored_ = false;
      return false;
    }
    return true;
  }

  // Row-space right-hand side in, basis-position vector out.
  void Ftran(std::vector<double>& v) const {
    std::vector<double> out(m_, 0.0);
    const int size = static_cast<int>(ss_cols_.size());
    if (size > 0) {
      Eigen::VectorXd rhs(size);
      for (int s = 0; s < size; ++s) rhs[s] = v[ss_rows_[s]];
      Eigen::VectorXd sol = lu_.solve(rhs);
      for (int t = 0; t < size; ++t) {
        const double xt = sol[t];
        out[ss_col_pos_[t]] = xt;
        if (xt == 0.0) continue;
        const int j = ss_cols_[t];
        for (int e = p_.col_start[j]; e < p_.col_start[j + 1]; ++e) {
          const int i = p_.row_index[e];
          if (ss_row_[i] < 0) v[i] -= p_.value[e] * xt;
        }
      }
    }
    for (int i = 0; i < m_; ++i) {
      if (logical_pos_[i] >= 0) out[logical_pos_[i]] = v[i];
    }
    for (const Eta& eta : etas_) {
      const double vr = out[eta.pos];
      if (vr == 0.0) continue;
      out[eta.pos] = vr * eta.pivot_inv;
      for (size_t e = 0; e < eta.index.size(); ++e) {
        out[eta.index[e]] += eta.value[e] * vr;
      }
    }
    v.swap(out);
  }

  // Basis-position vector in, row-space solution of B'y = c out.
  void Btran(std::vector<double>& c) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double sum = c[it->pos] * it->pivot_inv;
      for (size_t e = 0; e < it->index.size(); ++e) {
        sum += it->value[e] * c[it->index[e]];
      }
      c[it->pos] = sum;
    }
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (logical_pos_[i] >= 0) y[i] = c[logical_pos_[i]];
    }
    const int size = static_cast<int>(ss_cols_.size());
    if (size > 0) {
      Eigen::VectorXd rhs(size);
      for (int t = 0; t < size; ++t) {
        const int j = ss_cols_[t];
        double value = c[ss_col_pos_[t]];
        for (int e = p_.col_start[j]; e < p_.col_start[j + 1]; ++e) {
          const int i = p_.row_index[e];
          if (ss_row_[i] < 0) value -= p_.value[e] * y[i];
        }
        rhs[t] = value;
      }
      Eigen::VectorXd sol = lu_.transpose().solve(rhs);
      for (int s = 0; s < size; ++s) y[ss_rows_[s]] = sol[s];
    }
    c.swap(y);
  }

  void AddColumn(int j, double scale, std::vector<double>& row_vec) const {
    if (j >= n_) {
      row_vec[j - n_] += scale;
      return;
    }
    for (int e = p_.col_start[j]; e < p_.col_start[j + 1]; ++e) {
      row_vec[p_.row_index[e]] += scale * p_.value[e];
    }
  }

  // ---- primal / dual values ------------------------------------------

  void PlaceNonbasic() {
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == BasisStatus::kBasic) continue;
      if (lower_[j] == upper_[j]) {
        status_[j] = BasisStatus::kFixed;
        x_[j] = lower_[j];
        continue;
      }
      if (status_[j] == BasisStatus::kFixed) {
        status_[j] = d_[j] >= 0 ? BasisStatus::kAtLower : BasisStatus::kAtUpper;
      }
      if (status_[j] == BasisStatus::kAtLower && lower_[j] == -kInf) {
        status_[j] = BasisStatus::kAtUpper;
      }
      if (status_[j] == BasisStatus::kAtUpper && upper_[j] == kInf) {
        status_[j] = BasisStatus::kAtLower;
      }
      x_[j] = status_[j] == BasisStatus::kAtLower ? lower_[j] : upper_[j];
    }
  }

  void ComputePrimal() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] != BasisStatus::kBasic && x_[j] != 0.0) {
        AddColumn(j, -x_[j], rhs);
      }
    }
    Ftran(rhs);
    for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
  }

  void ComputeDual() {
    std::vector<double> c(m_);
    for (int r = 0; r < m_; ++r) c[r] = cost_[head_[r]];
    Btran(c);
    y_ = c;
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == BasisStatus::kBasic) {
        d_[j] = 0.0;
        continue;
      }
      double dj = cost_[j];
      for (int e = p_.col_start[j]; e < p_.col_start[j + 1]; ++e) {
        dj -= p_.value[e] * y_[p_.row_index[e]];
      }
      d_[j] = dj;
    }
    for (int i = 0; i < m_; ++i) {
      d_[n_ + i] = status_[n_ + i] == BasisStatus::kBasic ? 0.0 : -y_[i];
    }
  }

  // Flips boxed nonbasics whose reduced cost has the wrong sign. Returns
  // false if a one-sided nonbasic is dual infeasible.
  bool MakeDualFeasible() {
    bool ok = true;
    for (int j = 0; j < total_; ++j) {
      const BasisStatus s = status_[j];
      if (s == BasisStatus::kBasic || s == BasisStatus::kFixed) continue;
      const bool wrong = (s == BasisStatus::kAtLower && d_[j] < -opt_.dual_tolerance) ||
                         (s == BasisStatus::kAtUpper && d_[j] > opt_.dual_tolerance);
      if (!wrong) continue;
      if (lower_[j] == -kInf || upper_[j] == kInf) {
        ok = false;
        continue;
      }
      status_[j] = s == BasisStatus::kAtLower ? BasisStatus::kAtUpper
                                              : BasisStatus::kAtLower;
      x_[j] = status_[j] == BasisStatus::kAtLower ? lower_[j] : upper_[j];
    }
    return ok;
  }

  // Factor, place nonbasics, compute duals and a dual feasible primal.
  bool Reinvert() {
    if (!Factor()) return false;
    ComputeDual();
    PlaceNonbasic();
    if (!MakeDualFeasible()) return false;
    ComputePrimal();
    return true;
  }

  bool ColdStart() {
    SlackBasis();
    return Reinvert();
  }

  // ---- iteration -------------------------------------------------------

  double Infeasibility(int j) const {
    if (x_[j] < lower_[j] - opt_.primal_tolerance) return lower_[j] - x_[j];
    if (x_[j] > upper_[j] + opt_.primal_tolerance) return x_[j] - upper_[j];
    return 0.0;
  }

  int ChooseRow() const {
    int best = -1;
    double best_score = 0.0;
    int best_var = std::numeric_limits<int>::max();
    for (int r = 0; r < m_; ++r) {
      const double inf = Infeasibility(head_[r]);
      if (inf <= 0.0) continue;
      if (bland_) {
        if (head_[r] < best_var) {
          best_var = head_[r];
          best = r;
        }
        continue;
      }
      const double score = inf * inf / weight_[r];
      if (score > best_score) {
        best_score = score;
        best = r;
      }
    }
    return best;
  }

  bool TimeUp() const {
    return opt_.deadline && std::chrono::steady_clock::now() >= *opt_.deadline;
  }

  bool AtArtificialBound() const {
    for (int j = 0; j < n_; ++j) {
      if (!artificial_[j]) continue;
      if ((artificial_[j] & 1) && x_[j] <= lower_[j] + 1.0) return true;
      if ((artificial_[j] & 2) && x_[j] >= upper_[j] - 1.0) return true;
    }
    return false;
  }

  LpStatus Solve() {
    int restarts = 0;
    auto recover = [&]() -> bool {
      if (++restarts > 3) return false;
      return ColdStart();
    };
    if (!Reinvert() && !recover()) return LpStatus::kNumericalFailure;

    const int64_t start_iterations = iterations_;
    bool verified = false;
    int mismatch_streak = 0;
    int degenerate_streak = 0;
    bland_ = false;
    std::vector<double> alpha_row(total_, 0.0);
    std::vector<int> touched;
    std::vector<Candidate> cand;

    while (true) {
      if (iterations_ - start_iterations >= opt_.max_iterations) return LpStatus::kIterationLimit;
      if ((iterations_ & 31) == 0 && TimeUp()) return LpStatus::kTimeLimit;
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
        if (!Reinvert() && !recover()) return LpStatus::kNumericalFailure;
      }

      const int r = ChooseRow();
      if (r < 0) {
        if (!verified && !etas_.empty()) {
          verified = true;
          if (!Reinvert() && !recover()) return LpStatus::kNumericalFailure;
          continue;
        }
        return AtArtificialBound() ? LpStatus::kUnbounded : LpStatus::kOptimal;
      }
      verified = false;

      const int p = head_[r];
      const bool to_upper = x_[p] > upper_[p];
      const double delta =
          to_upper ? x_[p] - upper_[p] : lower_[p] - x_[p];  // > 0
      const double sign = to_upper ? 1.0 : -1.0;

      // Pivot row.
      std::vector<double> rho(m_, 0.0);
      rho[r] = 1.0;
      Btran(rho);
      for (int j : touched) alpha_row[j] = 0.0;
      touched.clear();
      for (int i = 0; i < m_; ++i) {
        const double ri = rho[i];
        if (ri == 0.0) continue;
        for (int e = rstart_[i]; e < rstart_[i + 1]; ++e) {
          const int j = rcol_[e];
          if (status_[j] == BasisStatus::kBasic) continue;
          if (alpha_row[j] == 0.0) touched.push_back(j);
          alpha_row[j] += ri * rval_[e];
          if (alpha_row[j] == 0.0) alpha_row[j] = 1e-300;
        }
        const int s = n_ + i;
        if (status_[s] != BasisStatus::kBasic) {
          if (alpha_row[s] == 0.0) touched.push_back(s);
          alpha_row[s] += ri;
        }
      }

      // Ratio test candidates.
      cand.clear();
      for (int j : touched) {
        const BasisStatus st = status_[j];
        if (st == BasisStatus::kFixed) continue;
        const double a = sign * alpha_row[j];
        if (std::abs(a) < opt_.pivot_tolerance) continue;
        if ((st == BasisStatus::kAtLower && a > 0) ||
            (st == BasisStatus::kAtUpper && a < 0)) {
          const double dj = std::abs(d_[j]);
          const bool right_sign = (a > 0) == (d_[j] >= 0) || d_[j] == 0.0;
          const double num = right_sign ? dj : 0.0;
          cand.push_back({j, num / std::abs(a),
                          (num + opt_.dual_tolerance) / std::abs(a),
                          std::abs(a)});
        }
      }
      if (cand.empty()) {
        if (!etas_.empty()) {
          if (!Reinvert() && !recover()) return LpStatus::kNumericalFailure;
          continue;
        }
        return LpStatus::kInfeasible;
      }

      std::vector<int> flips;
      int q = -1;
      if (bland_) {
        double best_ratio = kInf;
        for (const Candidate& c : cand) best_ratio = std::min(best_ratio, c.ratio);
        for (const Candidate& c : cand) {
          if (c.ratio <= best_ratio + 1e-12 && (q < 0 || c.var < q)) q = c.var;
        }
      } else {
        std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
          if (a.ratio != b.ratio) return a.ratio < b.ratio;
          return a.var < b.var;
        });
        std::vector<double> suffix_harris(cand.size() + 1, kInf);
        for (size_t k = cand.size(); k-- > 0;) {
          suffix_harris[k] = std::min(suffix_harris[k + 1], cand[k].harris);
        }
        double slope = delta;
        size_t idx = 0;
        while (idx < cand.size()) {
          const double bound = suffix_harris[idx];
          size_t end = idx;
          double drop = 0.0;
          while (end < cand.size() && cand[end].ratio <= bound) {
            const int j = cand[end].var;
            drop += cand[end].abs_alpha * (upper_[j] - lower_[j]);
            ++end;
          }
          if (end == idx) end = idx + 1;  // guard, cannot happen
          const double after = slope - drop;
          // A slope within tolerance of zero is rounding, not a dual ray.
          if (after > opt_.primal_tolerance && std::isfinite(after)) {
            if (end == cand.size()) {
              // The dual improves without limit: primal infeasible.
              if (!etas_.empty()) break;
              return LpStatus::kInfeasible;
            }
            for (size_t k = idx; k < end; ++k) flips.push_back(cand[k].var);
            slope = after;
            idx = end;
            continue;
          }
          double best_alpha = -1.0;
          for (size_t k = idx; k < end; ++k) {
            if (cand[k].abs_alpha > best_alpha) {
              best_alpha = cand[k].abs_alpha;
              q = cand[k].var;
            }
          }
          break;
        }
        if (q < 0) {
          // Infeasibility claim under an eta file: confirm after reinversion.
          if (!Reinvert() && !recover()) return LpStatus::kNumericalFailure;
          continue;
        }
      }

      // Entering column.
      std::vector<double> alpha_q(m_, 0.0);
      AddColumn(q, 1.0, alpha_q);
      Ftran(alpha_q);
      const double arq = alpha_row[q];
      if (std::abs(alpha_q[r] - arq) > 1e-7 * (1.0 + std::abs(arq))) {
        if (++mismatch_streak > 3) return LpStatus::kNumericalFailure;
        if (etas_.empty()) {
          if (!recover()) return LpStatus::kNumericalFailure;
        } else if (!Reinvert() && !recover()) {
          return LpStatus::kNumericalFailure;
        }
        continue;
      }
      mismatch_streak = 0;

      // Dual update.
      const double theta_d = d_[q] / arq;
      for (int j : touched) {
        if (status_[j] != BasisStatus::kBasic) d_[j] -= theta_d * alpha_row[j];
      }
      d_[q] = 0.0;
      d_[p] = -theta_d;

      // Bound flips.
      if (!flips.empty()) {
        std::vector<double> delta_rows(m_, 0.0);
        for (int j : flips) {
          const double target = status_[j] == BasisStatus::kAtLower ? upper_[j] : lower_[j];
          status_[j] = status_[j] == BasisStatus::kAtLower ? BasisStatus::kAtUpper
                                                           : BasisStatus::kAtLower;
          AddColumn(j, target - x_[j], delta_rows);
          x_[j] = target;
        }
        Ftran(delta_rows);
        for (int i = 0; i < m_; ++i) x_[head_[i]] -= delta_rows[i];
      }

      // Primal step.
      const double target = to_upper ? upper_[p] : lower_[p];
      const double theta_p = (x_[p] - target) / alpha_q[r];
      for (int i = 0; i < m_; ++i) {
        if (alpha_q[i] != 0.0) x_[head_[i]] -= theta_p * alpha_q[i];
      }
      x_[q] += theta_p;
      x_[p] = target;

      // Steepest edge weights.
      {
        std::vector<double> tau = rho;
        double wr = 0.0;
        for (double v : rho) wr += v * v;
        Ftran(tau);
        const double ar = alpha_q[r];
        for (int i = 0; i < m_; ++i) {
          if (i == r || alpha_q[i] == 0.0) continue;
          const double ratio = alpha_q[i] / ar;
          weight_[i] = std::max(weight_[i] + ratio * (ratio * wr - 2.0 * tau[i]),
                                kMinWeight);
        }
        weight_[r] = std::max(wr / (ar * ar), kMinWeight);
      }

      // Basis change.
      head_[r] = q;
      pos_[q] = r;
      pos_[p] = -1;
      status_[q] = BasisStatus::kBasic;
      status_[p] = lower_[p] == upper_[p]
                       ? BasisStatus::kFixed
                       : (to_upper ? BasisStatus::kAtUpper : BasisStatus::kAtLower);
      Eta eta;
      eta.pos = r;
      eta.pivot_inv = 1.0 / alpha_q[r];
      for (int i = 0; i < m_; ++i) {
        if (i == r || std::abs(alpha_q[i]) < kEtaDropTolerance) continue;
        eta.index.push_back(i);
        eta.value.push_back(-alpha_q[i] * eta.pivot_inv);
      }
      etas_.push_back(std::move(eta));

      ++iterations_;
      if (std::abs(theta_d) < 1e-12) {
        if (++degenerate_streak >= opt_.degenerate_stall_limit) bland_ = true;
      } else {
        degenerate_streak = 0;
        bland_ = false;
      }
    }
  }

  // ---- accessors -------------------------------------------------------

  double Objective() const {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
    return z;
  }

  LpProblem p_;
  LpOptions opt_;
  int m_ = 0;
  int n_ = 0;
  int total_ = 0;
  std::vector<int> rstart_;
  std::vector<int> rcol_;
  std::vector<double> rval_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<uint8_t> artificial_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<double> y_;
  std::vector<BasisStatus> status_;
  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<double> weight_;
  bool bland_ = false;
  int64_t iterations_ = 0;

  bool factored_ = false;
  std::vector<int> ss_row_;
  std::vector<int> ss_rows_;
  std::vector<int> ss_cols_;
  std::vector<int> ss_col_pos_;
  std::vector<int> logical_pos_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

DualSimplex::DualSimplex(LpProblem problem, LpOptions options)
    : impl_(std::make_unique<Impl>(std::move(problem), options)) {}
DualSimplex::~DualSimplex() = default;
DualSimplex::DualSimplex(DualSimplex&&) noexcept = default;
DualSimplex& DualSimplex::operator=(DualSimplex&&) noexcept = default;

void DualSimplex::SetColumnBounds(int j, double lower, double upper) {
  impl_->ApplyColumnBounds(j, lower, upper);
}
double DualSimplex::column_lower(int j) const { return impl_->lower_[j]; }
double DualSimplex::column_upper(int j) const { return impl_->upper_[j]; }
void DualSimplex::ResetColumnBounds() {
  for (int j = 0; j < impl_->n_; ++j) {
    impl_->ApplyColumnBounds(j, impl_->p_.col_lower[j], impl_->p_.col_upper[j]);
  }
}
void DualSimplex::SetOptions(const LpOptions& options) { impl_->opt_ = options; }
LpStatus DualSimplex::Solve() { return impl_->Solve(); }
double DualSimplex::Objective() const { return impl_->Objective(); }

std::vector<double> DualSimplex::ColumnValues() const {
  return {impl_->x_.begin(), impl_->x_.begin() + impl_->n_};
}
std::vector<double> DualSimplex::RowDuals() const { return impl_->y_; }
std::vector<double> DualSimplex::ReducedCosts() const {
  return {impl_->d_.begin(), impl_->d_.begin() + impl_->n_};
}

LpBasis DualSimplex::GetBasis() const { return LpBasis{impl_->status_}; }

void DualSimplex::SetBasis(const LpBasis& basis) {
  Impl& s = *impl_;
  if (static_cast<int>(basis.status.size()) != s.total_) {
    s.SlackBasis();
    return;
  }
  int basic = 0;
  for (BasisStatus st : basis.status) basic += st == BasisStatus::kBasic;
  if (basic != s.m_) {
    s.SlackBasis();
    return;
  }
  s.status_ = basis.status;
  s.pos_.assign(s.total_, -1);
  int r = 0;
  for (int j = 0; j < s.total_; ++j) {
    if (s.status_[j] == BasisStatus::kBasic) {
      s.head_[r] = j;
      s.pos_[j] = r;
      ++r;
    }
  }
  s.weight_.assign(s.m_, 1.0);
  s.factored_ = false;
}

int64_t DualSimplex::iterations() const { return impl_->iterations_; }
int DualSimplex::num_rows() const { return impl_->m_; }
int DualSimplex::num_cols() const { return impl_->n_; }

LpResult SolveLp(const MilpModel& model, const LpOptions& options) {
  DualSimplex simplex(LpFromModel(model), options);
  LpResult result;
  result.status = simplex.Solve();
  result.iterations = simplex.iterations();
  result.x = simplex.ColumnValues();
  result.row_duals = simplex.RowDuals();
  result.objective = model.maximize ? -simplex.Objective() : simplex.Objective();
  return result;
}

}  // namespace odt

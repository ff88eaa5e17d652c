#include "mmot/lp.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "mmot/error.hpp"

namespace mmot::lp {

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Sign tests; rational is exact, float treats |x| <= tol as zero.
inline bool positive(const Rational& x, double) { return sgn(x) > 0; }
inline bool negative(const Rational& x, double) { return sgn(x) < 0; }
inline bool nonzero(const Rational& x, double) { return sgn(x) != 0; }
inline void clean(Rational&, double) {}
inline bool positive(double x, double tol) { return x > tol; }
inline bool negative(double x, double tol) { return x < -tol; }
inline bool nonzero(double x, double tol) { return std::abs(x) > tol; }
inline void clean(double& x, double tol) {
  if (std::abs(x) <= tol) x = 0.0;
}

template <class T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * (cols + 1)), basis_(rows, kNone) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& at(std::size_t i, std::size_t j) { return cells_[i * (cols_ + 1) + j]; }
  const T& at(std::size_t i, std::size_t j) const { return cells_[i * (cols_ + 1) + j]; }
  T& rhs(std::size_t i) { return at(i, cols_); }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  /// Pivots on (r, e), also eliminating column e from the objective row `obj`.
  void pivot(std::size_t r, std::size_t e, std::vector<T>& obj, double tol) {
    const T piv = at(r, e);
    nonzero_.clear();
    for (std::size_t j = 0; j <= cols_; ++j)
      if (nonzero(at(r, j), 0.0)) nonzero_.push_back(j);
    for (std::size_t j : nonzero_) at(r, j) /= piv;
    at(r, e) = T(1);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || !nonzero(at(i, e), 0.0)) continue;
      const T factor = at(i, e);
      for (std::size_t j : nonzero_) {
        at(i, j) -= factor * at(r, j);
        clean(at(i, j), tol);
      }
      at(i, e) = T(0);
    }
    if (nonzero(obj[e], 0.0)) {
      const T factor = obj[e];
      for (std::size_t j : nonzero_) {
        obj[j] -= factor * at(r, j);
        clean(obj[j], tol);
      }
      obj[e] = T(0);
    }
    basis_[r] = e;
  }

  void dump(std::ostream& os, const std::vector<T>& obj) const {
    for (std::size_t i = 0; i < rows_; ++i) {
      os << "  [b=" << basis_[i] << "]";
      for (std::size_t j = 0; j <= cols_; ++j) os << ' ' << to_double(at(i, j));
      os << '\n';
    }
    os << "  [obj]";
    for (const auto& v : obj) os << ' ' << to_double(v);
    os << '\n';
  }

 private:
  std::size_t rows_, cols_;
  std::vector<T> cells_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nonzero_;
};

enum class RunResult { Optimal, Unbounded };

template <class T>
class Simplex {
 public:
  Simplex(const LinearProgram<T>& program, const Options& options) : program_(program), options_(options) {}

  Outcome<T> solve() {
    build();
    Outcome<T> out;
    const double tol = tolerance();

    if (first_artificial_ < total_cols_) {
      std::vector<T> obj = phase_costs(/*phase_one=*/true);
      run(obj, /*bar_artificials=*/false);
      const T infeasibility = -obj[total_cols_];
      if (positive(infeasibility, Tolerance::kFeasibility)) {
        out.status = Status::Infeasible;
        out.infeasibility_certificate.resize(program_.constraints.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
          const std::size_t u = rows_[i].unit_col;
          const T c_u = u >= first_artificial_ ? T(1) : T(0);
          T y = c_u - obj[u];
          if (rows_[i].flipped) y = -y;
          out.infeasibility_certificate[i] = y;
        }
        out.pivots = pivots_;
        return out;
      }
      drive_out_artificials(obj, tol);
    }

    std::vector<T> obj = phase_costs(/*phase_one=*/false);
    if (run(obj, /*bar_artificials=*/true) == RunResult::Unbounded) {
      out.status = Status::Unbounded;
      out.pivots = pivots_;
      return out;
    }

    out.status = Status::Optimal;
    std::vector<T> column_values(total_cols_, T(0));
    for (std::size_t i = 0; i < tableau_->rows(); ++i) column_values[tableau_->basis()[i]] = tableau_->rhs(i);
    const std::size_t n = program_.variables();
    out.primal.assign(n, T(0));
    for (std::size_t j = 0; j < n; ++j) {
      out.primal[j] = column_values[pos_col_[j]];
      if (neg_col_[j] != kNone) out.primal[j] -= column_values[neg_col_[j]];
    }
    const bool maximize = program_.sense == Sense::Maximize;
    out.objective_value = -obj[total_cols_];
    if (maximize) out.objective_value = -out.objective_value;
    out.dual.resize(program_.constraints.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      T y = -obj[rows_[i].unit_col];
      if (rows_[i].flipped) y = -y;
      if (maximize) y = -y;
      out.dual[i] = y;
    }
    out.pivots = pivots_;
    return out;
  }

 private:
  struct RowInfo {
    bool flipped = false;
    std::size_t unit_col = kNone;
  };

  double tolerance() const { return is_exact_v<T> ? 0.0 : options_.pivot_tolerance; }

  void build() {
    const std::size_t n = program_.variables();
    if (!program_.bounds.empty() && program_.bounds.size() != n)
      throw Error(Errc::DimensionMismatch, "bounds length differs from variable count");
    for (const auto& row : program_.constraints)
      if (row.coeffs.size() != n) throw Error(Errc::DimensionMismatch, "constraint row length differs from variable count");

    std::size_t col = 0;
    pos_col_.assign(n, kNone);
    neg_col_.assign(n, kNone);
    col_var_.clear();
    for (std::size_t j = 0; j < n; ++j) {
      pos_col_[j] = col++;
      col_var_.push_back(j);
      if (program_.bound(j) == Bound::Free) {
        neg_col_[j] = col++;
        col_var_.push_back(j);
      }
    }
    structural_cols_ = col;

    const std::size_t m = program_.constraints.size();
    rows_.assign(m, RowInfo{});
    std::vector<std::size_t> slack_col(m, kNone);
    std::vector<int> slack_sign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = program_.constraints[i];
      rows_[i].flipped = negative(row.rhs, 0.0);
      if (row.relation != Relation::Equal) {
        slack_col[i] = col++;
        int s = row.relation == Relation::LessEqual ? 1 : -1;
        slack_sign[i] = rows_[i].flipped ? -s : s;
        if (slack_sign[i] == 1) rows_[i].unit_col = slack_col[i];
      }
    }
    first_artificial_ = col;
    for (std::size_t i = 0; i < m; ++i)
      if (rows_[i].unit_col == kNone) rows_[i].unit_col = col++;
    total_cols_ = col;

    tableau_.emplace(m, total_cols_);
    auto& tab = *tableau_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = program_.constraints[i];
      const bool f = rows_[i].flipped;
      for (std::size_t j = 0; j < n; ++j) {
        if (!nonzero(row.coeffs[j], 0.0)) continue;
        tab.at(i, pos_col_[j]) = f ? T(-row.coeffs[j]) : row.coeffs[j];
        if (neg_col_[j] != kNone) tab.at(i, neg_col_[j]) = f ? row.coeffs[j] : T(-row.coeffs[j]);
      }
      if (slack_col[i] != kNone) tab.at(i, slack_col[i]) = T(slack_sign[i]);
      tab.at(i, rows_[i].unit_col) = T(1);
      tab.rhs(i) = f ? T(-row.rhs) : row.rhs;
      tab.basis()[i] = rows_[i].unit_col;
    }
  }

  T column_cost(std::size_t col, bool phase_one) const {
    if (phase_one) return col >= first_artificial_ ? T(1) : T(0);
    if (col >= structural_cols_) return T(0);
    const std::size_t j = col_var_[col];
    T c = program_.objective[j];
    if (neg_col_[j] == col) c = -c;
    if (program_.sense == Sense::Maximize) c = -c;
    return c;
  }

  /// Reduced-cost row for the current basis; the last entry holds -objective.
  std::vector<T> phase_costs(bool phase_one) const {
    auto& tab = *tableau_;
    std::vector<T> costs(total_cols_);
    for (std::size_t j = 0; j < total_cols_; ++j) costs[j] = column_cost(j, phase_one);
    std::vector<T> obj(total_cols_ + 1, T(0));
    for (std::size_t j = 0; j < total_cols_; ++j) obj[j] = costs[j];
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      const T& cb = costs[tab.basis()[i]];
      if (!nonzero(cb, 0.0)) continue;
      for (std::size_t j = 0; j <= total_cols_; ++j)
        if (nonzero(tab.at(i, j), 0.0)) obj[j] -= cb * tab.at(i, j);
    }
    for (auto& v : obj) clean(v, tolerance());
    return obj;
  }

  RunResult run(std::vector<T>& obj, bool bar_artificials) {
    auto& tab = *tableau_;
    const double tol = tolerance();
    const std::size_t limit = bar_artificials ? first_artificial_ : total_cols_;
    while (true) {
      if (options_.verbosity > 0 && options_.log != nullptr) {
        *options_.log << "pivot " << pivots_ << '\n';
        tab.dump(*options_.log, obj);
      }
      std::size_t entering = kNone;
      for (std::size_t j = 0; j < limit; ++j)
        if (negative(obj[j], tol)) {
          entering = j;
          break;
        }
      if (entering == kNone) return RunResult::Optimal;

      std::size_t leaving = kNone;
      T best{};
      for (std::size_t i = 0; i < tab.rows(); ++i) {
        if (!positive(tab.at(i, entering), tol)) continue;
        T ratio = tab.rhs(i) / tab.at(i, entering);
        if (leaving == kNone) {
          leaving = i;
          best = ratio;
          continue;
        }
        bool better;
        if constexpr (is_exact_v<T>) {
          better = ratio < best || (ratio == best && tab.basis()[i] < tab.basis()[leaving]);
        } else {
          const double scale = 1e-12 * std::max(1.0, std::abs(best));
          better = ratio < best - scale || (std::abs(ratio - best) <= scale && tab.basis()[i] < tab.basis()[leaving]);
        }
        if (better) {
          leaving = i;
          best = ratio;
        }
      }
      if (leaving == kNone) return RunResult::Unbounded;

      tab.pivot(leaving, entering, obj, tol);
      ++pivots_;
      if constexpr (!is_exact_v<T>) {
        for (std::size_t i = 0; i < tab.rows(); ++i)
          if (tab.rhs(i) < 0.0) tab.rhs(i) = 0.0;
        if (pivots_ > options_.iteration_limit)
          throw Error(Errc::IterationLimit, "simplex exceeded " + std::to_string(options_.iteration_limit) + " pivots");
      }
    }
  }

  // Artificials still basic at level zero are pivoted out where possible; rows
  // where that fails are linearly dependent and stay zero in every structural column.
  void drive_out_artificials(std::vector<T>& obj, double tol) {
    auto& tab = *tableau_;
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      if (tab.basis()[i] < first_artificial_) continue;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (nonzero(tab.at(i, j), tol)) {
          tab.pivot(i, j, obj, tol);
          ++pivots_;
          break;
        }
      }
    }
  }

  const LinearProgram<T>& program_;
  Options options_;
  std::vector<RowInfo> rows_;
  std::vector<std::size_t> pos_col_, neg_col_, col_var_;
  std::size_t structural_cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t total_cols_ = 0;
  std::optional<Tableau<T>> tableau_;
  std::size_t pivots_ = 0;
};

}  // namespace

template <class T>
Outcome<T> solve_lp(const LinearProgram<T>& program, const Options& options) {
  if (program.objective.size() != program.variables())
    throw Error(Errc::DimensionMismatch, "objective length differs from variable count");
  return Simplex<T>(program, options).solve();
}

template <class T>
Feasibility<T> check_feasibility(const std::vector<Constraint<T>>& constraints, const std::vector<Bound>& bounds,
                                 std::size_t variables, const Options& options) {
  LinearProgram<T> program;
  program.objective.assign(variables, T(0));
  program.constraints = constraints;
  program.bounds = bounds;
  auto outcome = solve_lp(program, options);
  Feasibility<T> result;
  result.feasible = outcome.status == Status::Optimal;
  if (result.feasible)
    result.point = std::move(outcome.primal);
  else
    result.certificate = std::move(outcome.infeasibility_certificate);
  return result;
}

template <class T>
bool verify_farkas(const std::vector<Constraint<T>>& constraints, const std::vector<Bound>& bounds,
                   std::size_t variables, const std::vector<T>& certificate, double tol) {
  if (certificate.size() != constraints.size()) return false;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const T& y = certificate[i];
    if (constraints[i].relation == Relation::LessEqual && !leq(y, T(0), tol)) return false;
    if (constraints[i].relation == Relation::GreaterEqual && !leq(T(0), y, tol)) return false;
  }
  for (std::size_t j = 0; j < variables; ++j) {
    T combo(0);
    for (std::size_t i = 0; i < constraints.size(); ++i) combo += certificate[i] * constraints[i].coeffs.at(j);
    const Bound b = bounds.empty() ? Bound::NonNegative : bounds[j];
    if (b == Bound::Free ? !near(combo, T(0), tol) : !leq(combo, T(0), tol)) return false;
  }
  T yb(0);
  for (std::size_t i = 0; i < constraints.size(); ++i) yb += certificate[i] * constraints[i].rhs;
  return strictly_less(T(0), yb, tol);
}

#define MMOT_INSTANTIATE_LP(T)                                                                               \
  template Outcome<T> solve_lp<T>(const LinearProgram<T>&, const Options&);                                  \
  template Feasibility<T> check_feasibility<T>(const std::vector<Constraint<T>>&, const std::vector<Bound>&, \
                                               std::size_t, const Options&);                                 \
  template bool verify_farkas<T>(const std::vector<Constraint<T>>&, const std::vector<Bound>&, std::size_t,  \
                                 const std::vector<T>&, double);

MMOT_INSTANTIATE_LP(Rational)
MMOT_INSTANTIATE_LP(double)

}  // namespace mmot::lp

#include "dirlat/simplex.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace dirlat::simplex {

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

enum class Kind { Structural, Slack, Artificial, Dead };

struct Column {
  std::vector<std::pair<int, double>> entries;
  double cost = 0.0;
  Kind kind = Kind::Structural;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised when refactorization finds the basis singular; solve() restarts from scratch.
struct SingularBasis {};
// Smaller entries in a zero-level artificial's row are treated as noise.
constexpr double kArtificialPivot = 1e-7;

}  // namespace

struct Solver::Impl {
  Options opt;
  std::vector<Column> cols;
  std::vector<int> var_col;
  std::vector<Sense> sense;
  std::vector<double> rhs;

  std::vector<int> basis;
  std::vector<int> pos;
  Eigen::MatrixXd binv;
  Eigen::VectorXd xb;
  bool have_basis = false;
  bool needs_refactor = false;
  long iters = 0;
  long solve_start = 0;
  int since_refactor = 0;
  int phase = 2;
  // Cost shifts on nonbasic columns while the dual simplex runs; they break dual degeneracy.
  std::vector<double> shift;
  bool shifted = false;

  int m() const { return static_cast<int>(rhs.size()); }

  double cost_of(int j) const {
    const Column& c = cols[j];
    if (phase == 1) return c.kind == Kind::Artificial ? 1.0 : 0.0;
    const double base = c.kind == Kind::Structural ? c.cost : 0.0;
    return shifted && j < static_cast<int>(shift.size()) ? base + shift[j] : base;
  }

  void shift_costs() {
    shift.assign(cols.size(), 0.0);
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
      if (!eligible(j)) continue;
      const double spread = 1.0 + std::fmod(0.6180339887 * (j + 1), 1.0);
      shift[j] = 1e-7 * spread * (1.0 + std::abs(cost_of(j)));
    }
    shifted = true;
  }

  bool eligible(int j) const {
    const Kind k = cols[j].kind;
    return pos[j] < 0 && k != Kind::Artificial && k != Kind::Dead;
  }

  long limit() const {
    if (opt.iteration_limit > 0) return opt.iteration_limit;
    return 50L * (m() + static_cast<long>(cols.size())) + 20000;
  }

  void add_column(Column c) {
    cols.push_back(std::move(c));
    pos.push_back(-1);
  }

  void refactor() {
    const int rows = m();
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < rows; ++i)
      for (auto [r, v] : cols[basis[i]].entries) trip.emplace_back(r, i, v);
    Eigen::SparseMatrix<double> B(rows, rows);
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(B);
    lu.factorize(B);
    if (lu.info() != Eigen::Success) throw SingularBasis();
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(rows, rows);
    binv = lu.solve(eye);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) b[i] = rhs[i];
    xb = binv * b;
    since_refactor = 0;
    needs_refactor = false;
  }

  Eigen::VectorXd prices() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m());
    for (int i = 0; i < m(); ++i) {
      const double c = cost_of(basis[i]);
      if (c != 0.0) y.noalias() += c * binv.row(i).transpose();
    }
    return y;
  }

  double reduced_cost(int j, const Eigen::VectorXd& y) const {
    double d = cost_of(j);
    for (auto [r, v] : cols[j].entries) d -= y[r] * v;
    return d;
  }

  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m());
    for (auto [r, v] : cols[j].entries) a.noalias() += v * binv.col(r);
    return a;
  }

  void pivot(int r, int q, const Eigen::VectorXd& alpha, double theta) {
    xb.noalias() -= theta * alpha;
    xb[r] = theta;
    Eigen::RowVectorXd row = binv.row(r) / alpha[r];
    binv.noalias() -= alpha * row;
    binv.row(r) = row;
    pos[basis[r]] = -1;
    basis[r] = q;
    pos[q] = r;
    ++iters;
    if (++since_refactor >= opt.refactor_interval) needs_refactor = true;
  }

  Status primal_iterations() {
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iters - solve_start > limit()) return Status::IterationLimit;
      if (needs_refactor) refactor();
      const Eigen::VectorXd y = prices();
      int q = -1;
      double best = -opt.optimality_tol;
      for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        if (!eligible(j)) continue;
        const double d = reduced_cost(j, y);
        if (d < best) {
          q = j;
          if (bland) break;
          best = d;
        }
      }
      if (q < 0) return Status::Optimal;
      const double dq = reduced_cost(q, y);
      const Eigen::VectorXd alpha = ftran(q);

      int r = -1;
      // Basic artificials (phase two) must stay at zero.
      if (phase == 2) {
        double big = kArtificialPivot;
        for (int i = 0; i < m(); ++i)
          if (cols[basis[i]].kind == Kind::Artificial && std::abs(alpha[i]) > big) {
            big = std::abs(alpha[i]);
            r = i;
          }
      }
      double theta = 0.0;
      if (r < 0 && bland) {
        double best_ratio = kInf;
        for (int i = 0; i < m(); ++i)
          if (alpha[i] > opt.pivot_tol) best_ratio = std::min(best_ratio, std::max(0.0, xb[i]) / alpha[i]);
        for (int i = 0; i < m(); ++i)
          if (alpha[i] > opt.pivot_tol && std::max(0.0, xb[i]) / alpha[i] <= best_ratio + 1e-12 &&
              (r < 0 || basis[i] < basis[r]))
            r = i;
        if (r >= 0) theta = std::max(0.0, xb[r]) / alpha[r];
      } else if (r < 0) {
        double bound = kInf;
        for (int i = 0; i < m(); ++i)
          if (alpha[i] > opt.pivot_tol)
            bound = std::min(bound, (std::max(0.0, xb[i]) + opt.feasibility_tol) / alpha[i]);
        double big = 0.0;
        for (int i = 0; i < m(); ++i)
          if (alpha[i] > opt.pivot_tol && std::max(0.0, xb[i]) / alpha[i] <= bound && alpha[i] > big) {
            big = alpha[i];
            r = i;
          }
        if (r >= 0) theta = std::max(0.0, xb[r]) / alpha[r];
      }
      if (r < 0) return Status::Unbounded;

      // Bland's rule stays on once a long degenerate run has been seen.
      if (theta * std::abs(dq) < 1e-9) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(r, q, alpha, theta);
    }
  }

  // Primal simplex on slightly raised basic values, which breaks primal degeneracy. The true
  // values are restored afterwards; dual then primal iterations remove what is left.
  Status optimize() {
    if (needs_refactor) refactor();
    const std::vector<double> saved = rhs;
    for (int i = 0; i < m(); ++i) {
      const double spread = 1.0 + std::fmod(0.7548776662 * (i + 1), 1.0);
      xb[i] = std::max(0.0, xb[i]) + 1e-7 * spread * (1.0 + std::abs(xb[i]));
    }
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (int i = 0; i < m(); ++i)
      for (auto [r, v] : cols[basis[i]].entries) rhs[r] += v * xb[i];
    Status st;
    try {
      st = primal_iterations();
    } catch (const SingularBasis&) {
      rhs = saved;
      throw;
    }
    rhs = saved;
    refactor();
    if (st != Status::Optimal) return st;
    bool infeasible = false;
    for (int i = 0; i < m(); ++i) infeasible = infeasible || xb[i] < -opt.feasibility_tol;
    if (infeasible) {
      st = dual();
      if (st != Status::Optimal) return st;
    }
    return primal_iterations();
  }

  Status dual() {
    shift_costs();
    const Status st = dual_iterations();
    shifted = false;
    return st;
  }

  Status dual_iterations() {
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iters - solve_start > limit()) return Status::IterationLimit;
      if (needs_refactor) refactor();
      int r = -1;
      double worst = -opt.feasibility_tol;
      for (int i = 0; i < m(); ++i) {
        if (xb[i] >= -opt.feasibility_tol) continue;
        if (bland ? (r < 0 || basis[i] < basis[r]) : xb[i] < worst) {
          worst = xb[i];
          r = i;
        }
      }
      if (r < 0) return Status::Optimal;
      const Eigen::VectorXd y = prices();
      const Eigen::RowVectorXd rho = binv.row(r);
      int q = -1;
      double best_ratio = kInf, best_mag = 0.0;
      for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        if (!eligible(j)) continue;
        double a = 0.0;
        for (auto [row, v] : cols[j].entries) a += rho[row] * v;
        if (a >= -opt.pivot_tol) continue;
        const double ratio = std::max(0.0, reduced_cost(j, y)) / -a;
        const bool better = bland ? ratio < best_ratio - 1e-12
                                  : ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && -a > best_mag);
        if (better) {
          best_ratio = std::min(best_ratio, ratio);
          best_mag = -a;
          q = j;
        }
      }
      if (q < 0) return Status::Infeasible;
      // The dual objective grows by ratio times the infeasibility.
      if (best_ratio * -xb[r] < 1e-9) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
      }
      const Eigen::VectorXd alpha = ftran(q);
      pivot(r, q, alpha, xb[r] / alpha[r]);
    }
  }

  void expel_artificials() {
    for (int i = 0; i < m(); ++i) {
      if (cols[basis[i]].kind != Kind::Artificial) continue;
      const Eigen::RowVectorXd rho = binv.row(i);
      int q = -1;
      double big = 1e-7;
      for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        if (!eligible(j)) continue;
        double a = 0.0;
        for (auto [row, v] : cols[j].entries) a += rho[row] * v;
        if (std::abs(a) > big) {
          big = std::abs(a);
          q = j;
        }
      }
      if (q < 0) continue;
      const Eigen::VectorXd alpha = ftran(q);
      pivot(i, q, alpha, xb[i] / alpha[i]);
    }
    for (int j = 0; j < static_cast<int>(cols.size()); ++j)
      if (cols[j].kind == Kind::Artificial && pos[j] < 0) cols[j].kind = Kind::Dead;
  }

  Status cold_start() {
    shifted = false;
    phase = 2;
    for (auto& c : cols)
      if (c.kind == Kind::Artificial) c.kind = Kind::Dead;
    std::fill(pos.begin(), pos.end(), -1);
    basis.assign(m(), -1);
    // Slack columns were created in row order; find them per row.
    std::vector<int> slack_of_row(m(), -1);
    for (int j = 0; j < static_cast<int>(cols.size()); ++j)
      if (cols[j].kind == Kind::Slack) slack_of_row[cols[j].entries.front().first] = j;
    bool any_artificial = false;
    for (int i = 0; i < m(); ++i) {
      const int s = slack_of_row[i];
      if (s >= 0) {
        const double coef = cols[s].entries.front().second;
        if (rhs[i] * coef >= 0.0) {
          basis[i] = s;
          pos[s] = i;
          continue;
        }
      }
      Column art;
      art.entries.push_back({i, rhs[i] >= 0.0 ? 1.0 : -1.0});
      art.kind = Kind::Artificial;
      add_column(std::move(art));
      basis[i] = static_cast<int>(cols.size()) - 1;
      pos[basis[i]] = i;
      any_artificial = true;
    }
    refactor();
    have_basis = true;
    if (any_artificial) {
      phase = 1;
      Status st = optimize();
      if (st == Status::IterationLimit) return st;
      double infeas = 0.0;
      for (int i = 0; i < m(); ++i)
        if (cols[basis[i]].kind == Kind::Artificial) infeas += std::abs(xb[i]);
      double scale = 1.0;
      for (double b : rhs) scale = std::max(scale, std::abs(b));
      if (infeas > 1e-7 * scale) {
        have_basis = false;
        phase = 2;
        return Status::Infeasible;
      }
      expel_artificials();
    }
    phase = 2;
    return optimize();
  }
};

Solver::Solver(Options options) : impl_(std::make_unique<Impl>()) { impl_->opt = options; }
Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

int Solver::add_variable(double cost) {
  Column c;
  c.cost = cost;
  impl_->add_column(std::move(c));
  impl_->var_col.push_back(static_cast<int>(impl_->cols.size()) - 1);
  return static_cast<int>(impl_->var_col.size()) - 1;
}

int Solver::add_column(double cost, const std::vector<Term>& entries) {
  Impl& s = *impl_;
  Column c;
  c.cost = cost;
  for (const Term& t : entries) {
    if (t.index < 0 || t.index >= s.m()) throw std::out_of_range("simplex: unknown row in column");
    if (t.value != 0.0) c.entries.push_back({t.index, t.value});
  }
  s.add_column(std::move(c));
  s.var_col.push_back(static_cast<int>(s.cols.size()) - 1);
  return static_cast<int>(s.var_col.size()) - 1;
}

int Solver::add_row(const std::vector<Term>& terms, Sense sense, double rhs) {
  Impl& s = *impl_;
  const int r = s.m();
  for (const Term& t : terms) {
    if (t.index < 0 || t.index >= static_cast<int>(s.var_col.size()))
      throw std::out_of_range("simplex: unknown variable in row");
    if (t.value != 0.0) s.cols[s.var_col[t.index]].entries.push_back({r, t.value});
  }
  s.sense.push_back(sense);
  s.rhs.push_back(rhs);
  int slack = -1;
  if (sense != Sense::Equal) {
    Column c;
    c.entries.push_back({r, sense == Sense::LessEqual ? 1.0 : -1.0});
    c.kind = Kind::Slack;
    s.add_column(std::move(c));
    slack = static_cast<int>(s.cols.size()) - 1;
  }
  if (s.have_basis) {
    if (slack < 0) {
      s.have_basis = false;
    } else {
      s.basis.push_back(slack);
      s.pos[slack] = r;
      s.needs_refactor = true;
    }
  }
  return r;
}

int Solver::variable_count() const { return static_cast<int>(impl_->var_col.size()); }
int Solver::row_count() const { return impl_->m(); }

Status Solver::solve() {
  Impl& s = *impl_;
  if (s.m() == 0) {
    for (int v : s.var_col)
      if (s.cols[v].cost < 0) return Status::Unbounded;
    s.basis.clear();
    s.have_basis = true;
    s.binv.resize(0, 0);
    s.xb.resize(0);
    return Status::Optimal;
  }
  s.solve_start = s.iters;
  try {
    if (!s.have_basis) return s.cold_start();
    if (s.needs_refactor) s.refactor();
    Status st = s.dual();
    if (st == Status::IterationLimit) return s.cold_start();
    if (st != Status::Optimal) {
      s.have_basis = false;
      return st;
    }
    return s.optimize();
  } catch (const SingularBasis&) {
  }
  // Accumulated round-off made the basis singular; a cold start rebuilds it.
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      return s.cold_start();
    } catch (const SingularBasis&) {
    }
  }
  s.have_basis = false;
  return Status::IterationLimit;
}

double Solver::objective() const {
  const std::vector<double> x = values();
  double obj = 0.0;
  for (std::size_t v = 0; v < x.size(); ++v) obj += impl_->cols[impl_->var_col[v]].cost * x[v];
  return obj;
}

std::vector<double> Solver::values() const {
  const Impl& s = *impl_;
  std::vector<double> x(s.var_col.size(), 0.0);
  for (std::size_t v = 0; v < x.size(); ++v) {
    const int p = s.pos[s.var_col[v]];
    if (p >= 0) x[v] = std::max(0.0, s.xb[p]);
  }
  return x;
}

std::vector<double> Solver::duals() const {
  const Eigen::VectorXd y = impl_->prices();
  return {y.data(), y.data() + y.size()};
}

long Solver::iterations() const { return impl_->iters; }

}  // namespace dirlat::simplex

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace dirlat::simplex {

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status status);

struct Term {
  int index;
  double value;
};

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-7;
  int refactor_interval = 100;
  long iteration_limit = 0;  // 0: scaled with problem size
};

// min c.x subject to rows, x >= 0. Revised simplex with an explicit basis inverse.
// After an optimal solve, further <= / >= rows can be added and solve() warm-starts
// with the dual simplex.
class Solver {
 public:
  explicit Solver(Options options = {});
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;

  int add_variable(double cost);
  // New variable with coefficients on existing rows (Term::index is a row). Keeps an
  // optimal basis, so the next solve continues with primal iterations.
  int add_column(double cost, const std::vector<Term>& entries);
  int add_row(const std::vector<Term>& terms, Sense sense, double rhs);

  int variable_count() const;
  int row_count() const;

  Status solve();

  double objective() const;
  std::vector<double> values() const;
  // Row prices y with reduced costs c_j - y.A_j.
  std::vector<double> duals() const;
  long iterations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dirlat::simplex

#pragma once

#include <cstddef>
#include <vector>

#include "drocal/types.hpp"

namespace drocal {

enum class RowSense { LessEq, GreaterEq, Equal };

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Vector x;
    long iterations = 0;
};

// Dense linear program over nonnegative variables. Rows are stored dense;
// Equal rows are expanded into a LessEq/GreaterEq pair internally.
class LinearProgram {
  public:
    explicit LinearProgram(std::size_t num_vars) : num_vars_(num_vars) {}

    std::size_t num_vars() const { return num_vars_; }
    std::size_t num_rows() const { return senses_.size(); }

    // coeffs must have num_vars entries
    void add_row(Vector coeffs, RowSense sense, double rhs);
    // convenience: sparse row over a subset of variables
    void add_row_sparse(const std::vector<std::pair<std::size_t, double>>& terms,
                        RowSense sense, double rhs);

    void set_objective(Vector c, bool maximize);

    // Two-phase primal simplex on the condensed tableau. Throws SolverError
    // if the pivot count explodes even under Bland's rule.
    LpSolution solve() const;

  private:
    std::size_t num_vars_;
    std::vector<Vector> rows_;
    std::vector<RowSense> senses_;
    Vector rhs_;
    Vector objective_;
    bool maximize_ = true;
};

} // namespace drocal

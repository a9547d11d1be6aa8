#include "drocal/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "drocal/errors.hpp"

namespace drocal {

namespace {

constexpr double kEps = 1e-9;

// Condensed-tableau primal simplex for
//   maximize c^T x  s.t.  A x <= b,  x >= 0.
// Slack variables stay implicit: the tableau holds one row per constraint and
// one column per nonbasic variable, plus an auxiliary variable for phase 1.
class Tableau {
  public:
    Tableau(const std::vector<Vector>& a, const Vector& b, const Vector& c)
        : m_(a.size()), n_(c.size()), width_(n_ + 2), nonbasic_(n_ + 1),
          basic_(m_), d_((m_ + 2) * width_, 0.0) {
        const long span = static_cast<long>(m_ + n_);
        bland_switch_ = 40L * span + 2000L;
        hard_cap_ = 4000L * span + 1000000L;
        for (std::size_t i = 0; i < m_; ++i) {
            double* row = at(i);
            for (std::size_t j = 0; j < n_; ++j) row[j] = a[i][j];
            basic_[i] = static_cast<long>(n_ + i);
            row[n_] = -1.0;
            row[n_ + 1] = b[i];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            nonbasic_[j] = static_cast<long>(j);
            at(m_)[j] = -c[j];
        }
        nonbasic_[n_] = -1;
        at(m_ + 1)[n_] = 1.0;
    }

    LpSolution run() {
        LpSolution sol;
        std::size_t r = 0;
        for (std::size_t i = 1; i < m_; ++i) {
            if (at(i)[n_ + 1] < at(r)[n_ + 1]) r = i;
        }
        if (m_ > 0 && at(r)[n_ + 1] < -kEps) {
            pivot(r, n_);
            if (!optimize(2) || at(m_ + 1)[n_ + 1] < -kEps) {
                sol.status = LpStatus::Infeasible;
                sol.iterations = iterations_;
                return sol;
            }
            for (std::size_t i = 0; i < m_; ++i) {
                if (basic_[i] != -1) continue;
                // drive the auxiliary variable out of the basis
                std::size_t s = 0;
                for (std::size_t j = 1; j <= n_; ++j) {
                    if (ordered_before(at(i)[j], nonbasic_[j], at(i)[s], nonbasic_[s])) {
                        s = j;
                    }
                }
                pivot(i, s);
            }
        }
        const bool bounded = optimize(1);
        sol.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basic_[i] >= 0 && basic_[i] < static_cast<long>(n_)) {
                sol.x[static_cast<std::size_t>(basic_[i])] = at(i)[n_ + 1];
            }
        }
        sol.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
        sol.value = at(m_)[n_ + 1];
        sol.iterations = iterations_;
        return sol;
    }

  private:
    double* at(std::size_t row) { return d_.data() + row * width_; }
    const double* at(std::size_t row) const { return d_.data() + row * width_; }

    static bool ordered_before(double va, long ia, double vb, long ib) {
        return va < vb || (va == vb && ia < ib);
    }

    void pivot(std::size_t r, std::size_t s) {
        ++iterations_;
        double* prow = at(r);
        const double inv = 1.0 / prow[s];
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i == r) continue;
            double* row = at(i);
            if (std::abs(row[s]) <= kEps) continue;
            const double factor = row[s] * inv;
            for (std::size_t j = 0; j < width_; ++j) row[j] -= prow[j] * factor;
            row[s] = prow[s] * factor;
        }
        for (std::size_t j = 0; j < width_; ++j) {
            if (j != s) prow[j] *= inv;
        }
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i != r) at(i)[s] *= -inv;
        }
        prow[s] = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    // phase 1 optimizes the auxiliary row (m_+1), phase 2... here `phase`
    // follows the classic condensed formulation: objective row m_+phase-1.
    bool optimize(int phase) {
        const std::size_t obj = m_ + static_cast<std::size_t>(phase) - 1;
        for (;;) {
            if (iterations_ > bland_switch_) bland_ = true;
            if (iterations_ > hard_cap_) {
                throw SolverError("simplex exceeded the pivot budget");
            }
            std::size_t s = n_ + 1;
            if (!bland_) {
                for (std::size_t j = 0; j <= n_; ++j) {
                    if (nonbasic_[j] == -phase) continue;
                    if (s == n_ + 1 ||
                        ordered_before(at(obj)[j], nonbasic_[j], at(obj)[s], nonbasic_[s])) {
                        s = j;
                    }
                }
                if (at(obj)[s] >= -kEps) return true;
            } else {
                long best_id = std::numeric_limits<long>::max();
                for (std::size_t j = 0; j <= n_; ++j) {
                    if (nonbasic_[j] == -phase) continue;
                    if (at(obj)[j] < -kEps && nonbasic_[j] < best_id) {
                        best_id = nonbasic_[j];
                        s = j;
                    }
                }
                if (s == n_ + 1) return true;
            }
            std::size_t r = m_;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i)[s];
                if (a <= kEps) continue;
                const double ratio = at(i)[n_ + 1] / a;
                if (r == m_ || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && basic_[i] < basic_[r])) {
                    r = i;
                    best_ratio = ratio;
                }
            }
            if (r == m_) return false; // unbounded direction
            pivot(r, s);
        }
    }

    std::size_t m_, n_, width_;
    std::vector<long> nonbasic_;
    std::vector<long> basic_;
    std::vector<double> d_;
    long iterations_ = 0;
    bool bland_ = false;
    long bland_switch_ = 0;
    long hard_cap_ = 0;
};

} // namespace

void LinearProgram::add_row(Vector coeffs, RowSense sense, double rhs) {
    if (coeffs.size() != num_vars_) throw DomainError("row width mismatch");
    for (double v : coeffs) {
        if (!std::isfinite(v)) throw DomainError("non-finite constraint coefficient");
    }
    if (!std::isfinite(rhs)) throw DomainError("non-finite constraint rhs");
    rows_.push_back(std::move(coeffs));
    senses_.push_back(sense);
    rhs_.push_back(rhs);
}

void LinearProgram::add_row_sparse(const std::vector<std::pair<std::size_t, double>>& terms,
                                   RowSense sense, double rhs) {
    Vector coeffs(num_vars_, 0.0);
    for (const auto& [idx, v] : terms) {
        if (idx >= num_vars_) throw DomainError("sparse row index out of range");
        coeffs[idx] += v;
    }
    add_row(std::move(coeffs), sense, rhs);
}

void LinearProgram::set_objective(Vector c, bool maximize) {
    if (c.size() != num_vars_) throw DomainError("objective width mismatch");
    objective_ = std::move(c);
    maximize_ = maximize;
}

LpSolution LinearProgram::solve() const {
    if (objective_.empty()) throw DomainError("objective not set");

    // normalize to: maximize c^T x s.t. A x <= b
    std::vector<Vector> a;
    Vector b;
    a.reserve(rows_.size() + 4);
    b.reserve(rows_.size() + 4);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (senses_[i] == RowSense::LessEq || senses_[i] == RowSense::Equal) {
            a.push_back(rows_[i]);
            b.push_back(rhs_[i]);
        }
        if (senses_[i] == RowSense::GreaterEq || senses_[i] == RowSense::Equal) {
            Vector neg(rows_[i].size());
            for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -rows_[i][j];
            a.push_back(std::move(neg));
            b.push_back(-rhs_[i]);
        }
    }
    Vector c = objective_;
    if (!maximize_) {
        for (double& v : c) v = -v;
    }

    Tableau tableau(a, b, c);
    LpSolution sol = tableau.run();
    if (sol.status == LpStatus::Optimal && !maximize_) sol.value = -sol.value;
    return sol;
}

} // namespace drocal

#include "crq/lp.hpp"

#include "crq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crq::lp {
namespace {

using Index = Eigen::Index;
using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-12;
constexpr std::size_t kDegenerateStreakForBland = 40;

// Internal column: an original variable, entered with sign +1 or -1.
struct Column {
    Index var;
    double sign;
};

class Simplex {
public:
    Simplex(const Problem& lp, std::vector<Column> columns)
        : lp_(lp),
          columns_(std::move(columns)),
          rows_(lp.constraints.rows()),
          structural_(static_cast<Index>(columns_.size())),
          width_(structural_ + rows_ + 1),
          table_(Tableau::Zero(rows_, width_)),
          reduced_(Eigen::RowVectorXd::Zero(width_)),
          basis_(static_cast<std::size_t>(rows_)),
          row_sign_(static_cast<std::size_t>(rows_), 1.0),
          row_active_(static_cast<std::size_t>(rows_), true) {
        for (Index i = 0; i < rows_; ++i) {
            const double s = lp.rhs(i) < 0.0 ? -1.0 : 1.0;
            row_sign_[static_cast<std::size_t>(i)] = s;
            for (Index c = 0; c < structural_; ++c) {
                const Column& col = columns_[static_cast<std::size_t>(c)];
                table_(i, c) = s * col.sign * lp.constraints(i, col.var);
            }
            table_(i, structural_ + i) = 1.0;
            table_(i, width_ - 1) = s * lp.rhs(i);
            basis_[static_cast<std::size_t>(i)] = structural_ + i;
        }
        cost_scale_ = std::max(1.0, lp.cost.cwiseAbs().maxCoeff());
        max_iterations_ = 50 * static_cast<std::size_t>(width_ + rows_) + 1000;
    }

    Solution run() {
        Solution out;
        if (lp_.start_basis.empty()) {
            if (!phase_one(out)) return out;
        } else {
            enter_start_basis();
        }

        // Phase II on the structural columns only.
        reduced_.setZero();
        for (Index c = 0; c < structural_; ++c) {
            const Column& col = columns_[static_cast<std::size_t>(c)];
            reduced_(c) = col.sign * lp_.cost(col.var);
        }
        for (Index i = 0; i < rows_; ++i) {
            if (!row_active_[static_cast<std::size_t>(i)]) continue;
            const Index b = basis_[static_cast<std::size_t>(i)];
            const double cb = reduced_(b);
            if (cb != 0.0) reduced_ -= cb * table_.row(i);
        }
        const Status s = iterate(structural_, cost_scale_);
        out.status = s;
        out.iterations = iterations_;
        if (s != Status::optimal) return out;

        out.x = extract();
        out.objective = lp_.cost.dot(out.x);
        return out;
    }

private:
    bool phase_one(Solution& out) {
        // Minimize the sum of artificials.
        reduced_.setZero();
        reduced_.segment(structural_, rows_).setOnes();
        for (Index i = 0; i < rows_; ++i) reduced_ -= table_.row(i);
        Status s = iterate(structural_ + rows_, 1.0);
        if (s == Status::iteration_limit) {
            out.status = s;
            out.iterations = iterations_;
            return false;
        }
        const double infeasibility = -reduced_(width_ - 1);
        const double rhs_scale = 1.0 + lp_.rhs.cwiseAbs().sum();
        if (infeasibility > 1e-9 * rhs_scale) {
            out.status = Status::infeasible;
            out.iterations = iterations_;
            return false;
        }
        drive_out_artificials();
        return true;
    }

    void enter_start_basis() {
        if (static_cast<Index>(lp_.start_basis.size()) != rows_)
            throw Error("lp: start basis needs one variable per row");
        std::vector<Index> column_of(static_cast<std::size_t>(lp_.cost.size()), -1);
        for (Index c = 0; c < structural_; ++c) {
            const Column& col = columns_[static_cast<std::size_t>(c)];
            if (col.sign > 0.0) column_of[static_cast<std::size_t>(col.var)] = c;
        }
        for (Index i = 0; i < rows_; ++i) {
            const Index var = lp_.start_basis[static_cast<std::size_t>(i)];
            if (var < 0 || var >= lp_.cost.size() || (!lp_.free.empty() && lp_.free[static_cast<std::size_t>(var)]))
                throw Error("lp: start basis variable out of range or free");
            const Index c = column_of[static_cast<std::size_t>(var)];
            if (std::abs(table_(i, c)) <= kPivotTol) throw Error("lp: start basis is singular");
            pivot(i, c);
        }
        const double tol = 1e-9 * (1.0 + lp_.rhs.cwiseAbs().maxCoeff());
        for (Index i = 0; i < rows_; ++i) {
            double& v = table_(i, width_ - 1);
            if (v < -tol) throw Error("lp: start basis is infeasible");
            if (v < 0.0) v = 0.0;
        }
    }

    Status iterate(Index allowed, double scale) {
        const double opt_tol = 1e-11 * scale;
        std::size_t degenerate_streak = 0;
        while (true) {
            if (iterations_ >= max_iterations_) return Status::iteration_limit;
            const bool bland = degenerate_streak >= kDegenerateStreakForBland;

            Index enter = -1;
            double best = -opt_tol;
            for (Index c = 0; c < allowed; ++c) {
                const double d = reduced_(c);
                if (d < best) {
                    enter = c;
                    if (bland) break;
                    best = d;
                }
            }
            if (enter < 0) return Status::optimal;

            Index leave = -1;
            double min_ratio = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < rows_; ++i) {
                if (!row_active_[static_cast<std::size_t>(i)]) continue;
                const double a = table_(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = table_(i, width_ - 1) / a;
                if (leave < 0 || ratio < min_ratio - kRatioTieTol * (1.0 + std::abs(min_ratio))) {
                    leave = i;
                    min_ratio = ratio;
                } else if (ratio <= min_ratio + kRatioTieTol * (1.0 + std::abs(min_ratio))) {
                    const bool take = bland ? basis_[static_cast<std::size_t>(i)] <
                                                  basis_[static_cast<std::size_t>(leave)]
                                            : a > table_(leave, enter);
                    if (take) {
                        leave = i;
                        min_ratio = std::min(min_ratio, ratio);
                    }
                }
            }
            if (leave < 0) return Status::unbounded;

            degenerate_streak = min_ratio <= 1e-12 ? degenerate_streak + 1 : 0;
            pivot(leave, enter);
            ++iterations_;
        }
    }

    void pivot(Index r, Index e) {
        table_.row(r) /= table_(r, e);
        table_(r, e) = 1.0;
        for (Index i = 0; i < rows_; ++i) {
            if (i == r) continue;
            const double f = table_(i, e);
            if (f == 0.0) continue;
            table_.row(i) -= f * table_.row(r);
            table_(i, e) = 0.0;
            double& rhs = table_(i, width_ - 1);
            if (rhs < 0.0 && rhs > -1e-11) rhs = 0.0;
        }
        const double d = reduced_(e);
        if (d != 0.0) {
            reduced_ -= d * table_.row(r);
            reduced_(e) = 0.0;
        }
        basis_[static_cast<std::size_t>(r)] = e;
    }

    void drive_out_artificials() {
        for (Index i = 0; i < rows_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < structural_) continue;
            Index best = -1;
            double best_abs = kPivotTol;
            for (Index c = 0; c < structural_; ++c) {
                const double a = std::abs(table_(i, c));
                if (a > best_abs) {
                    best = c;
                    best_abs = a;
                }
            }
            if (best >= 0) {
                pivot(i, best);
            } else {
                row_active_[static_cast<std::size_t>(i)] = false;
            }
        }
    }

    Eigen::VectorXd extract() const {
        std::vector<Index> active_rows;
        std::vector<Index> basic_cols;
        for (Index i = 0; i < rows_; ++i) {
            if (!row_active_[static_cast<std::size_t>(i)]) continue;
            active_rows.push_back(i);
            basic_cols.push_back(basis_[static_cast<std::size_t>(i)]);
        }
        const auto k = static_cast<Index>(active_rows.size());

        Eigen::VectorXd values(k);
        for (Index r = 0; r < k; ++r) values(r) = table_(active_rows[static_cast<std::size_t>(r)], width_ - 1);

        // Re-solve the basic system against the original data.
        Eigen::MatrixXd basis_matrix(k, k);
        Eigen::VectorXd rhs(k);
        for (Index r = 0; r < k; ++r) {
            const Index i = active_rows[static_cast<std::size_t>(r)];
            const double s = row_sign_[static_cast<std::size_t>(i)];
            rhs(r) = s * lp_.rhs(i);
            for (Index c = 0; c < k; ++c) {
                const Column& col = columns_[static_cast<std::size_t>(basic_cols[static_cast<std::size_t>(c)])];
                basis_matrix(r, c) = s * col.sign * lp_.constraints(i, col.var);
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
        Eigen::VectorXd refined = lu.solve(rhs);
        const double resid = (basis_matrix * refined - rhs).cwiseAbs().maxCoeff();
        const double drift = (refined - values).cwiseAbs().maxCoeff();
        const double scale = 1.0 + values.cwiseAbs().maxCoeff();
        if (refined.allFinite() && resid <= 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()) &&
            drift <= 1e-6 * scale) {
            values = refined;
        }

        Eigen::VectorXd x = Eigen::VectorXd::Zero(lp_.cost.size());
        for (Index r = 0; r < k; ++r) {
            double v = values(r);
            if (v < 0.0) v = 0.0;  // basic columns are nonnegative by construction
            const Column& col = columns_[static_cast<std::size_t>(basic_cols[static_cast<std::size_t>(r)])];
            x(col.var) += col.sign * v;
        }
        return x;
    }

    const Problem& lp_;
    std::vector<Column> columns_;
    Index rows_;
    Index structural_;
    Index width_;
    Tableau table_;
    Eigen::RowVectorXd reduced_;
    std::vector<Index> basis_;
    std::vector<double> row_sign_;
    std::vector<bool> row_active_;
    double cost_scale_ = 1.0;
    std::size_t iterations_ = 0;
    std::size_t max_iterations_ = 0;
};

}  // namespace

Solution solve(const Problem& problem) {
    const Index m = problem.constraints.rows();
    const Index k = problem.constraints.cols();
    if (problem.rhs.size() != m || problem.cost.size() != k)
        throw Error("lp: dimension mismatch between constraints, rhs and cost");
    if (!problem.free.empty() && static_cast<Index>(problem.free.size()) != k)
        throw Error("lp: free-variable mask has wrong length");
    if (!problem.constraints.allFinite() || !problem.rhs.allFinite() || !problem.cost.allFinite())
        throw Error("lp: non-finite input");

    std::vector<Column> columns;
    columns.reserve(static_cast<std::size_t>(2 * k));
    for (Index j = 0; j < k; ++j) {
        columns.push_back({j, 1.0});
        if (!problem.free.empty() && problem.free[static_cast<std::size_t>(j)]) columns.push_back({j, -1.0});
    }
    if (m == 0) {
        Solution out;
        out.x = Eigen::VectorXd::Zero(k);
        const bool bounded = std::all_of(columns.begin(), columns.end(), [&](const Column& c) {
            return c.sign * problem.cost(c.var) >= 0.0;
        });
        out.status = bounded ? Status::optimal : Status::unbounded;
        return out;
    }
    Simplex simplex(problem, std::move(columns));
    return simplex.run();
}

}  // namespace crq::lp

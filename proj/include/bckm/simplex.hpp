#ifndef BCKM_SIMPLEX_HPP
#define BCKM_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lp.hpp"

/**
 * @file simplex.hpp
 *
 * @brief Bounded-variable primal revised simplex.
 *
 * Every row i is written as a_i . x - s_i = 0 with a logical column s_i
 * carrying the row bounds, so the working matrix is [A  -I] and all columns
 * are boxed (possibly with infinite sides). The basis is held as a sparse LU
 * factorization plus a product-form eta file that is rebuilt every
 * `refactor_interval` pivots.
 *
 * Phase 1 adds one artificial column per violated row and minimizes their
 * sum. Pricing is Dantzig's rule; after `stall_limit` consecutive degenerate
 * pivots both pricing and the ratio test switch to Bland's smallest-index
 * rule until the objective moves again. Optimal solutions are basic.
 *
 * A presolve pass removes penalty-style singleton columns: a column with
 * bounds [0, inf), non-negative cost and a single entry in an inequality row
 * that it relaxes is either provably zero or equal to the row's left-hand
 * side over the box of the other columns. Those columns and rows are
 * reinstated exactly on the way out.
 */

namespace bckm {

struct SimplexOptions {
    /// Pivot cap; 0 picks 20 * (rows + columns) + 10000.
    long max_iterations = 0;
    double primal_tolerance = 1e-9;
    /// Scaled by max(1, largest |cost|).
    double dual_tolerance = 1e-9;
    double pivot_tolerance = 1e-9;
    int refactor_interval = 100;
    int stall_limit = 50;
    bool presolve = true;
};

namespace internal {
class SimplexEngine;
}

/// Basis record that lets a later solve of an LP with the same rows start
/// from a previous optimum. Only the objective may differ between solves.
class SimplexBasis {
public:
    bool empty() const { return head_.empty(); }
    void clear() {
        head_.clear();
        status_.clear();
        kept_rows_.clear();
        kept_cols_.clear();
    }

private:
    friend class internal::SimplexEngine;

    std::vector<int> head_;
    std::vector<std::int8_t> status_;
    std::vector<int> kept_rows_;
    std::vector<int> kept_cols_;
};

namespace internal {

enum class ColStatus : std::int8_t { basic, at_lower, at_upper, free_zero };

/// Result of the singleton-column presolve.
struct PresolvedLp {
    LinearProgram reduced;
    std::vector<int> kept_cols;
    std::vector<int> kept_rows;
    std::vector<int> col_map;

    struct Substitution {
        int col;
        int row;
        double scale;
    };
    std::vector<Substitution> substituted;
    std::vector<int> zeroed;
};

/// Range of sum(coef * x) over the column box, excluding one column.
inline std::pair<double, double> activity_range(const LinearRow& row, int skip, const LinearProgram& lp) {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& t : row.terms) {
        if (t.var == skip) {
            continue;
        }
        auto j = static_cast<std::size_t>(t.var);
        double a = t.coef * lp.lower[j];
        double b = t.coef * lp.upper[j];
        if (t.coef < 0) {
            std::swap(a, b);
        }
        lo += a;
        hi += b;
    }
    return {lo, hi};
}

inline PresolvedLp presolve(const LinearProgram& lp, bool enabled) {
    const auto n = static_cast<std::size_t>(lp.num_variables());
    const auto m = lp.rows.size();
    std::vector<int> occurrences(n, 0);
    for (const auto& row : lp.rows) {
        for (const auto& t : row.terms) {
            ++occurrences[static_cast<std::size_t>(t.var)];
        }
    }

    PresolvedLp out;
    std::vector<char> drop_row(m, 0);
    std::vector<char> drop_col(n, 0);
    if (enabled) {
        for (std::size_t r = 0; r < m; ++r) {
            const auto& row = lp.rows[r];
            if (row.sense == RowSense::equal) {
                continue;
            }
            // orient as sum <= rhs
            const double sign = row.sense == RowSense::less_equal ? 1.0 : -1.0;
            for (const auto& t : row.terms) {
                auto j = static_cast<std::size_t>(t.var);
                if (occurrences[j] != 1 || drop_col[j] || lp.lower[j] != 0.0 || lp.upper[j] != infinity ||
                    lp.objective[j] < 0.0 || sign * t.coef >= 0.0) {
                    continue;
                }
                bool others_ok = true;
                for (const auto& o : row.terms) {
                    if (o.var != t.var && drop_col[static_cast<std::size_t>(o.var)]) {
                        others_ok = false;
                    }
                }
                if (!others_ok) {
                    continue;
                }
                // x_j >= (sign * rest - sign * rhs) / |coef|
                auto [rest_lo, rest_hi] = activity_range(row, t.var, lp);
                double g_lo = sign > 0 ? rest_lo - row.rhs : row.rhs - rest_hi;
                double g_hi = sign > 0 ? rest_hi - row.rhs : row.rhs - rest_lo;
                if (!std::isfinite(g_lo) && !std::isfinite(g_hi)) {
                    continue;
                }
                if (g_hi <= 0.0) {
                    drop_col[j] = 1;
                    drop_row[r] = 1;
                    out.zeroed.push_back(t.var);
                    break;
                }
                if (g_lo >= 0.0 && std::isfinite(g_hi)) {
                    drop_col[j] = 1;
                    drop_row[r] = 1;
                    out.substituted.push_back({t.var, static_cast<int>(r), std::abs(t.coef)});
                    break;
                }
            }
        }
    }

    out.col_map.assign(n, -1);
    for (std::size_t j = 0; j < n; ++j) {
        if (!drop_col[j]) {
            out.col_map[j] = static_cast<int>(out.kept_cols.size());
            out.kept_cols.push_back(static_cast<int>(j));
            out.reduced.add_variable(lp.objective[j], lp.lower[j], lp.upper[j], lp.names[j]);
        }
    }
    out.reduced.objective_offset = lp.objective_offset;
    for (const auto& sub : out.substituted) {
        // x_col = sign * (rest - rhs) / scale, costs move onto the rest
        const auto& row = lp.rows[static_cast<std::size_t>(sub.row)];
        const double sign = row.sense == RowSense::less_equal ? 1.0 : -1.0;
        const double c = lp.objective[static_cast<std::size_t>(sub.col)];
        for (const auto& t : row.terms) {
            if (t.var == sub.col) {
                continue;
            }
            out.reduced.objective[static_cast<std::size_t>(out.col_map[static_cast<std::size_t>(t.var)])] +=
                c * sign * t.coef / sub.scale;
        }
        out.reduced.objective_offset -= c * sign * row.rhs / sub.scale;
    }
    for (std::size_t r = 0; r < m; ++r) {
        if (drop_row[r]) {
            continue;
        }
        LinearRow row{{}, lp.rows[r].sense, lp.rows[r].rhs};
        row.terms.reserve(lp.rows[r].terms.size());
        for (const auto& t : lp.rows[r].terms) {
            row.terms.push_back({out.col_map[static_cast<std::size_t>(t.var)], t.coef});
        }
        out.kept_rows.push_back(static_cast<int>(r));
        out.reduced.add_row(std::move(row));
    }
    return out;
}

inline std::vector<double> postsolve(const LinearProgram& lp, const PresolvedLp& pre,
                                     const std::vector<double>& reduced_values) {
    std::vector<double> x(static_cast<std::size_t>(lp.num_variables()), 0.0);
    for (std::size_t c = 0; c < pre.kept_cols.size(); ++c) {
        x[static_cast<std::size_t>(pre.kept_cols[c])] = reduced_values[c];
    }
    for (const auto& sub : pre.substituted) {
        const auto& row = lp.rows[static_cast<std::size_t>(sub.row)];
        const double sign = row.sense == RowSense::less_equal ? 1.0 : -1.0;
        double rest = 0.0;
        for (const auto& t : row.terms) {
            if (t.var != sub.col) {
                rest += t.coef * x[static_cast<std::size_t>(t.var)];
            }
        }
        x[static_cast<std::size_t>(sub.col)] = std::max(0.0, sign * (rest - row.rhs) / sub.scale);
    }
    return x;
}

/// Sparse column of the basis: (row, value) pairs.
using SparseColumn = std::vector<std::pair<int, double>>;

/// LU of the basis matrix plus product-form updates.
/// Row and column singletons are pivoted first (no fill); the remaining
/// bump gets a dense partial-pivoting LU.
class BasisFactor {
public:
    bool factorize(int m, const std::vector<SparseColumn>& cols) {
        etas_.clear();
        pivots_.clear();
        m_ = m;
        std::vector<SparseColumn> rows(static_cast<std::size_t>(m));
        std::vector<int> col_count(static_cast<std::size_t>(m), 0);
        std::vector<int> row_count(static_cast<std::size_t>(m), 0);
        for (int c = 0; c < m; ++c) {
            for (const auto& [r, a] : cols[static_cast<std::size_t>(c)]) {
                rows[static_cast<std::size_t>(r)].emplace_back(c, a);
                ++col_count[static_cast<std::size_t>(c)];
                ++row_count[static_cast<std::size_t>(r)];
            }
        }
        std::vector<char> row_active(static_cast<std::size_t>(m), 1);
        std::vector<char> col_active(static_cast<std::size_t>(m), 1);
        std::vector<int> col_queue;
        std::vector<int> row_queue;
        for (int i = 0; i < m; ++i) {
            if (col_count[static_cast<std::size_t>(i)] == 0 || row_count[static_cast<std::size_t>(i)] == 0) {
                return false;
            }
            if (col_count[static_cast<std::size_t>(i)] == 1) {
                col_queue.push_back(i);
            }
            if (row_count[static_cast<std::size_t>(i)] == 1) {
                row_queue.push_back(i);
            }
        }

        auto drop_row = [&](int r) {
            row_active[static_cast<std::size_t>(r)] = 0;
            for (const auto& [c, a] : rows[static_cast<std::size_t>(r)]) {
                if (col_active[static_cast<std::size_t>(c)] &&
                    --col_count[static_cast<std::size_t>(c)] == 1) {
                    col_queue.push_back(c);
                }
            }
        };
        auto drop_col = [&](int c) {
            col_active[static_cast<std::size_t>(c)] = 0;
            for (const auto& [r, a] : cols[static_cast<std::size_t>(c)]) {
                if (row_active[static_cast<std::size_t>(r)] &&
                    --row_count[static_cast<std::size_t>(r)] == 1) {
                    row_queue.push_back(r);
                }
            }
        };

        while (!col_queue.empty() || !row_queue.empty()) {
            if (!col_queue.empty()) {
                int c = col_queue.back();
                col_queue.pop_back();
                if (!col_active[static_cast<std::size_t>(c)]) {
                    continue;
                }
                if (col_count[static_cast<std::size_t>(c)] == 0) {
                    return false;
                }
                Pivot pv;
                pv.col = c;
                pv.row = -1;
                for (const auto& [r, a] : cols[static_cast<std::size_t>(c)]) {
                    if (row_active[static_cast<std::size_t>(r)]) {
                        pv.row = r;
                        pv.value = a;
                    }
                }
                if (std::abs(pv.value) < singular_tolerance) {
                    return false;
                }
                for (const auto& [j, a] : rows[static_cast<std::size_t>(pv.row)]) {
                    if (j != c && col_active[static_cast<std::size_t>(j)]) {
                        pv.u.emplace_back(j, a);
                    }
                }
                col_active[static_cast<std::size_t>(c)] = 0;
                drop_row(pv.row);
                pivots_.push_back(std::move(pv));
            } else {
                int r = row_queue.back();
                row_queue.pop_back();
                if (!row_active[static_cast<std::size_t>(r)]) {
                    continue;
                }
                if (row_count[static_cast<std::size_t>(r)] == 0) {
                    return false;
                }
                Pivot pv;
                pv.row = r;
                pv.col = -1;
                for (const auto& [c, a] : rows[static_cast<std::size_t>(r)]) {
                    if (col_active[static_cast<std::size_t>(c)]) {
                        pv.col = c;
                        pv.value = a;
                    }
                }
                if (std::abs(pv.value) < singular_tolerance) {
                    return false;
                }
                for (const auto& [i, a] : cols[static_cast<std::size_t>(pv.col)]) {
                    if (i != r && row_active[static_cast<std::size_t>(i)]) {
                        pv.l.emplace_back(i, a / pv.value);
                    }
                }
                row_active[static_cast<std::size_t>(r)] = 0;
                drop_col(pv.col);
                pivots_.push_back(std::move(pv));
            }
        }

        bump_rows_.clear();
        bump_cols_.clear();
        for (int i = 0; i < m; ++i) {
            if (row_active[static_cast<std::size_t>(i)]) {
                bump_rows_.push_back(i);
            }
            if (col_active[static_cast<std::size_t>(i)]) {
                bump_cols_.push_back(i);
            }
        }
        if (bump_rows_.size() != bump_cols_.size()) {
            return false;
        }
        const auto b = static_cast<Eigen::Index>(bump_rows_.size());
        if (b > 0) {
            std::vector<int> local(static_cast<std::size_t>(m), -1);
            for (Eigen::Index t = 0; t < b; ++t) {
                local[static_cast<std::size_t>(bump_rows_[static_cast<std::size_t>(t)])] = static_cast<int>(t);
            }
            Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(b, b);
            for (Eigen::Index s = 0; s < b; ++s) {
                for (const auto& [r, a] : cols[static_cast<std::size_t>(bump_cols_[static_cast<std::size_t>(s)])]) {
                    int t = local[static_cast<std::size_t>(r)];
                    if (t >= 0) {
                        kernel(t, s) = a;
                    }
                }
            }
            double scale = std::max(1.0, kernel.cwiseAbs().maxCoeff());
            bump_lu_.compute(kernel);
            if (bump_lu_.matrixLU().diagonal().cwiseAbs().minCoeff() < singular_tolerance * scale) {
                return false;
            }
        }
        return true;
    }

    /// Solves B x = v in place (v indexed by row on entry, by basis position on exit).
    void ftran(Eigen::VectorXd& v) const {
        for (const auto& pv : pivots_) {
            double y = v[pv.row];
            if (y != 0.0) {
                for (const auto& [i, l] : pv.l) {
                    v[i] -= l * y;
                }
            }
        }
        Eigen::VectorXd x(m_);
        if (!bump_rows_.empty()) {
            const auto b = static_cast<Eigen::Index>(bump_rows_.size());
            Eigen::VectorXd rhs(b);
            for (Eigen::Index t = 0; t < b; ++t) {
                rhs[t] = v[bump_rows_[static_cast<std::size_t>(t)]];
            }
            Eigen::VectorXd sol = bump_lu_.solve(rhs);
            for (Eigen::Index s = 0; s < b; ++s) {
                x[bump_cols_[static_cast<std::size_t>(s)]] = sol[s];
            }
        }
        for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
            double acc = v[it->row];
            for (const auto& [j, u] : it->u) {
                acc -= u * x[j];
            }
            x[it->col] = acc / it->value;
        }
        for (const auto& eta : etas_) {
            double xp = x[eta.pos] / eta.pivot;
            x[eta.pos] = xp;
            if (xp != 0.0) {
                for (const auto& [i, a] : eta.entries) {
                    x[i] -= a * xp;
                }
            }
        }
        v.swap(x);
    }

    /// Solves B^T y = v in place (v indexed by basis position on entry, by row on exit).
    void btran(Eigen::VectorXd& v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = v[it->pos];
            for (const auto& [i, a] : it->entries) {
                acc -= a * v[i];
            }
            v[it->pos] = acc / it->pivot;
        }
        Eigen::VectorXd y(m_);
        for (const auto& pv : pivots_) {
            double z = v[pv.col] / pv.value;
            y[pv.row] = z;
            if (z != 0.0) {
                for (const auto& [j, u] : pv.u) {
                    v[j] -= u * z;
                }
            }
        }
        if (!bump_rows_.empty()) {
            const auto b = static_cast<Eigen::Index>(bump_rows_.size());
            Eigen::VectorXd rhs(b);
            for (Eigen::Index s = 0; s < b; ++s) {
                rhs[s] = v[bump_cols_[static_cast<std::size_t>(s)]];
            }
            Eigen::VectorXd sol = bump_lu_.transpose().solve(rhs);
            for (Eigen::Index t = 0; t < b; ++t) {
                y[bump_rows_[static_cast<std::size_t>(t)]] = sol[t];
            }
        }
        for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
            double acc = y[it->row];
            for (const auto& [i, l] : it->l) {
                acc -= l * y[i];
            }
            y[it->row] = acc;
        }
        v.swap(y);
    }

    void update(int pos, const Eigen::VectorXd& alpha) {
        Eta eta;
        eta.pos = pos;
        eta.pivot = alpha[pos];
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            if (i != pos && alpha[i] != 0.0) {
                eta.entries.emplace_back(static_cast<int>(i), alpha[i]);
            }
        }
        etas_.push_back(std::move(eta));
    }

    std::size_t num_updates() const { return etas_.size(); }
    std::size_t bump_size() const { return bump_rows_.size(); }

private:
    static constexpr double singular_tolerance = 1e-11;

    struct Pivot {
        int row = 0;
        int col = 0;
        double value = 0.0;
        SparseColumn l;  // (row, multiplier) below the pivot
        SparseColumn u;  // (column, entry) right of the pivot
    };
    struct Eta {
        int pos = 0;
        double pivot = 1.0;
        std::vector<std::pair<int, double>> entries;
    };

    int m_ = 0;
    std::vector<Pivot> pivots_;
    std::vector<int> bump_rows_;
    std::vector<int> bump_cols_;
    Eigen::PartialPivLU<Eigen::MatrixXd> bump_lu_;
    std::vector<Eta> etas_;
};

/// Simplex over [A -I] (+ artificial unit columns during phase 1).
class SimplexEngine {
public:
    SimplexEngine(const LinearProgram& lp, const SimplexOptions& opts) : opts_(opts) {
        n_ = lp.num_variables();
        m_ = lp.num_rows();
        // column-compressed A
        std::vector<int> counts(static_cast<std::size_t>(n_) + 1, 0);
        for (const auto& row : lp.rows) {
            for (const auto& t : row.terms) {
                ++counts[static_cast<std::size_t>(t.var) + 1];
            }
        }
        for (int j = 0; j < n_; ++j) {
            counts[static_cast<std::size_t>(j) + 1] += counts[static_cast<std::size_t>(j)];
        }
        col_start_ = counts;
        row_index_.resize(static_cast<std::size_t>(col_start_.back()));
        value_.resize(row_index_.size());
        std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
        for (int r = 0; r < m_; ++r) {
            for (const auto& t : lp.rows[static_cast<std::size_t>(r)].terms) {
                auto& pos = fill[static_cast<std::size_t>(t.var)];
                row_index_[static_cast<std::size_t>(pos)] = r;
                value_[static_cast<std::size_t>(pos)] = t.coef;
                ++pos;
            }
        }

        lo_ = lp.lower;
        hi_ = lp.upper;
        cost_ = lp.objective;
        for (const auto& row : lp.rows) {
            switch (row.sense) {
            case RowSense::equal:
                lo_.push_back(row.rhs);
                hi_.push_back(row.rhs);
                break;
            case RowSense::less_equal:
                lo_.push_back(-infinity);
                hi_.push_back(row.rhs);
                break;
            case RowSense::greater_equal:
                lo_.push_back(row.rhs);
                hi_.push_back(infinity);
                break;
            }
            cost_.push_back(0.0);
        }
        double cmax = 1.0;
        for (double c : lp.objective) {
            cmax = std::max(cmax, std::abs(c));
        }
        dual_tol_ = opts_.dual_tolerance * cmax;
        for (const auto& row : lp.rows) {
            rhs_scale_ = std::max(rhs_scale_, std::abs(row.rhs));
        }
        max_iter_ = opts_.max_iterations > 0 ? opts_.max_iterations : 20L * (n_ + m_) + 10000;
    }

    int num_columns() const { return static_cast<int>(lo_.size()); }

    LpStatus run(SimplexBasis* warm, const std::vector<int>& kept_rows, const std::vector<int>& kept_cols);

    std::vector<double> structural_values() const {
        return std::vector<double>(x_.begin(), x_.begin() + n_);
    }

    long iterations() const { return iterations_; }
    bool warm_started() const { return warm_started_; }

private:
    bool is_artificial(int j) const { return j >= n_ + m_; }

    double column_dot(int j, const Eigen::VectorXd& y) const {
        if (j < n_) {
            double s = 0.0;
            for (int p = col_start_[static_cast<std::size_t>(j)]; p < col_start_[static_cast<std::size_t>(j) + 1];
                 ++p) {
                s += value_[static_cast<std::size_t>(p)] * y[row_index_[static_cast<std::size_t>(p)]];
            }
            return s;
        }
        if (j < n_ + m_) {
            return -y[j - n_];
        }
        auto a = static_cast<std::size_t>(j - n_ - m_);
        return art_sign_[a] * y[art_row_[a]];
    }

    void load_column(int j, Eigen::VectorXd& v) const {
        v.setZero(m_);
        if (j < n_) {
            for (int p = col_start_[static_cast<std::size_t>(j)]; p < col_start_[static_cast<std::size_t>(j) + 1];
                 ++p) {
                v[row_index_[static_cast<std::size_t>(p)]] = value_[static_cast<std::size_t>(p)];
            }
        } else if (j < n_ + m_) {
            v[j - n_] = -1.0;
        } else {
            auto a = static_cast<std::size_t>(j - n_ - m_);
            v[art_row_[a]] = art_sign_[a];
        }
    }

    void add_column_to(int j, double scale, Eigen::VectorXd& v) const {
        if (scale == 0.0) {
            return;
        }
        if (j < n_) {
            for (int p = col_start_[static_cast<std::size_t>(j)]; p < col_start_[static_cast<std::size_t>(j) + 1];
                 ++p) {
                v[row_index_[static_cast<std::size_t>(p)]] += scale * value_[static_cast<std::size_t>(p)];
            }
        } else if (j < n_ + m_) {
            v[j - n_] -= scale;
        } else {
            auto a = static_cast<std::size_t>(j - n_ - m_);
            v[art_row_[a]] += scale * art_sign_[a];
        }
    }

    bool refactor() {
        std::vector<SparseColumn> cols(static_cast<std::size_t>(m_));
        for (int pos = 0; pos < m_; ++pos) {
            auto& col = cols[static_cast<std::size_t>(pos)];
            int j = head_[static_cast<std::size_t>(pos)];
            if (j < n_) {
                for (int p = col_start_[static_cast<std::size_t>(j)];
                     p < col_start_[static_cast<std::size_t>(j) + 1]; ++p) {
                    col.emplace_back(row_index_[static_cast<std::size_t>(p)], value_[static_cast<std::size_t>(p)]);
                }
            } else if (j < n_ + m_) {
                col.emplace_back(j - n_, -1.0);
            } else {
                auto a = static_cast<std::size_t>(j - n_ - m_);
                col.emplace_back(art_row_[a], art_sign_[a]);
            }
        }
        if (!factor_.factorize(m_, cols)) {
            return false;
        }
        recompute_basic_values();
        return true;
    }

    void recompute_basic_values() {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
        const int total = num_columns();
        for (int j = 0; j < total; ++j) {
            if (status_[static_cast<std::size_t>(j)] != ColStatus::basic) {
                add_column_to(j, -x_[static_cast<std::size_t>(j)], rhs);
            }
        }
        factor_.ftran(rhs);
        for (int pos = 0; pos < m_; ++pos) {
            x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)])] = rhs[pos];
        }
    }

    double nonbasic_value(int j, ColStatus st) const {
        switch (st) {
        case ColStatus::at_lower:
            return lo_[static_cast<std::size_t>(j)];
        case ColStatus::at_upper:
            return hi_[static_cast<std::size_t>(j)];
        default:
            return 0.0;
        }
    }

    ColStatus default_status(int j) const {
        if (std::isfinite(lo_[static_cast<std::size_t>(j)])) {
            return ColStatus::at_lower;
        }
        if (std::isfinite(hi_[static_cast<std::size_t>(j)])) {
            return ColStatus::at_upper;
        }
        return ColStatus::free_zero;
    }

    double max_primal_infeasibility() const {
        double worst = 0.0;
        for (int pos = 0; pos < m_; ++pos) {
            auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)]);
            worst = std::max({worst, lo_[j] - x_[j], x_[j] - hi_[j]});
        }
        return worst;
    }

    bool try_warm_start(const SimplexBasis& warm, const std::vector<int>& kept_rows,
                        const std::vector<int>& kept_cols);
    void cold_start();
    bool finish_phase_one();
    LpStatus iterate(bool phase_one);
    void save_basis(SimplexBasis& warm, const std::vector<int>& kept_rows, const std::vector<int>& kept_cols) const;

    SimplexOptions opts_;
    int n_ = 0;
    int m_ = 0;
    std::vector<int> col_start_;
    std::vector<int> row_index_;
    std::vector<double> value_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<double> cost_;
    std::vector<int> art_row_;
    std::vector<double> art_sign_;

    std::vector<double> x_;
    std::vector<ColStatus> status_;
    std::vector<int> head_;
    BasisFactor factor_;

    double dual_tol_ = 1e-9;
    double rhs_scale_ = 1.0;
    long max_iter_ = 0;
    long iterations_ = 0;
    bool warm_started_ = false;
};

inline void SimplexEngine::cold_start() {
    art_row_.clear();
    art_sign_.clear();
    const int base = n_ + m_;
    lo_.resize(static_cast<std::size_t>(base));
    hi_.resize(static_cast<std::size_t>(base));
    cost_.resize(static_cast<std::size_t>(base));
    x_.assign(static_cast<std::size_t>(base), 0.0);
    status_.assign(static_cast<std::size_t>(base), ColStatus::at_lower);
    head_.assign(static_cast<std::size_t>(m_), -1);

    Eigen::VectorXd activity = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < n_; ++j) {
        auto st = default_status(j);
        status_[static_cast<std::size_t>(j)] = st;
        x_[static_cast<std::size_t>(j)] = nonbasic_value(j, st);
        add_column_to(j, x_[static_cast<std::size_t>(j)], activity);
    }
    for (int i = 0; i < m_; ++i) {
        const auto s = static_cast<std::size_t>(n_ + i);
        const double r = activity[i];
        if (r >= lo_[s] - opts_.primal_tolerance && r <= hi_[s] + opts_.primal_tolerance) {
            status_[s] = ColStatus::basic;
            head_[static_cast<std::size_t>(i)] = n_ + i;
            x_[s] = r;
            continue;
        }
        const bool below = r < lo_[s];
        status_[s] = below ? ColStatus::at_lower : ColStatus::at_upper;
        x_[s] = below ? lo_[s] : hi_[s];
        // a_i x - s_i + sign * art = 0  =>  art = (s_i - a_i x) / sign
        art_row_.push_back(i);
        art_sign_.push_back(x_[s] - r > 0 ? 1.0 : -1.0);
        lo_.push_back(0.0);
        hi_.push_back(infinity);
        cost_.push_back(0.0);
        x_.push_back(std::abs(x_[s] - r));
        status_.push_back(ColStatus::basic);
        head_[static_cast<std::size_t>(i)] = num_columns() - 1;
    }
    refactor();
}

inline bool SimplexEngine::try_warm_start(const SimplexBasis& warm, const std::vector<int>& kept_rows,
                                          const std::vector<int>& kept_cols) {
    if (warm.head_.size() != static_cast<std::size_t>(m_) ||
        warm.status_.size() != static_cast<std::size_t>(n_ + m_) || warm.kept_rows_ != kept_rows ||
        warm.kept_cols_ != kept_cols) {
        return false;
    }
    art_row_.clear();
    art_sign_.clear();
    head_ = warm.head_;
    status_.resize(static_cast<std::size_t>(n_ + m_));
    x_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
        auto st = static_cast<ColStatus>(warm.status_[static_cast<std::size_t>(j)]);
        if (st == ColStatus::at_lower && !std::isfinite(lo_[static_cast<std::size_t>(j)])) {
            st = default_status(j);
        } else if (st == ColStatus::at_upper && !std::isfinite(hi_[static_cast<std::size_t>(j)])) {
            st = default_status(j);
        }
        status_[static_cast<std::size_t>(j)] = st;
        if (st != ColStatus::basic) {
            x_[static_cast<std::size_t>(j)] = nonbasic_value(j, st);
        }
    }
    if (!refactor()) {
        return false;
    }
    return max_primal_infeasibility() <= 1e3 * opts_.primal_tolerance;
}

/// Swaps every basic artificial (now at zero) for its row's logical column
/// and drops the artificial columns. Returns false when phase 1 left a
/// positive infeasibility.
inline bool SimplexEngine::finish_phase_one() {
    double infeasibility = 0.0;
    for (int j = n_ + m_; j < num_columns(); ++j) {
        infeasibility += x_[static_cast<std::size_t>(j)];
    }
    if (infeasibility > 1e-7 * rhs_scale_) {
        return false;
    }
    for (int pos = 0; pos < m_; ++pos) {
        int j = head_[static_cast<std::size_t>(pos)];
        if (!is_artificial(j)) {
            continue;
        }
        int logical = n_ + art_row_[static_cast<std::size_t>(j - n_ - m_)];
        // the logical is parallel to the artificial, so it cannot be basic too
        head_[static_cast<std::size_t>(pos)] = logical;
        status_[static_cast<std::size_t>(logical)] = ColStatus::basic;
    }
    art_row_.clear();
    art_sign_.clear();
    const auto base = static_cast<std::size_t>(n_ + m_);
    lo_.resize(base);
    hi_.resize(base);
    cost_.resize(base);
    x_.resize(base);
    status_.resize(base);
    refactor();
    return true;
}

inline LpStatus SimplexEngine::iterate(bool phase_one) {
    const int total = num_columns();
    std::vector<double> cost(static_cast<std::size_t>(total), 0.0);
    if (phase_one) {
        for (int j = n_ + m_; j < total; ++j) {
            cost[static_cast<std::size_t>(j)] = 1.0;
        }
    } else {
        std::copy(cost_.begin(), cost_.begin() + n_, cost.begin());
    }
    const double dtol = phase_one ? opts_.dual_tolerance : dual_tol_;
    const double ptol = opts_.primal_tolerance;

    Eigen::VectorXd y(m_);
    Eigen::VectorXd alpha(m_);
    int degenerate_run = 0;
    bool bland = false;

    while (true) {
        if (iterations_ >= max_iter_) {
            return LpStatus::iteration_limit;
        }
        if (factor_.num_updates() >= static_cast<std::size_t>(opts_.refactor_interval)) {
            refactor();
        }

        for (int pos = 0; pos < m_; ++pos) {
            y[pos] = cost[static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)])];
        }
        factor_.btran(y);

        // pricing
        int entering = -1;
        double entering_d = 0.0;
        double best = 0.0;
        for (int j = 0; j < total; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            const auto st = status_[sj];
            if (st == ColStatus::basic || lo_[sj] == hi_[sj]) {
                continue;
            }
            const double d = cost[sj] - column_dot(j, y);
            bool eligible = (st == ColStatus::at_lower && d < -dtol) || (st == ColStatus::at_upper && d > dtol) ||
                            (st == ColStatus::free_zero && std::abs(d) > dtol);
            if (!eligible) {
                continue;
            }
            if (bland) {
                entering = j;
                entering_d = d;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                entering = j;
                entering_d = d;
            }
        }
        if (entering < 0) {
            return LpStatus::optimal;
        }

        load_column(entering, alpha);
        factor_.ftran(alpha);
        const double dir = entering_d < 0 ? 1.0 : -1.0;

        // Harris two-pass ratio test; x_B(pos) moves by rate * theta
        double theta_max = infinity;
        for (int pos = 0; pos < m_; ++pos) {
            const double a = alpha[pos];
            if (std::abs(a) <= opts_.pivot_tolerance) {
                continue;
            }
            const auto jb = static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)]);
            const double rate = -dir * a;
            double t = infinity;
            if (rate < 0 && std::isfinite(lo_[jb])) {
                t = (x_[jb] - lo_[jb] + ptol) / -rate;
            } else if (rate > 0 && std::isfinite(hi_[jb])) {
                t = (hi_[jb] - x_[jb] + ptol) / rate;
            }
            theta_max = std::min(theta_max, t);
        }
        int leave_pos = -1;
        double theta = infinity;
        double best_pivot = 0.0;
        int best_index = 0;
        for (int pos = 0; pos < m_; ++pos) {
            const double a = alpha[pos];
            if (std::abs(a) <= opts_.pivot_tolerance) {
                continue;
            }
            const auto jb = static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)]);
            const double rate = -dir * a;
            double t = infinity;
            if (rate < 0 && std::isfinite(lo_[jb])) {
                t = (x_[jb] - lo_[jb]) / -rate;
            } else if (rate > 0 && std::isfinite(hi_[jb])) {
                t = (hi_[jb] - x_[jb]) / rate;
            }
            if (!std::isfinite(t) || t > theta_max) {
                continue;
            }
            t = std::max(t, 0.0);
            bool take = false;
            if (leave_pos < 0) {
                take = true;
            } else if (bland) {
                take = t < theta || (t == theta && static_cast<int>(jb) < best_index);
            } else {
                take = std::abs(a) > best_pivot;
            }
            if (take) {
                leave_pos = pos;
                theta = t;
                best_pivot = std::abs(a);
                best_index = static_cast<int>(jb);
            }
        }

        const auto sq = static_cast<std::size_t>(entering);
        const double flip = hi_[sq] - lo_[sq];
        const bool can_flip = std::isfinite(flip);
        if (leave_pos < 0 && !can_flip) {
            return phase_one ? LpStatus::infeasible : LpStatus::unbounded;
        }
        ++iterations_;

        const bool do_flip = can_flip && (leave_pos < 0 || flip <= theta);
        const double step = do_flip ? flip : theta;
        if (step * std::abs(entering_d) <= 1e-12) {
            if (++degenerate_run > opts_.stall_limit) {
                bland = true;
            }
        } else {
            degenerate_run = 0;
            bland = false;
        }

        for (int pos = 0; pos < m_; ++pos) {
            if (alpha[pos] != 0.0) {
                x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)])] += -dir * alpha[pos] * step;
            }
        }
        x_[sq] += dir * step;

        if (do_flip) {
            status_[sq] = status_[sq] == ColStatus::at_upper ? ColStatus::at_lower : ColStatus::at_upper;
            x_[sq] = nonbasic_value(entering, status_[sq]);
            continue;
        }

        const auto leaving = static_cast<std::size_t>(head_[static_cast<std::size_t>(leave_pos)]);
        const double rate = -dir * alpha[leave_pos];
        if (lo_[leaving] == hi_[leaving]) {
            status_[leaving] = ColStatus::at_lower;
        } else {
            status_[leaving] = rate < 0 ? ColStatus::at_lower : ColStatus::at_upper;
        }
        if (is_artificial(static_cast<int>(leaving))) {
            hi_[leaving] = 0.0;
            status_[leaving] = ColStatus::at_lower;
        }
        x_[leaving] = nonbasic_value(static_cast<int>(leaving), status_[leaving]);
        status_[sq] = ColStatus::basic;
        head_[static_cast<std::size_t>(leave_pos)] = entering;
        factor_.update(leave_pos, alpha);
    }
}

inline void SimplexEngine::save_basis(SimplexBasis& warm, const std::vector<int>& kept_rows,
                                      const std::vector<int>& kept_cols) const {
    warm.head_ = head_;
    warm.status_.resize(static_cast<std::size_t>(n_ + m_));
    for (int j = 0; j < n_ + m_; ++j) {
        warm.status_[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(status_[static_cast<std::size_t>(j)]);
    }
    warm.kept_rows_ = kept_rows;
    warm.kept_cols_ = kept_cols;
}

inline LpStatus SimplexEngine::run(SimplexBasis* warm, const std::vector<int>& kept_rows,
                                   const std::vector<int>& kept_cols) {
    warm_started_ = warm != nullptr && !warm->empty() && try_warm_start(*warm, kept_rows, kept_cols);
    if (!warm_started_) {
        cold_start();
        if (num_columns() > n_ + m_) {
            auto st = iterate(true);
            if (st == LpStatus::iteration_limit) {
                return st;
            }
            if (!finish_phase_one()) {
                return LpStatus::infeasible;
            }
        }
    }
    auto st = iterate(false);
    refactor();
    if (st == LpStatus::optimal && warm != nullptr) {
        save_basis(*warm, kept_rows, kept_cols);
    }
    return st;
}

} // namespace internal

/**
 * Solves lp to a basic optimal solution. When `warm` holds a basis from an
 * earlier solve of an LP with identical rows and bounds, the solve starts
 * from it; on return `warm` holds the final basis.
 */
inline LpOutcome solve(const LinearProgram& lp, const SimplexOptions& opts = {}, SimplexBasis* warm = nullptr) {
    lp.validate();
    auto pre = internal::presolve(lp, opts.presolve);

    LpOutcome out;
    std::vector<double> reduced_values;
    if (pre.reduced.num_variables() == 0) {
        for (const auto& row : pre.reduced.rows) {
            double b = row.rhs;
            bool ok = row.sense == RowSense::equal          ? std::abs(b) <= opts.primal_tolerance
                      : row.sense == RowSense::less_equal ? b >= -opts.primal_tolerance
                                                          : b <= opts.primal_tolerance;
            if (!ok) {
                out.status = LpStatus::infeasible;
                return out;
            }
        }
        out.status = LpStatus::optimal;
    } else if (pre.reduced.num_rows() == 0) {
        // each column sits at its cheaper bound
        out.status = LpStatus::optimal;
        for (int j = 0; j < pre.reduced.num_variables(); ++j) {
            const auto sj = static_cast<std::size_t>(j);
            const double c = pre.reduced.objective[sj];
            const double lo = pre.reduced.lower[sj];
            const double hi = pre.reduced.upper[sj];
            double v = c > 0 ? lo : c < 0 ? hi : (std::isfinite(lo) ? lo : std::isfinite(hi) ? hi : 0.0);
            if (!std::isfinite(v)) {
                out.status = LpStatus::unbounded;
                return out;
            }
            reduced_values.push_back(v);
        }
    } else {
        internal::SimplexEngine engine(pre.reduced, opts);
        out.status = engine.run(warm, pre.kept_rows, pre.kept_cols);
        out.iterations = engine.iterations();
        out.warm_started = engine.warm_started();
        if (out.status == LpStatus::infeasible) {
            return out;
        }
        reduced_values = engine.structural_values();
        for (std::size_t c = 0; c < reduced_values.size(); ++c) {
            double& v = reduced_values[c];
            const double lo = pre.reduced.lower[c];
            const double hi = pre.reduced.upper[c];
            if (std::abs(v - lo) <= opts.primal_tolerance) {
                v = lo;
            } else if (std::abs(v - hi) <= opts.primal_tolerance) {
                v = hi;
            }
            v = std::clamp(v, lo, hi);
        }
    }
    out.values = internal::postsolve(lp, pre, reduced_values);
    out.objective_value = lp.evaluate(out.values);
    return out;
}

} // namespace bckm

#endif

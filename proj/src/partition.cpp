#include "ssr/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "ssr/errors.hpp"

namespace ssr {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kFeasTol = 1e-9;
}  // namespace

double trapezoid_weight(int n1, int n2, int half_width) {
    const int t = half_width;
    if (n1 < 2 || n1 > t || n2 < 2 || n2 > t) return 0.0;
    if (n1 == 2 || n1 == t || n2 == 2 || n2 == t) return 0.5;
    return 1.0;
}

double taper_weight(int n1, int n2, int half_width, double tau) {
    const int win = half_width + 1;
    if (n1 < 1 || n1 > win || n2 < 1 || n2 > win) return 0.0;
    const double c = 0.5 * (win + 1);
    const double a1 = std::tan(kPi * (n1 - c) / (2.0 * tau));
    const double a2 = std::tan(kPi * (n2 - c) / (2.0 * tau));
    return std::exp(-a1 * a1) * std::exp(-a2 * a2);
}

SupportFunction build_support_sized(int half_width, double tau) {
    if (half_width < 2) throw std::invalid_argument("support half width must be >= 2");
    if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    const int t = half_width;
    const int m = 2 * t + 1;
    SupportFunction s{m, std::vector<double>(static_cast<std::size_t>(m) * m, 0.0), tau};
    // Raw convolution index n runs over {1..2t+1}; sampling at n+1 moves the
    // peak from t+2 to the middle cell t+1 and keeps the outer frame at zero.
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const int n1 = a + 2;
            const int n2 = b + 2;
            double acc = 0.0;
            for (int k1 = 2; k1 <= t; ++k1)
                for (int k2 = 2; k2 <= t; ++k2) {
                    const double h1 = trapezoid_weight(k1, k2, t);
                    if (h1 == 0.0) continue;
                    acc += h1 * taper_weight(n1 - k1, n2 - k2, t, tau);
                }
            s.values[static_cast<std::size_t>(a) * m + b] = acc;
        }
    }
    return s;
}

SupportFunction build_support(double tau) { return build_support_sized(5, tau); }

double placed_support_value(const PlacedSupport& p, int i, int j) {
    return p.fn.at_offset(i - p.center[0], j - p.center[1]);
}

namespace {

// Primal simplex for the component LP
//   maximize t  subject to  ge_rows*alpha >= t, le_rows*alpha <= 1, alpha >= 0.
// Rewritten as (t - ge_rows*alpha <= 0, le_rows*alpha <= 1) the all-slack
// basis is feasible (alpha = 0, t = 0), so no phase one is needed. Dantzig
// pivoting with a Bland fallback against cycling on the degenerate zero rows.
// Returns the optimum t; alpha_out receives the maximizer.
double maximize_coverage(const std::vector<std::vector<double>>& ge_rows,
                         const std::vector<std::vector<double>>& le_rows, int n_alpha,
                         std::vector<double>& alpha_out) {
    const int kg = static_cast<int>(ge_rows.size());
    const int kl = static_cast<int>(le_rows.size());
    const int rows = kg + kl;
    const int col_t = n_alpha;
    const int n_struct = n_alpha + 1;
    const int n_cols = n_struct + rows;
    const int rhs = n_cols;

    std::vector<std::vector<double>> tab(rows, std::vector<double>(n_cols + 1, 0.0));
    std::vector<int> basis(rows);
    for (int j = 0; j < kg; ++j) {
        for (int i = 0; i < n_alpha; ++i) tab[j][i] = -ge_rows[j][i];
        tab[j][col_t] = 1.0;
        tab[j][n_struct + j] = 1.0;
        tab[j][rhs] = 0.0;
        basis[j] = n_struct + j;
    }
    for (int j = 0; j < kl; ++j) {
        const int r = kg + j;
        for (int i = 0; i < n_alpha; ++i) tab[r][i] = le_rows[j][i];
        tab[r][n_struct + r] = 1.0;
        tab[r][rhs] = 1.0;
        basis[r] = n_struct + r;
    }

    // Reduced costs for maximize t.
    std::vector<double> cost(n_cols + 1, 0.0);
    cost[col_t] = 1.0;

    // Lexicographic ratio test over (rhs, basis-inverse columns): prevents
    // cycling on the degenerate zero-rhs coverage rows regardless of the
    // entering rule. Returns true when row a is lexicographically smaller.
    const auto lex_less = [&](int a, int b, int enter) {
        const double pa = tab[a][enter];
        const double pb = tab[b][enter];
        double da = tab[a][rhs] / pa;
        double db = tab[b][rhs] / pb;
        if (da < db - 1e-12) return true;
        if (db < da - 1e-12) return false;
        for (int c = n_struct; c < n_cols; ++c) {
            da = tab[a][c] / pa;
            db = tab[b][c] / pb;
            if (da < db - 1e-12) return true;
            if (db < da - 1e-12) return false;
        }
        return false;
    };

    const int max_pivots = 20000 + 200 * rows;
    for (int pivot = 0;; ++pivot) {
        if (pivot > max_pivots)
            throw numeric_error("partition LP: simplex failed to terminate");
        int enter = -1;
        double best = kFeasTol;
        for (int c = 0; c < n_cols; ++c)
            if (cost[c] > best) {
                best = cost[c];
                enter = c;
            }
        if (enter < 0) break;
        int leave = -1;
        for (int r = 0; r < rows; ++r) {
            if (tab[r][enter] <= kFeasTol) continue;
            if (leave < 0 || lex_less(r, leave, enter)) leave = r;
        }
        if (leave < 0) throw numeric_error("partition LP: unbounded problem");

        const double piv = tab[leave][enter];
        for (int c = 0; c <= n_cols; ++c) tab[leave][c] /= piv;
        for (int r = 0; r < rows; ++r) {
            if (r == leave) continue;
            const double f = tab[r][enter];
            if (f == 0.0) continue;
            for (int c = 0; c <= n_cols; ++c) tab[r][c] -= f * tab[leave][c];
        }
        const double fc = cost[enter];
        if (fc != 0.0)
            for (int c = 0; c <= n_cols; ++c) cost[c] -= fc * tab[leave][c];
        basis[leave] = enter;
    }

    alpha_out.assign(n_alpha, 0.0);
    double t_opt = 0.0;
    for (int r = 0; r < rows; ++r) {
        if (basis[r] < n_alpha) alpha_out[basis[r]] = std::max(0.0, tab[r][rhs]);
        if (basis[r] == col_t) t_opt = tab[r][rhs];
    }
    return t_opt;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct ComponentSolution {
    std::vector<double> alpha;
    double t_star = 0.0;
};

// Solves one connected component. The LP itself is solved exactly (a full
// simplex on the original problem, then the optimum is snapped down to the t
// grid so the reported value matches the documented grid resolution); rows
// "coverage <= 1" are lazily added at pixels where the assembled field would
// exceed 1. Center-only caps do not bound the field between centers, so
// the extra rows are required for the partition axioms; they never change
// the objective.
ComponentSolution solve_component(const std::vector<const PlacedSupport*>& members,
                                  const std::vector<double>& t_values) {
    const int k = static_cast<int>(members.size());
    std::vector<std::vector<double>> ge(k, std::vector<double>(k, 0.0));
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i)
            ge[j][i] = placed_support_value(*members[i], members[j]->center[0],
                                            members[j]->center[1]);
    std::vector<std::vector<double>> le = ge;  // center caps

    // Pixels covered by two or more supports; single-coverage pixels cannot
    // exceed the center cap because each support peaks at its own center.
    std::vector<std::pair<int, int>> shared_pixels;
    if (k > 1) {
        int lo_i = members[0]->center[0], hi_i = lo_i, lo_j = members[0]->center[1], hi_j = lo_j;
        int max_t = 0;
        for (const auto* m : members) {
            lo_i = std::min(lo_i, m->center[0]);
            hi_i = std::max(hi_i, m->center[0]);
            lo_j = std::min(lo_j, m->center[1]);
            hi_j = std::max(hi_j, m->center[1]);
            max_t = std::max(max_t, m->fn.half_width());
        }
        for (int i = lo_i - max_t; i <= hi_i + max_t; ++i)
            for (int j = lo_j - max_t; j <= hi_j + max_t; ++j) {
                int covered = 0;
                for (const auto* m : members)
                    if (placed_support_value(*m, i, j) > 0.0 && ++covered == 2) break;
                if (covered >= 2) shared_pixels.emplace_back(i, j);
            }
    }

    ComponentSolution best;
    best.alpha.assign(k, 0.0);
    const int rounds_max = 64;
    for (int round = 0;; ++round) {
        if (round >= rounds_max)
            throw numeric_error("partition LP: cut generation failed to converge");

        std::vector<double> alpha(k, 0.0);
        const double t_exact = maximize_coverage(ge, le, k, alpha);

        // Check the assembled component field at shared pixels.
        std::vector<std::pair<double, std::vector<double>>> violations;
        for (const auto& [pi, pj] : shared_pixels) {
            double value = 0.0;
            std::vector<double> row(k);
            for (int i = 0; i < k; ++i) {
                row[i] = placed_support_value(*members[i], pi, pj);
                value += alpha[i] * row[i];
            }
            if (value > 1.0 + 1e-10) violations.emplace_back(value, std::move(row));
        }
        if (violations.empty()) {
            best.alpha = std::move(alpha);
            // Largest grid value not above the exact optimum.
            double snapped = 0.0;
            for (double tv : t_values)
                if (tv <= t_exact + 1e-9) snapped = tv;
            best.t_star = snapped;
            return best;
        }
        std::sort(violations.begin(), violations.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        const std::size_t add = std::min<std::size_t>(violations.size(), 32);
        for (std::size_t v = 0; v < add; ++v) le.push_back(std::move(violations[v].second));
    }
}

}  // namespace

LpSolution solve_partition_lp(const std::vector<PlacedSupport>& placements,
                              double t_grid_step) {
    if (placements.empty())
        throw std::invalid_argument("partition LP needs at least one placement");
    if (t_grid_step <= 0.0 || t_grid_step > 1.0)
        throw std::invalid_argument("t grid step must lie in (0, 1]");

    const int n = static_cast<int>(placements.size());

    // Merge exact duplicate centers: identical columns make alpha non-unique.
    std::vector<int> rep(n, -1);   // index into the merged list
    std::vector<int> merged;       // original indices of representatives
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < static_cast<int>(merged.size()); ++m) {
            if (placements[merged[m]].center == placements[i].center) {
                rep[i] = m;
                break;
            }
        }
        if (rep[i] < 0) {
            rep[i] = static_cast<int>(merged.size());
            merged.push_back(i);
        }
    }
    const int k = static_cast<int>(merged.size());

    for (int i = 0; i < k; ++i) {
        const auto& p = placements[merged[i]];
        if (p.fn.peak() <= 0.0 || placed_support_value(p, p.center[0], p.center[1]) <= 0.0)
            throw std::invalid_argument("placement " + std::to_string(merged[i]) +
                                        " has zero support at its own center");
    }

    // Components must group supports whose bodies overlap anywhere, not just
    // at each other's centers: the "coverage <= 1" cap couples every shared
    // pixel.
    UnionFind uf(k);
    for (int i = 0; i < k; ++i) {
        const auto& pi = placements[merged[i]];
        for (int j = i + 1; j < k; ++j) {
            const auto& pj = placements[merged[j]];
            const int reach = pi.fn.half_width() + pj.fn.half_width();
            if (std::abs(pi.center[0] - pj.center[0]) <= reach &&
                std::abs(pi.center[1] - pj.center[1]) <= reach)
                uf.unite(i, j);
        }
    }
    std::vector<std::vector<int>> components;
    {
        std::vector<int> comp_of(k, -1);
        for (int i = 0; i < k; ++i) {
            const int root = uf.find(i);
            if (comp_of[root] < 0) {
                comp_of[root] = static_cast<int>(components.size());
                components.emplace_back();
            }
            components[comp_of[root]].push_back(i);
        }
    }

    std::vector<double> t_values{0.0};
    for (int g = 1; g * t_grid_step < 1.0 - 1e-12; ++g) t_values.push_back(g * t_grid_step);
    t_values.push_back(1.0);

    // The global optimum is the worst component optimum: constraints do not
    // couple across components and every component tolerates any smaller t.
    std::vector<double> alpha_merged(k, 0.0);
    double t_star = 1.0;
    for (const auto& comp : components) {
        std::vector<const PlacedSupport*> members;
        members.reserve(comp.size());
        for (int idx : comp) members.push_back(&placements[merged[idx]]);
        ComponentSolution sol = solve_component(members, t_values);
        t_star = std::min(t_star, sol.t_star);
        for (std::size_t a = 0; a < comp.size(); ++a) alpha_merged[comp[a]] = sol.alpha[a];
    }

    LpSolution out;
    out.t_star = t_star;
    out.alphas.assign(n, 0.0);
    std::vector<bool> claimed(k, false);
    for (int i = 0; i < n; ++i) {
        if (!claimed[rep[i]]) {
            out.alphas[i] = alpha_merged[rep[i]];
            claimed[rep[i]] = true;
        }
    }
    return out;
}

Partition assemble_fields(const LpSolution& lp, const std::vector<PlacedSupport>& placements,
                          int side) {
    if (lp.alphas.size() != placements.size())
        throw std::invalid_argument("alpha/placement count mismatch");
    Partition part;
    part.alphas = lp.alphas;
    part.t_star = lp.t_star;
    part.degenerate = lp.t_star <= 0.0;
    part.edge_field = zeros_like(side);
    for (std::size_t p = 0; p < placements.size(); ++p) {
        const double a = lp.alphas[p];
        if (a == 0.0) continue;
        const auto& sp = placements[p];
        const int t = sp.fn.half_width();
        for (int di = -t; di <= t; ++di) {
            const int i = sp.center[0] + di;
            if (i < 0 || i >= side) continue;
            for (int dj = -t; dj <= t; ++dj) {
                const int j = sp.center[1] + dj;
                if (j < 0 || j >= side) continue;
                part.edge_field.at(i, j) += a * sp.fn.at_offset(di, dj);
            }
        }
    }
    part.smooth_field = zeros_like(side);
    for (std::size_t q = 0; q < part.edge_field.values.size(); ++q) {
        double v = part.edge_field.values[q];
        if (v > 1.0 + 1e-9)
            throw numeric_error("edge field exceeds 1 by " + std::to_string(v - 1.0) +
                                "; LP constraints violated upstream");
        v = std::clamp(v, 0.0, 1.0);
        part.edge_field.values[q] = v;
        part.smooth_field.values[q] = 1.0 - v;
    }
    return part;
}

}  // namespace ssr

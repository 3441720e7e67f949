#pragma once

// Slow, obviously-correct reference implementations. None of these call into
// the library code they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Tuple reduced to the three heads Algorithm 1 looks at.
struct Triple {
    std::string s, r, o;
};

struct Matrix {
    std::vector<std::string> entities;  // sorted unique
    std::vector<std::vector<long>> m;
    std::vector<std::vector<double>> norm;
};

// Literal double loop over tuples and entity pairs.
inline Matrix cooccurrence(const std::vector<Triple>& tuples, std::vector<std::string> entities,
                           const std::set<std::string>& stop) {
    std::sort(entities.begin(), entities.end());
    entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
    Matrix out;
    out.entities = entities;
    const std::size_t n = entities.size();
    out.m.assign(n, std::vector<long>(n, 0));
    for (const auto& t : tuples) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                if (entities[i] == t.s && entities[j] == t.o && stop.count(t.r) == 0) {
                    out.m[i][j] += 1;
                    out.m[j][i] += 1;
                }
            }
        }
    }
    out.norm.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        long row = 0;
        for (std::size_t j = 0; j < n; ++j) row += out.m[i][j];
        for (std::size_t j = 0; j < n && row > 0; ++j)
            out.norm[i][j] = static_cast<double>(out.m[i][j]) / static_cast<double>(row);
    }
    return out;
}

// |N(a) ∩ N(b)| by scanning every entity.
inline long common_neighbors(const Matrix& mat, const std::string& a, const std::string& b) {
    auto idx = [&](const std::string& e) -> long {
        for (std::size_t i = 0; i < mat.entities.size(); ++i)
            if (mat.entities[i] == e) return static_cast<long>(i);
        return -1;
    };
    long ia = idx(a), ib = idx(b);
    if (ia < 0 || ib < 0) return 0;
    long count = 0;
    for (std::size_t x = 0; x < mat.entities.size(); ++x)
        if (mat.m[ia][x] > 0 && mat.m[ib][x] > 0) ++count;
    return count;
}

// Indicator double sum of the coverage score over single-token words.
inline double coverage(const std::vector<std::string>& community, const std::vector<std::string>& tokens) {
    std::set<std::string> words(community.begin(), community.end());
    if (words.empty() || tokens.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& wg : words)
        for (const auto& wc : tokens)
            if (wg == wc) sum += 1.0;
    return sum / (static_cast<double>(words.size()) * static_cast<double>(tokens.size()));
}

// Homogeneity / completeness / V through mutual information.
struct Hcv {
    double h, c, v;
};
inline Hcv hcv(const std::vector<int>& truth, const std::vector<int>& pred) {
    const double n = static_cast<double>(truth.size());
    std::map<int, double> a, b;
    std::map<std::pair<int, int>, double> ab;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        a[truth[i]] += 1;
        b[pred[i]] += 1;
        ab[{truth[i], pred[i]}] += 1;
    }
    auto H = [&](const std::map<int, double>& m) {
        double h = 0;
        for (auto& [_, c] : m) h -= c / n * std::log(c / n);
        return h;
    };
    double mi = 0;
    for (auto& [k, c] : ab) mi += c / n * std::log((c / n) / ((a[k.first] / n) * (b[k.second] / n)));
    double ht = H(a), hp = H(b);
    Hcv r;
    r.h = ht == 0 ? 1.0 : mi / ht;
    r.c = hp == 0 ? 1.0 : mi / hp;
    r.v = r.h + r.c == 0 ? 0.0 : 2 * r.h * r.c / (r.h + r.c);
    return r;
}

// Dense symmetric weight matrix helpers.
using Dense = std::vector<std::vector<double>>;

// Q = 1/(2m) Σ_ij (A_ij − k_i k_j / 2m) δ(c_i, c_j).
inline double modularity(const Dense& A, const std::vector<int>& part) {
    const std::size_t n = A.size();
    std::vector<double> k(n, 0.0);
    double two_m = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k[i] += A[i][j];
            two_m += A[i][j];
        }
    if (two_m == 0) return 0;
    double q = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (part[i] == part[j]) q += A[i][j] - k[i] * k[j] / two_m;
    return q / two_m;
}

// Every set partition of {0..n-1} as restricted growth strings.
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> a(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
        if (i == n) {
            fn(a);
            return;
        }
        for (int l = 0; l <= max_label + 1; ++l) {
            a[i] = l;
            rec(i + 1, std::max(max_label, l));
        }
    };
    if (n == 0) fn(a);
    else rec(0, -1);
}

inline std::pair<double, std::vector<int>> best_modularity(const Dense& A) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> arg;
    for_each_partition(A.size(), [&](const std::vector<int>& p) {
        double q = modularity(A, p);
        if (q > best + 1e-12) {
            best = q;
            arg = p;
        }
    });
    return {best, arg};
}

// Minimum-SSE split of points into two non-empty clusters, by enumeration.
inline std::pair<double, std::vector<int>> best_two_split(const std::vector<std::vector<double>>& pts) {
    const std::size_t n = pts.size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> arg;
    for (unsigned long mask = 1; mask + 1 < (1ul << n); ++mask) {
        if (mask & 1ul) continue;  // fix point 0 in cluster 0, skips mirrored masks
        std::vector<int> lab(n);
        for (std::size_t i = 0; i < n; ++i) lab[i] = (mask >> i) & 1ul;
        double sse = 0;
        for (int c = 0; c < 2; ++c) {
            std::vector<double> mean(pts[0].size(), 0.0);
            double cnt = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (lab[i] == c) {
                    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += pts[i][d];
                    cnt += 1;
                }
            for (auto& m : mean) m /= cnt;
            for (std::size_t i = 0; i < n; ++i)
                if (lab[i] == c)
                    for (std::size_t d = 0; d < mean.size(); ++d)
                        sse += (pts[i][d] - mean[d]) * (pts[i][d] - mean[d]);
        }
        if (sse < best) {
            best = sse;
            arg = lab;
        }
    }
    return {best, arg};
}

// Connected components by repeated flood fill over an explicit edge list.
inline std::vector<std::set<std::string>> components(const std::vector<std::string>& nodes,
                                                     const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<std::set<std::string>> out;
    std::set<std::string> seen;
    for (const auto& start : nodes) {
        if (seen.count(start)) continue;
        std::set<std::string> comp{start};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& [a, b] : edges) {
                if (comp.count(a) && !comp.count(b)) grew = comp.insert(b).second || grew;
                if (comp.count(b) && !comp.count(a)) grew = comp.insert(a).second || grew;
            }
        }
        seen.insert(comp.begin(), comp.end());
        out.push_back(comp);
    }
    return out;
}

}  // namespace oracle

// Copyright 2026 The splnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLNOISE_COVERARRAY_HPP
#define SPLNOISE_COVERARRAY_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "splnoise/detail/ca_tables.hpp"

namespace splnoise {

/// Covering array CA(N; t, k, v): an N x k matrix over {0, ..., v-1} in which
/// every choice of t columns shows all v^t symbol tuples in some row.
struct CoveringArray {
    int t = 0;
    int k = 0;
    int v = 0;
    std::vector<std::vector<int>> rows;

    size_t num_rows() const {
        return rows.size();
    }
    bool operator==(const CoveringArray &other) const = default;
};

struct CoverageReport {
    bool ok = true;
    /// First uncovered interaction in lexicographic (columns, tuple) order.
    std::vector<int> missing_columns;
    std::vector<int> missing_tuple;
};

namespace detail {

/// Calls f(cols) for every increasing t-subset of {0..k-1}, lexicographically.
/// Stops early when f returns false.
template <typename F>
void for_each_subset(int k, int t, F &&f) {
    if (t > k || t <= 0) {
        return;
    }
    std::vector<int> idx(t);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (!f(static_cast<const std::vector<int> &>(idx))) {
            return;
        }
        int i = t - 1;
        while (i >= 0 && idx[i] == k - t + i) {
            i--;
        }
        if (i < 0) {
            return;
        }
        idx[i]++;
        for (int j = i + 1; j < t; j++) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

inline int ipow(int base, int exp) {
    int r = 1;
    while (exp-- > 0) {
        r *= base;
    }
    return r;
}

inline CoveringArray full_factorial(int t, int k, int v) {
    CoveringArray ca{t, k, v, {}};
    int total = ipow(v, k);
    for (int r = 0; r < total; r++) {
        std::vector<int> row(k);
        for (int c = k - 1, x = r; c >= 0; c--, x /= v) {
            row[c] = x % v;
        }
        ca.rows.push_back(std::move(row));
    }
    return ca;
}

/// Binary strength-two arrays meeting the Renyi bound: columns are the
/// ceil(N/2)-subsets of {1..N-1}, plus an all-zero row 0.
inline CoveringArray binary_strength_two(int k) {
    auto binom = [](int n, int r) {
        long long b = 1;
        for (int i = 1; i <= r; i++) {
            b = b * (n - r + i) / i;
        }
        return b;
    };
    int n = 4;
    while (binom(n - 1, (n + 1) / 2) < k) {
        n++;
    }
    int w = (n + 1) / 2;
    CoveringArray ca{2, k, 2, std::vector<std::vector<int>>(n, std::vector<int>(k, 0))};
    // Enumerate w-subsets of {1..n-1} in lexicographic order; one per column.
    int col = 0;
    for_each_subset(n - 1, w, [&](const std::vector<int> &subset) {
        for (int i : subset) {
            ca.rows[i + 1][col] = 1;
        }
        return ++col < k;
    });
    return ca;
}

/// Linear orthogonal arrays over F_v (v prime) with v^t rows and t + 1 columns:
/// the free coordinates plus their sum.
inline CoveringArray linear_oa(int t, int k, int v) {
    CoveringArray ca{t, k, v, {}};
    CoveringArray base = full_factorial(t, t, v);
    for (auto &row : base.rows) {
        int sum = std::accumulate(row.begin(), row.end(), 0) % v;
        if (k >= t + 1) {
            row.push_back(sum);
        }
        ca.rows.push_back(row);
    }
    if (t == 2 && k == 4 && v == 3) {
        // x, y, x+y, x+2y.
        for (auto &row : ca.rows) {
            row.push_back((row[0] + 2 * row[1]) % 3);
        }
    }
    return ca;
}

inline CoveringArray parse_embedded(const detail::EmbeddedArray &e) {
    CoveringArray ca{e.t, e.k, e.v, {}};
    std::istringstream in(e.rows);
    std::string line;
    while (in >> line) {
        std::vector<int> row;
        for (char c : line) {
            row.push_back(c - '0');
        }
        ca.rows.push_back(std::move(row));
    }
    return ca;
}

/// Binary strength-three doubling: rows [a | a] for a in a CA(3, m, 2) and
/// [b | ~b] for b in a CA(2, m, 2), truncated to k <= 2m columns.
inline CoveringArray roux_doubling(int k, const CoveringArray &a, const CoveringArray &b) {
    CoveringArray ca{3, k, 2, {}};
    auto emit = [&](const std::vector<int> &left, bool flip) {
        std::vector<int> row = left;
        for (int x : left) {
            row.push_back(flip ? 1 - x : x);
        }
        row.resize(k);
        ca.rows.push_back(std::move(row));
    };
    for (const auto &row : a.rows) {
        emit(row, false);
    }
    for (const auto &row : b.rows) {
        emit(row, true);
    }
    return ca;
}

/// Row-by-row greedy: each new row is the best of a fixed number of
/// AETG-style candidates (seeded with an uncovered interaction, remaining
/// columns filled one at a time to maximize new coverage).
inline CoveringArray greedy(int t, int k, int v, uint64_t seed = 0x5eed) {
    const int vt = ipow(v, t);
    std::vector<std::vector<int>> tsets;
    for_each_subset(k, t, [&](const std::vector<int> &s) {
        tsets.push_back(s);
        return true;
    });
    std::vector<std::vector<uint8_t>> covered(tsets.size(), std::vector<uint8_t>(vt, 0));
    long remaining = static_cast<long>(tsets.size()) * vt;
    auto code = [&](const std::vector<int> &cols, const std::vector<int> &row) {
        int c = 0;
        for (int col : cols) {
            c = c * v + row[col];
        }
        return c;
    };

    std::mt19937_64 rng(seed);
    CoveringArray ca{t, k, v, {}};
    const int num_candidates = 16;
    while (remaining > 0) {
        // First uncovered interaction (deterministic anchor).
        size_t anchor_set = 0;
        int anchor_tuple = 0;
        for (size_t s = 0; s < tsets.size(); s++) {
            auto it = std::find(covered[s].begin(), covered[s].end(), 0);
            if (it != covered[s].end()) {
                anchor_set = s;
                anchor_tuple = static_cast<int>(it - covered[s].begin());
                break;
            }
        }
        std::vector<int> best_row;
        long best_gain = -1;
        for (int cand = 0; cand < num_candidates; cand++) {
            std::vector<int> row(k, -1);
            for (int i = t - 1, x = anchor_tuple; i >= 0; i--, x /= v) {
                row[tsets[anchor_set][i]] = x % v;
            }
            std::vector<int> order;
            for (int c = 0; c < k; c++) {
                if (row[c] < 0) {
                    order.push_back(c);
                }
            }
            std::shuffle(order.begin(), order.end(), rng);
            for (int c : order) {
                long best_sym_gain = -1;
                int best_sym = 0;
                for (int sym = 0; sym < v; sym++) {
                    row[c] = sym;
                    long gain = 0;
                    for (size_t s = 0; s < tsets.size(); s++) {
                        const auto &cols = tsets[s];
                        if (std::find(cols.begin(), cols.end(), c) == cols.end()) {
                            continue;
                        }
                        bool assigned = std::all_of(cols.begin(), cols.end(), [&](int cc) { return row[cc] >= 0; });
                        if (assigned && !covered[s][code(cols, row)]) {
                            gain++;
                        }
                    }
                    if (gain > best_sym_gain) {
                        best_sym_gain = gain;
                        best_sym = sym;
                    }
                }
                row[c] = best_sym;
            }
            long gain = 0;
            for (size_t s = 0; s < tsets.size(); s++) {
                gain += !covered[s][code(tsets[s], row)];
            }
            if (gain > best_gain || (gain == best_gain && row < best_row)) {
                best_gain = gain;
                best_row = row;
            }
        }
        for (size_t s = 0; s < tsets.size(); s++) {
            auto &cell = covered[s][code(tsets[s], best_row)];
            if (!cell) {
                cell = 1;
                remaining--;
            }
        }
        ca.rows.push_back(std::move(best_row));
    }
    return ca;
}

}  // namespace detail

/// Exhaustive check over all C(k, t) column choices and v^t tuples.
inline CoverageReport verify(const CoveringArray &ca) {
    CoverageReport report;
    if (ca.t <= 0 || ca.t > ca.k) {
        report.ok = false;
        return report;
    }
    for (const auto &row : ca.rows) {
        if (static_cast<int>(row.size()) != ca.k) {
            report.ok = false;
            return report;
        }
        for (int x : row) {
            if (x < 0 || x >= ca.v) {
                report.ok = false;
                return report;
            }
        }
    }
    const int vt = detail::ipow(ca.v, ca.t);
    std::vector<uint8_t> seen(vt);
    detail::for_each_subset(ca.k, ca.t, [&](const std::vector<int> &cols) {
        std::fill(seen.begin(), seen.end(), 0);
        for (const auto &row : ca.rows) {
            int c = 0;
            for (int col : cols) {
                c = c * ca.v + row[col];
            }
            seen[c] = 1;
        }
        for (int x = 0; x < vt; x++) {
            if (!seen[x]) {
                report.ok = false;
                report.missing_columns = cols;
                report.missing_tuple.assign(ca.t, 0);
                for (int i = ca.t - 1, y = x; i >= 0; i--, y /= ca.v) {
                    report.missing_tuple[i] = y % ca.v;
                }
                return false;
            }
        }
        return true;
    });
    return report;
}

/// Largest column count accepted by construct().
inline constexpr int kMaxColumns = 64;

/// Builds a verified covering array. Preference order: trivial and algebraic
/// constructions, then the embedded search results (truncated to k columns),
/// then a deterministic greedy fallback.
inline CoveringArray construct(int t, int k, int v) {
    if (v != 2 && v != 3) {
        throw std::invalid_argument("covering array alphabet must be 2 or 3");
    }
    if (t < 1 || t > 3) {
        throw std::invalid_argument("covering array strength must be 1, 2 or 3");
    }
    if (k < t) {
        throw std::invalid_argument("covering array needs at least t columns");
    }
    if (k > kMaxColumns) {
        throw std::invalid_argument("covering array width exceeds " + std::to_string(kMaxColumns));
    }

    std::optional<CoveringArray> ca;
    if (t == 1) {
        ca = CoveringArray{1, k, v, {}};
        for (int s = 0; s < v; s++) {
            ca->rows.emplace_back(k, s);
        }
    } else if (t == k) {
        ca = detail::full_factorial(t, k, v);
    } else if (t == 2 && v == 2) {
        ca = detail::binary_strength_two(k);
    } else if (k == t + 1 && (t == 2 || t == 3)) {
        ca = detail::linear_oa(t, k, v);
    } else if (t == 2 && v == 3 && k == 4) {
        ca = detail::linear_oa(2, 4, 3);
    } else {
        const detail::EmbeddedArray *best = nullptr;
        for (const auto &e : detail::embedded_arrays()) {
            if (e.t == t && e.v == v && e.k >= k && (best == nullptr || e.n < best->n)) {
                best = &e;
            }
        }
        if (best != nullptr) {
            ca = detail::parse_embedded(*best);
            for (auto &row : ca->rows) {
                row.resize(k);
            }
            ca->k = k;
        }
        if (t == 3 && v == 2 && k >= 6) {
            auto doubled = detail::roux_doubling(k, construct(3, (k + 1) / 2, 2), construct(2, (k + 1) / 2, 2));
            if (!ca || doubled.num_rows() < ca->num_rows()) {
                ca = std::move(doubled);
            }
        }
        if (!ca) {
            ca = detail::greedy(t, k, v);
        }
    }
    if (!verify(*ca).ok) {
        throw std::logic_error("constructed covering array failed verification");
    }
    return *ca;
}

/// Text form: a "t k v N" header line, then N rows of space-separated symbols.
inline std::string to_text(const CoveringArray &ca) {
    std::ostringstream out;
    out << ca.t << ' ' << ca.k << ' ' << ca.v << ' ' << ca.rows.size() << '\n';
    for (const auto &row : ca.rows) {
        for (size_t c = 0; c < row.size(); c++) {
            out << (c ? " " : "") << row[c];
        }
        out << '\n';
    }
    return out.str();
}

inline CoveringArray from_text(const std::string &text) {
    std::istringstream in(text);
    CoveringArray ca;
    size_t n = 0;
    if (!(in >> ca.t >> ca.k >> ca.v >> n)) {
        throw std::invalid_argument("covering array text: bad header");
    }
    if (ca.k <= 0 || ca.v <= 0) {
        throw std::invalid_argument("covering array text: bad dimensions");
    }
    ca.rows.assign(n, std::vector<int>(ca.k));
    for (auto &row : ca.rows) {
        for (auto &x : row) {
            if (!(in >> x)) {
                throw std::invalid_argument("covering array text: truncated body");
            }
            if (x < 0 || x >= ca.v) {
                throw std::invalid_argument("covering array text: symbol out of range");
            }
        }
    }
    return ca;
}

}  // namespace splnoise

#endif  // SPLNOISE_COVERARRAY_HPP

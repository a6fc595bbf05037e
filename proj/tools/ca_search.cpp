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

// Offline tabu search for covering arrays CA(N; t, k, v).
//
// This is the generator used to produce the arrays embedded in
// include/splnoise/detail/ca_tables.hpp. Every array it prints is checked
// with splnoise::verify before it is written out.
//
//   ca_search t k v N [seed] [max_steps]

#include <splnoise/coverarray.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <random>
#include <vector>

namespace {

struct Search {
    int t, k, v, n_rows;
    std::vector<std::vector<int>> tsets;
    std::vector<std::vector<int>> tsets_of_col;
    std::vector<std::vector<int>> counts;  // [tset][tuple]
    std::vector<std::vector<int>> rows;
    long uncovered = 0;
    int vt = 1;

    Search(int t_, int k_, int v_, int n_, std::mt19937_64 &rng) : t(t_), k(k_), v(v_), n_rows(n_) {
        for (int i = 0; i < t; i++) vt *= v;
        std::vector<int> idx(t);
        for (int i = 0; i < t; i++) idx[i] = i;
        while (true) {
            tsets.push_back(idx);
            int i = t - 1;
            while (i >= 0 && idx[i] == k - t + i) i--;
            if (i < 0) break;
            idx[i]++;
            for (int j = i + 1; j < t; j++) idx[j] = idx[j - 1] + 1;
        }
        tsets_of_col.resize(k);
        for (int s = 0; s < (int)tsets.size(); s++) {
            for (int c : tsets[s]) tsets_of_col[c].push_back(s);
        }
        rows.assign(n_rows, std::vector<int>(k));
        for (auto &r : rows) {
            for (auto &x : r) x = (int)(rng() % v);
        }
        counts.assign(tsets.size(), std::vector<int>(vt, 0));
        for (int s = 0; s < (int)tsets.size(); s++) {
            for (const auto &r : rows) counts[s][code(s, r)]++;
        }
        uncovered = 0;
        for (const auto &c : counts) {
            for (int x : c) uncovered += (x == 0);
        }
    }

    int code(int s, const std::vector<int> &r) const {
        int c = 0;
        for (int col : tsets[s]) c = c * v + r[col];
        return c;
    }

    // Change in uncovered count if row r takes the symbols `sym` at columns of tset s.
    long delta(int r, int s, const std::vector<int> &sym) {
        std::vector<int> row = rows[r];
        long d = 0;
        // Collect affected tsets (those touching any changed column).
        std::vector<int> affected;
        for (int i = 0; i < t; i++) {
            int col = tsets[s][i];
            if (row[col] == sym[i]) continue;
            for (int s2 : tsets_of_col[col]) affected.push_back(s2);
        }
        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        std::vector<int> new_row = row;
        for (int i = 0; i < t; i++) new_row[tsets[s][i]] = sym[i];
        for (int s2 : affected) {
            int a = code(s2, row), b = code(s2, new_row);
            if (a == b) continue;
            if (counts[s2][a] == 1) d++;
            if (counts[s2][b] == 0) d--;
        }
        return d;
    }

    void apply(int r, int s, const std::vector<int> &sym) {
        std::vector<int> new_row = rows[r];
        for (int i = 0; i < t; i++) new_row[tsets[s][i]] = sym[i];
        std::vector<int> affected;
        for (int i = 0; i < t; i++) {
            int col = tsets[s][i];
            if (rows[r][col] == sym[i]) continue;
            for (int s2 : tsets_of_col[col]) affected.push_back(s2);
        }
        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        for (int s2 : affected) {
            int a = code(s2, rows[r]), b = code(s2, new_row);
            if (a == b) continue;
            if (--counts[s2][a] == 0) uncovered++;
            if (counts[s2][b]++ == 0) uncovered--;
        }
        rows[r] = new_row;
    }
};

}  // namespace

int main(int argc, char **argv) {
    if (argc < 5) {
        std::cerr << "usage: ca_search t k v N [seed] [max_steps]\n";
        return 2;
    }
    int t = std::atoi(argv[1]), k = std::atoi(argv[2]), v = std::atoi(argv[3]), n = std::atoi(argv[4]);
    uint64_t seed = argc > 5 ? std::strtoull(argv[5], nullptr, 10) : 1;
    long max_steps = argc > 6 ? std::atol(argv[6]) : 2000000;
    std::mt19937_64 rng(seed);
    Search search(t, k, v, n, rng);

    std::vector<std::vector<long>> tabu(n, std::vector<long>(k, -1000000));
    const long tabu_len = 2 * t;
    long best = search.uncovered;
    for (long step = 0; step < max_steps && search.uncovered > 0; step++) {
        // Pick a random uncovered interaction.
        long target = (long)(rng() % search.uncovered);
        int s_pick = -1, tuple_pick = -1;
        for (int s = 0; s < (int)search.tsets.size() && s_pick < 0; s++) {
            for (int x = 0; x < search.vt; x++) {
                if (search.counts[s][x] == 0 && target-- == 0) {
                    s_pick = s;
                    tuple_pick = x;
                    break;
                }
            }
        }
        std::vector<int> sym(t);
        for (int i = t - 1, x = tuple_pick; i >= 0; i--, x /= v) sym[i] = x % v;

        long best_delta = 1L << 40;
        std::vector<int> candidates;
        for (int r = 0; r < n; r++) {
            bool is_tabu = false;
            for (int i = 0; i < t; i++) {
                int col = search.tsets[s_pick][i];
                if (search.rows[r][col] != sym[i] && step - tabu[r][col] < tabu_len) is_tabu = true;
            }
            long d = search.delta(r, s_pick, sym);
            if (is_tabu && search.uncovered + d >= best) continue;
            if (d < best_delta) {
                best_delta = d;
                candidates.clear();
            }
            if (d == best_delta) candidates.push_back(r);
        }
        if (candidates.empty()) continue;
        int r = candidates[rng() % candidates.size()];
        for (int i = 0; i < t; i++) {
            int col = search.tsets[s_pick][i];
            if (search.rows[r][col] != sym[i]) tabu[r][col] = step;
        }
        search.apply(r, s_pick, sym);
        if (search.uncovered < best) best = search.uncovered;
    }
    if (search.uncovered > 0) {
        std::cerr << "not found; best uncovered = " << best << "\n";
        return 3;
    }
    splnoise::CoveringArray ca;
    ca.t = t;
    ca.k = k;
    ca.v = v;
    ca.rows = search.rows;
    if (!splnoise::verify(ca).ok) {
        std::cerr << "internal error: verification failed\n";
        return 4;
    }
    std::cout << splnoise::to_text(ca);
    return 0;
}

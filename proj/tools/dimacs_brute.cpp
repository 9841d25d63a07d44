// SPDX-License-Identifier: Apache-2.0
// Reference DIMACS solver for differential testing. Small instances are
// decided by exhaustive enumeration; larger ones by a plain recursive DPLL
// with unit propagation (no learning, no watches, nothing shared with the
// main solver). Prints "s SATISFIABLE"/"s UNSATISFIABLE" plus a v-line.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Clauses = std::vector<std::vector<int>>;

// assignment: 0 unknown, 1 true, -1 false (index by var)
bool dpll(const Clauses& clauses, std::vector<int8_t> assign) {
    // unit propagation to fixpoint
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& cl : clauses) {
            int unassigned = 0;
            int unit = 0;
            bool sat = false;
            for (int lit : cl) {
                int v = lit > 0 ? lit : -lit;
                int8_t a = assign[v];
                if (a == 0) {
                    unassigned++;
                    unit = lit;
                } else if ((a == 1) == (lit > 0)) {
                    sat = true;
                    break;
                }
            }
            if (sat) continue;
            if (unassigned == 0) return false; // conflict
            if (unassigned == 1) {
                assign[unit > 0 ? unit : -unit] = unit > 0 ? 1 : -1;
                changed = true;
            }
        }
    }
    // branch on the first unknown var appearing in an unsatisfied clause
    for (const auto& cl : clauses) {
        bool sat = false;
        int branch = 0;
        for (int lit : cl) {
            int v = lit > 0 ? lit : -lit;
            if (assign[v] == 0 && branch == 0) branch = v;
            if (assign[v] != 0 && (assign[v] == 1) == (lit > 0)) {
                sat = true;
                break;
            }
        }
        if (sat || branch == 0) continue;
        std::vector<int8_t> pos = assign;
        pos[branch] = 1;
        if (dpll(clauses, std::move(pos))) return true;
        std::vector<int8_t> neg = assign;
        neg[branch] = -1;
        return dpll(clauses, std::move(neg));
    }
    return true; // every clause satisfied
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: dimacs-brute <file.cnf>\n";
        return 2;
    }
    std::ifstream f(argv[1]);
    if (!f) {
        std::cerr << "cannot open " << argv[1] << "\n";
        return 2;
    }

    int nvars = -1;
    Clauses clauses;
    std::string line;
    std::vector<int> cur;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            std::istringstream ss(line);
            std::string p, cnf;
            int nc;
            ss >> p >> cnf >> nvars >> nc;
            continue;
        }
        std::istringstream ss(line);
        int lit;
        while (ss >> lit) {
            if (lit == 0) {
                clauses.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(lit);
            }
        }
    }
    if (!cur.empty()) clauses.push_back(cur);
    if (nvars < 0) {
        std::cerr << "missing p cnf header\n";
        return 2;
    }

    bool sat;
    std::vector<int8_t> model;
    if (nvars <= 20) {
        sat = false;
        for (uint64_t m = 0; m < (1ull << nvars) && !sat; m++) {
            bool ok = true;
            for (const auto& cl : clauses) {
                bool csat = false;
                for (int lit : cl) {
                    int v = lit > 0 ? lit : -lit;
                    bool val = (m >> (v - 1)) & 1;
                    if ((lit > 0) == val) {
                        csat = true;
                        break;
                    }
                }
                if (!csat) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                sat = true;
                model.assign(nvars + 1, -1);
                for (int v = 1; v <= nvars; v++)
                    if ((m >> (v - 1)) & 1) model[v] = 1;
            }
        }
    } else {
        std::vector<int8_t> assign(static_cast<size_t>(nvars) + 1, 0);
        sat = dpll(clauses, assign);
        model.assign(nvars + 1, -1); // v-line is indicative only on this path
    }

    if (sat) {
        std::cout << "s SATISFIABLE\n";
        std::cout << "v";
        for (int v = 1; v <= nvars; v++) std::cout << " " << (model[v] == 1 ? v : -v);
        std::cout << " 0\n";
        return 10;
    }
    std::cout << "s UNSATISFIABLE\n";
    return 20;
}

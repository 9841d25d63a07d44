// SPDX-License-Identifier: Apache-2.0

#include "exsim/sat.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace exsim {

struct Solver::Clause {
    double activity = 0.0;
    bool learnt = false;
    std::vector<SatLit> lits;
};

struct Solver::Watcher {
    Clause* clause;
    SatLit blocker;
};

Solver::Solver() {
    if (const char* env = std::getenv("EXSIM_DIMACS_SOLVER")) diff_cmd_ = env;
    // var indices are 1-based; slot 0 is a placeholder
    assigns_.push_back(0);
    level_.push_back(0);
    reason_.push_back(nullptr);
    activity_.push_back(0.0);
    polarity_.push_back(0);
    heap_pos_.push_back(-1);
    seen_.push_back(0);
    model_.push_back(0);
}

Solver::~Solver() = default;

SatLit Solver::new_var() {
    nvars_++;
    assigns_.push_back(0);
    level_.push_back(0);
    reason_.push_back(nullptr);
    activity_.push_back(0.0);
    polarity_.push_back(0);
    heap_pos_.push_back(-1);
    seen_.push_back(0);
    model_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(nvars_);
    return SatLit{nvars_};
}

int8_t Solver::value(SatLit l) const {
    int8_t a = assigns_[l.var()];
    return l.negated() ? static_cast<int8_t>(-a) : a;
}

// ----------------------------------------------------------------- heap ----

bool Solver::heap_less(int32_t a, int32_t b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b; // deterministic tie-break
}

void Solver::heap_insert(int32_t v) {
    if (heap_pos_[v] != -1) return;
    heap_pos_[v] = static_cast<int32_t>(heap_.size());
    heap_.push_back(v);
    heap_sift_up(heap_.size() - 1);
}

void Solver::heap_sift_up(size_t i) {
    while (i > 0) {
        size_t p = (i - 1) / 2;
        if (!heap_less(heap_[i], heap_[p])) break;
        std::swap(heap_pos_[heap_[i]], heap_pos_[heap_[p]]);
        std::swap(heap_[i], heap_[p]);
        i = p;
    }
}

void Solver::heap_sift_down(size_t i) {
    for (;;) {
        size_t l = 2 * i + 1, r = 2 * i + 2, best = i;
        if (l < heap_.size() && heap_less(heap_[l], heap_[best])) best = l;
        if (r < heap_.size() && heap_less(heap_[r], heap_[best])) best = r;
        if (best == i) return;
        std::swap(heap_pos_[heap_[i]], heap_pos_[heap_[best]]);
        std::swap(heap_[i], heap_[best]);
        i = best;
    }
}

int32_t Solver::heap_pop() {
    int32_t v = heap_[0];
    heap_pos_[v] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_sift_down(0);
    }
    return v;
}

void Solver::var_bump(int32_t v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (int32_t i = 1; i <= nvars_; i++) activity_[i] *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] != -1) heap_sift_up(heap_pos_[v]);
}

void Solver::var_decay() { var_inc_ *= (1.0 / 0.95); }

void Solver::cla_bump(Clause& c) {
    c.activity += cla_inc_;
    if (c.activity > 1e20) {
        for (auto& l : learnts_) l->activity *= 1e-20;
        cla_inc_ *= 1e-20;
    }
}

void Solver::cla_decay() { cla_inc_ *= (1.0 / 0.999); }

// -------------------------------------------------------------- clauses ----

void Solver::attach(Clause* c) {
    watches_[widx(~c->lits[0])].push_back(Watcher{c, c->lits[1]});
    watches_[widx(~c->lits[1])].push_back(Watcher{c, c->lits[0]});
}

void Solver::detach_all(const std::vector<Clause*>& dead) {
    if (dead.empty()) return;
    std::vector<Clause*> sorted = dead;
    std::sort(sorted.begin(), sorted.end());
    for (auto& wl : watches_) {
        wl.erase(std::remove_if(wl.begin(), wl.end(),
                                [&](const Watcher& w) {
                                    return std::binary_search(sorted.begin(), sorted.end(),
                                                              w.clause);
                                }),
                 wl.end());
    }
}

void Solver::add_clause(std::initializer_list<SatLit> lits) {
    add_clause(std::span<const SatLit>(lits.begin(), lits.size()));
}

void Solver::add_clause(std::span<const SatLit> lits) {
    if (decision_level() != 0) throw Error("add_clause outside root level");
    stats_.clauses_added++;
    if (!ok_) return;

    std::vector<SatLit> cl(lits.begin(), lits.end());
    for (SatLit l : cl)
        if (l.code == 0 || l.var() > nvars_)
            throw Error("add_clause: literal references unallocated variable");
    std::sort(cl.begin(), cl.end(),
              [](SatLit a, SatLit b) { return a.var() != b.var() ? a.var() < b.var() : a.code < b.code; });
    std::vector<SatLit> out;
    for (size_t i = 0; i < cl.size(); i++) {
        SatLit l = cl[i];
        if (!out.empty() && out.back() == l) continue;
        if (!out.empty() && out.back() == ~l) return; // tautology
        if (value(l) == 1 && level_[l.var()] == 0) return; // already satisfied at root
        if (value(l) == -1 && level_[l.var()] == 0) continue; // root-false literal drops
        out.push_back(l);
    }

    if (out.empty()) {
        ok_ = false;
        return;
    }
    if (out.size() == 1) {
        enqueue(out[0], nullptr);
        if (propagate() != nullptr) ok_ = false;
        return;
    }
    auto c = std::make_unique<Clause>();
    c->lits = std::move(out);
    attach(c.get());
    problem_.push_back(std::move(c));
}

// ---------------------------------------------------------- propagation ----

void Solver::enqueue(SatLit l, Clause* from) {
    assigns_[l.var()] = l.negated() ? -1 : 1;
    level_[l.var()] = decision_level();
    reason_[l.var()] = from;
    trail_.push_back(l);
}

Solver::Clause* Solver::propagate() {
    while (qhead_ < trail_.size()) {
        SatLit p = trail_[qhead_++];
        stats_.propagations++;
        std::vector<Watcher>& wl = watches_[widx(p)];
        size_t i = 0, j = 0;
        Clause* confl = nullptr;
        while (i < wl.size()) {
            Watcher w = wl[i];
            if (value(w.blocker) == 1) { // clause already satisfied
                wl[j++] = wl[i++];
                continue;
            }
            Clause& c = *w.clause;
            // normalize: c.lits[1] is the falsified watch (~p)
            if (c.lits[0] == ~p) std::swap(c.lits[0], c.lits[1]);
            SatLit first = c.lits[0];
            if (value(first) == 1) {
                wl[j++] = Watcher{w.clause, first};
                i++;
                continue;
            }
            bool moved = false;
            for (size_t k = 2; k < c.lits.size(); k++) {
                if (value(c.lits[k]) != -1) {
                    std::swap(c.lits[1], c.lits[k]);
                    watches_[widx(~c.lits[1])].push_back(Watcher{w.clause, first});
                    moved = true;
                    break;
                }
            }
            if (moved) {
                i++;
                continue;
            }
            // unit or conflicting
            wl[j++] = wl[i++];
            if (value(first) == -1) {
                confl = w.clause;
                qhead_ = trail_.size();
                while (i < wl.size()) wl[j++] = wl[i++];
            } else {
                enqueue(first, w.clause);
            }
        }
        wl.resize(j);
        if (confl) return confl;
    }
    return nullptr;
}

// ------------------------------------------------------------- analysis ----

void Solver::analyze(Clause* confl, std::vector<SatLit>& learnt, int& bt_level) {
    learnt.clear();
    learnt.push_back(SatLit{0}); // room for the asserting literal
    int counter = 0;
    SatLit p{0};
    size_t index = trail_.size();

    do {
        if (confl->learnt) cla_bump(*confl);
        for (size_t k = (p.code == 0 ? 0 : 1); k < confl->lits.size(); k++) {
            SatLit q = confl->lits[k];
            int32_t v = q.var();
            if (!seen_[v] && level_[v] > 0) {
                seen_[v] = 1;
                var_bump(v);
                if (level_[v] >= decision_level())
                    counter++;
                else
                    learnt.push_back(q);
            }
        }
        // pick next literal on the trail to resolve on
        while (!seen_[trail_[index - 1].var()]) index--;
        p = trail_[--index];
        confl = reason_[p.var()];
        seen_[p.var()] = 0;
        counter--;
    } while (counter > 0);
    learnt[0] = ~p;

    // basic minimization: drop literals whose reason is fully covered
    analyze_clear_.clear();
    for (SatLit l : learnt) analyze_clear_.push_back(l.var());
    size_t jj = 1;
    for (size_t ii = 1; ii < learnt.size(); ii++) {
        int32_t v = learnt[ii].var();
        Clause* r = reason_[v];
        bool redundant = false;
        if (r != nullptr) {
            redundant = true;
            for (SatLit q : r->lits) {
                if (q.var() == v) continue;
                if (!seen_[q.var()] && level_[q.var()] > 0) {
                    redundant = false;
                    break;
                }
            }
        }
        if (!redundant) learnt[jj++] = learnt[ii];
    }
    learnt.resize(jj);

    // backtrack level = second-highest decision level in the clause
    if (learnt.size() == 1) {
        bt_level = 0;
    } else {
        size_t max_i = 1;
        for (size_t k = 2; k < learnt.size(); k++)
            if (level_[learnt[k].var()] > level_[learnt[max_i].var()]) max_i = k;
        std::swap(learnt[1], learnt[max_i]);
        bt_level = level_[learnt[1].var()];
    }

    for (int32_t v : analyze_clear_) seen_[v] = 0;
}

void Solver::cancel_until(int level) {
    if (decision_level() <= level) return;
    size_t lim = trail_lim_[level];
    for (size_t i = trail_.size(); i-- > lim;) {
        SatLit l = trail_[i];
        int32_t v = l.var();
        assigns_[v] = 0;
        reason_[v] = nullptr;
        polarity_[v] = l.negated() ? 0 : 1; // phase saving
        heap_insert(v);
    }
    trail_.resize(lim);
    trail_lim_.resize(level);
    qhead_ = trail_.size();
}

SatLit Solver::pick_branch() {
    while (!heap_.empty()) {
        int32_t v = heap_pop();
        if (assigns_[v] == 0) return polarity_[v] ? SatLit{v} : SatLit{-v};
    }
    return SatLit{0};
}

// --------------------------------------------------------------- search ----

namespace {
// Luby restart sequence (finite-subsequence scheme).
double luby(double y, int x) {
    int size, seq;
    for (size = 1, seq = 0; size < x + 1; seq++, size = 2 * size + 1) {}
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        seq--;
        x = x % size;
    }
    double r = 1;
    for (int i = 0; i < seq; i++) r *= y;
    return r;
}
} // namespace

// Returns +1 SAT, -1 UNSAT, 0 restart budget exhausted.
int Solver::search(int64_t conflict_budget, std::span<const SatLit> assumptions) {
    int64_t conflicts_here = 0;
    std::vector<SatLit> learnt;

    for (;;) {
        Clause* confl = propagate();
        if (confl != nullptr) {
            stats_.conflicts++;
            conflicts_here++;
            if (decision_level() == 0) {
                ok_ = false;
                return -1;
            }
            int bt;
            analyze(confl, learnt, bt);
            cancel_until(bt);
            if (learnt.size() == 1) {
                enqueue(learnt[0], nullptr);
            } else {
                auto c = std::make_unique<Clause>();
                c->learnt = true;
                c->lits = learnt;
                cla_bump(*c);
                attach(c.get());
                enqueue(learnt[0], c.get());
                learnts_.push_back(std::move(c));
                stats_.learnt_clauses++;
            }
            var_decay();
            cla_decay();
            continue;
        }

        if (conflicts_here >= conflict_budget) {
            cancel_until(0);
            stats_.restarts++;
            return 0;
        }
        if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >=
            max_learnts_)
            reduce_db();

        SatLit next{0};
        while (decision_level() < static_cast<int>(assumptions.size())) {
            SatLit a = assumptions[decision_level()];
            if (value(a) == 1) {
                new_decision_level(); // already satisfied; dummy level keeps indices aligned
            } else if (value(a) == -1) {
                return -1; // falsified assumption: UNSAT under assumptions
            } else {
                next = a;
                break;
            }
        }
        if (next.code == 0) {
            next = pick_branch();
            if (next.code == 0) return +1; // all variables assigned
            stats_.decisions++;
        }
        new_decision_level();
        enqueue(next, nullptr);
    }
}

void Solver::reduce_db() {
    std::vector<Clause*> order;
    order.reserve(learnts_.size());
    for (auto& c : learnts_) order.push_back(c.get());
    std::stable_sort(order.begin(), order.end(), [](Clause* a, Clause* b) {
        if ((a->lits.size() > 2) != (b->lits.size() > 2)) return a->lits.size() > 2;
        return a->activity < b->activity;
    });
    std::vector<Clause*> dead;
    size_t target = learnts_.size() / 2;
    for (Clause* c : order) {
        if (dead.size() >= target) break;
        if (c->lits.size() <= 2) continue;
        bool locked = false;
        for (SatLit l : c->lits)
            if (value(l) == 1 && reason_[l.var()] == c) {
                locked = true;
                break;
            }
        if (!locked) dead.push_back(c);
    }
    if (dead.empty()) {
        max_learnts_ = max_learnts_ * 1.5 + 100;
        return;
    }
    detach_all(dead);
    std::vector<Clause*> sorted = dead;
    std::sort(sorted.begin(), sorted.end());
    learnts_.erase(std::remove_if(learnts_.begin(), learnts_.end(),
                                  [&](const std::unique_ptr<Clause>& c) {
                                      return std::binary_search(sorted.begin(), sorted.end(),
                                                                c.get());
                                  }),
                   learnts_.end());
    stats_.deleted_clauses += dead.size();
    max_learnts_ = max_learnts_ * 1.1 + 100;
}

SolveStatus Solver::solve(std::initializer_list<SatLit> assumptions) {
    return solve(std::span<const SatLit>(assumptions.begin(), assumptions.size()));
}

SolveStatus Solver::solve(std::span<const SatLit> assumptions) {
    stats_.solves++;
    for (SatLit a : assumptions)
        if (a.code == 0 || a.var() > nvars_)
            throw Error("solve: assumption references unallocated variable");

    SolveStatus result = SolveStatus::Unsat;
    if (!ok_) {
        if (!diff_cmd_.empty()) run_differential(assumptions, result);
        return result;
    }
    if (max_learnts_ < 1) max_learnts_ = std::max<double>(1000.0, stats_.clauses_added * 0.5);

    int verdict = 0;
    for (int restarts = 0; verdict == 0; restarts++) {
        int64_t budget = static_cast<int64_t>(luby(2.0, restarts) * 100.0);
        verdict = search(budget, assumptions);
        if (!ok_) { verdict = -1; break; }
    }

    if (verdict > 0) {
        result = SolveStatus::Sat;
        for (int32_t v = 1; v <= nvars_; v++) model_[v] = assigns_[v] == 1 ? 1 : 0;
    }
    cancel_until(0);
    if (!diff_cmd_.empty()) run_differential(assumptions, result);
    return result;
}

bool Solver::model_value(SatLit l) const {
    bool b = model_[l.var()] != 0;
    return l.negated() ? !b : b;
}

// ------------------------------------------------------------ observers ----

int64_t Solver::live_clause_count() const {
    size_t root_trail = trail_lim_.empty() ? trail_.size() : trail_lim_[0];
    if (live_cache_ >= 0 && live_cache_clauses_ == problem_.size() &&
        live_cache_trail_ == root_trail)
        return live_cache_;
    int64_t n = 0;
    for (const auto& c : problem_) {
        bool sat_at_root = false;
        for (SatLit l : c->lits)
            if (value(l) == 1 && level_[l.var()] == 0) {
                sat_at_root = true;
                break;
            }
        if (!sat_at_root) n++;
    }
    live_cache_ = n;
    live_cache_clauses_ = problem_.size();
    live_cache_trail_ = root_trail;
    return n;
}

std::string Solver::export_dimacs(std::span<const SatLit> assumptions) const {
    std::ostringstream body;
    int64_t nclauses = 0;
    if (!ok_) {
        body << "0\n"; // empty clause: database is contradictory
        nclauses++;
    } else {
        for (SatLit l : trail_) {
            if (level_[l.var()] != 0) break;
            body << l.code << " 0\n";
            nclauses++;
        }
        for (const auto& c : problem_) {
            bool sat_at_root = false;
            for (SatLit l : c->lits)
                if (value(l) == 1 && level_[l.var()] == 0) {
                    sat_at_root = true;
                    break;
                }
            if (sat_at_root) continue;
            for (SatLit l : c->lits) body << l.code << " ";
            body << "0\n";
            nclauses++;
        }
    }
    for (SatLit a : assumptions) {
        body << a.code << " 0\n";
        nclauses++;
    }
    std::ostringstream out;
    out << "p cnf " << nvars_ << " " << nclauses << "\n" << body.str();
    return out.str();
}

void Solver::run_differential(std::span<const SatLit> assumptions, SolveStatus mine) const {
    std::string cnf = export_dimacs(assumptions);
    char path[] = "/tmp/exsim_diff_XXXXXX";
    int fd = mkstemp(path);
    if (fd < 0) throw Error("differential solve: cannot create temp file");
    close(fd);
    {
        std::ofstream f(path);
        f << cnf;
    }
    std::string cmd = diff_cmd_ + " " + path + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw Error("differential solve: cannot run '" + diff_cmd_ + "'");
    std::string output;
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe)) output += buf;
    pclose(pipe);
    std::remove(path);

    bool ext_sat = output.find("s SATISFIABLE") != std::string::npos;
    bool ext_unsat = output.find("s UNSATISFIABLE") != std::string::npos;
    if (!ext_sat && !ext_unsat)
        throw Error("differential solve: no verdict from '" + diff_cmd_ + "'");
    bool mine_sat = mine == SolveStatus::Sat;
    if (mine_sat != ext_sat)
        throw Error(std::string("differential solve: verdict mismatch (internal ") +
                    (mine_sat ? "SAT" : "UNSAT") + ", external " +
                    (ext_sat ? "SAT" : "UNSAT") + ")");
}

} // namespace exsim

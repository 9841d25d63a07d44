// SPDX-License-Identifier: Apache-2.0
// Incremental CNF database and CDCL solver.
//
// Clauses persist across solve calls; per-call assumptions are enqueued as
// scoped decisions and leave no trace. Conflict analysis learns first-UIP
// clauses under two-watched-literal propagation, with activity-ordered
// decisions, phase saving and Luby restarts.
//
// A Solver belongs to one logical thread at a time; independent handles may
// run in parallel.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "exsim/error.hpp"

namespace exsim {

// DIMACS-style literal: variable is a positive integer, negative code = negated.
struct SatLit {
    int32_t code = 0;

    SatLit() = default;
    constexpr explicit SatLit(int32_t c) : code(c) {}
    constexpr int32_t var() const { return code < 0 ? -code : code; }
    constexpr bool negated() const { return code < 0; }
    constexpr SatLit operator~() const { return SatLit{-code}; }
    constexpr SatLit operator^(bool flip) const { return flip ? ~*this : *this; }
    bool operator==(const SatLit&) const = default;
    auto operator<=>(const SatLit&) const = default;
};

enum class SolveStatus : uint8_t { Sat, Unsat };

struct SolverStats {
    uint64_t solves = 0;
    uint64_t decisions = 0;
    uint64_t propagations = 0;
    uint64_t conflicts = 0;
    uint64_t restarts = 0;
    uint64_t clauses_added = 0; // problem clauses submitted via add_clause
    uint64_t learnt_clauses = 0;
    uint64_t deleted_clauses = 0;
};

class Solver {
public:
    Solver();
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    SatLit new_var();
    int32_t num_vars() const { return nvars_; }

    // Root-level simplification applies: duplicate and root-false literals are
    // dropped, tautologies and root-satisfied clauses are discarded. An empty
    // clause makes every later solve UNSAT.
    void add_clause(std::span<const SatLit> lits);
    void add_clause(std::initializer_list<SatLit> lits);
    void add_unit(SatLit l) { add_clause({&l, 1}); }

    SolveStatus solve(std::span<const SatLit> assumptions = {});
    SolveStatus solve(std::initializer_list<SatLit> assumptions);

    // Valid after a Sat result; defined for every allocated variable.
    bool model_value(SatLit l) const;

    // Problem clauses not yet satisfied by the root-level assignment: the
    // policy observable. Cached; recounted only when the database or the
    // root trail changed.
    int64_t live_clause_count() const;

    // `p cnf` text of the current database (root units + live clauses) with
    // assumptions appended as unit clauses.
    std::string export_dimacs(std::span<const SatLit> assumptions = {}) const;

    bool ok() const { return ok_; }
    const SolverStats& stats() const { return stats_; }

    // When set (or when EXSIM_DIMACS_SOLVER is in the environment), every
    // solve also runs `<cmd> <cnf-file>` on the exported instance and aborts
    // if the verdicts disagree.
    void set_differential_command(std::string cmd) { diff_cmd_ = std::move(cmd); }

private:
    struct Clause;
    struct Watcher;

    int widx(SatLit l) const { return 2 * (l.var() - 1) + (l.negated() ? 1 : 0); }
    int8_t value(SatLit l) const;
    void enqueue(SatLit l, Clause* from);
    Clause* propagate();
    void analyze(Clause* confl, std::vector<SatLit>& learnt, int& bt_level);
    void cancel_until(int level);
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }
    void new_decision_level() { trail_lim_.push_back(trail_.size()); }
    SatLit pick_branch();
    void var_bump(int32_t v);
    void var_decay();
    void cla_bump(Clause& c);
    void cla_decay();
    void reduce_db();
    void attach(Clause* c);
    void detach_all(const std::vector<Clause*>& dead);
    int search(int64_t conflict_budget, std::span<const SatLit> assumptions);
    void heap_insert(int32_t v);
    int32_t heap_pop();
    void heap_sift_up(size_t i);
    void heap_sift_down(size_t i);
    bool heap_less(int32_t a, int32_t b) const;
    void run_differential(std::span<const SatLit> assumptions, SolveStatus mine) const;

    int32_t nvars_ = 0;
    bool ok_ = true;

    std::vector<std::unique_ptr<Clause>> problem_;
    std::vector<std::unique_ptr<Clause>> learnts_;
    std::vector<std::vector<Watcher>> watches_; // by watch index
    std::vector<int8_t> assigns_;               // by var: 0 undef, 1 true, -1 false
    std::vector<int32_t> level_;                // by var
    std::vector<Clause*> reason_;               // by var
    std::vector<SatLit> trail_;
    std::vector<size_t> trail_lim_;
    size_t qhead_ = 0;

    std::vector<double> activity_; // by var
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    std::vector<uint8_t> polarity_; // saved phase, by var
    std::vector<int32_t> heap_;
    std::vector<int32_t> heap_pos_; // by var, -1 = absent

    std::vector<uint8_t> seen_; // analyze scratch, by var
    std::vector<SatLit> analyze_stack_;
    std::vector<int32_t> analyze_clear_;

    std::vector<uint8_t> model_; // by var, valid after Sat
    double max_learnts_ = 0;

    mutable int64_t live_cache_ = -1;
    mutable size_t live_cache_clauses_ = 0;
    mutable size_t live_cache_trail_ = 0;

    SolverStats stats_;
    std::string diff_cmd_;
};

} // namespace exsim

// SPDX-License-Identifier: Apache-2.0
// The check engine: input tagging, windowed frame encoding and the
// step-fail / step-free / check-fails loop under a pluggable policy.
//
// A run walks a recorded waveform. Registers are seeded from the wave at the
// start cycle; fail cones are encoded frame by frame at the top of the window
// (step-fail) while the bottom is retired by binding free inputs to concrete
// values (step-free). Every SAT answer is replayed through concrete simulation
// before it is reported.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exsim/aig.hpp"
#include "exsim/encode.hpp"
#include "exsim/sat.hpp"
#include "exsim/vcd.hpp"

namespace exsim {

enum class Tag : uint8_t { Wave, Rand, Free };

struct FailTarget {
    std::string signal;
    uint32_t bit = 0;
    AigLit lit;
};

struct TagMap {
    std::vector<Tag> input_tags; // by input ordinal
    std::vector<FailTarget> fail_set;
};

struct TagOverrides {
    std::vector<std::string> free_names;
    std::vector<std::string> wave_names;
    std::vector<std::string> rand_names;
    std::vector<std::string> fail_names;
};

// Default discipline: explicit overrides first; then names matching free_*
// become Free; inputs recorded X-free in the wave follow the wave; the rest
// take seeded random values. Fail targets default to signals named fail_*.
// An empty fail set is a configuration error.
TagMap default_tagging(const Aignet& g, const WaveDb& wave, const TagOverrides& overrides);

struct RunConfig {
    int64_t start_cycle = 1;
    int64_t max_cycle = -1; // -1: last recorded wave cycle
    int64_t clause_hi = 10000;
    int64_t clause_lo = 1000;
    int64_t check_period = 1; // pending fail frames between solver checks
    uint64_t seed = 1;
    bool stop_on_first_fail = true;
    std::string policy = "default";
    std::string cex_dir;    // when set, counterexample VCDs are written here
    std::string dimacs_dir; // when set, every check dumps its DIMACS instance
};

struct PolicyObservables {
    int64_t live_clauses = 0;
    int64_t t_min = 0;
    int64_t t_max = 0;
    int64_t pending_count = 0;
    int64_t max_cycle = 0;
    int64_t clause_hi = 0;
    int64_t clause_lo = 0;
    int64_t check_period = 0;
};

enum class Action : uint8_t { StepFail, StepFree, CheckFails, Done };

const char* action_name(Action a);

// Policies are pure functions of the observables; registered ones are
// selectable by name through RunConfig::policy.
using PolicyFn = Action (*)(const PolicyObservables&);
Action default_policy(const PolicyObservables& obs);
void register_policy(const std::string& name, PolicyFn fn);
PolicyFn lookup_policy(const std::string& name);
std::vector<std::string> policy_names();

struct FailReport {
    std::string signal;
    uint32_t bit = 0;
    int64_t cycle = 0;
    SolveStatus status = SolveStatus::Unsat;
    bool replay_validated = false;
    // (input ordinal, cycle) -> bit for every Free leaf in scope of the check
    std::map<std::pair<uint32_t, int64_t>, bool> counterexample;
    WaveDb cex_wave;      // stimulus plus simulated state trace (SAT only)
    std::string cex_path; // set when written to disk
};

struct RunStats {
    int64_t frames_encoded = 0;
    int64_t checks_sat = 0;
    int64_t checks_unsat = 0;
    int64_t free_vars_created = 0;
    int64_t free_vars_bound = 0;
    uint64_t solves = 0;
    uint64_t conflicts = 0;
    uint64_t decisions = 0;
    uint64_t propagations = 0;
    uint64_t clauses_added = 0;
    uint64_t vars_allocated = 0;
};

struct RunReport {
    std::vector<FailReport> checks;
    RunStats stats;
    std::vector<std::string> cex_paths;
    bool stopped_on_fail = false;
};

std::string report_to_text(const RunReport& r);
std::string report_to_json(const RunReport& r);

// LoopState: window bounds, frame map, pending fail literals and the solver.
class Run {
public:
    Run(const Aignet& g, const WaveDb& wave, TagMap tags, RunConfig cfg);

    void step_fail();
    void step_free();
    std::vector<FailReport> check_fails();

    PolicyObservables observables() const;
    int64_t t_min() const { return t_min_; }
    int64_t t_max() const { return t_max_; }
    int64_t pending_count() const { return static_cast<int64_t>(pending_.size()); }
    int64_t unbound_free_count() const { return unbound_free_; }
    const Solver& solver() const { return solver_; }
    Solver& solver() { return solver_; }
    const RunStats& stats() const { return stats_; }
    const std::vector<uint8_t>& initial_state() const { return initial_regs_; }
    // free variables still unbound at a cycle, as (input ordinal, solver literal)
    const std::vector<std::pair<uint32_t, SatLit>>* free_vars_at(int64_t cycle) const;

    RunStats final_stats() const;

private:
    struct Pending {
        size_t target = 0;
        int64_t cycle = 0;
        SatLit lit;
    };

    std::optional<bool> wave_bit(uint32_t ordinal, int64_t cycle) const; // nullopt: absent or X
    bool binding_value(uint32_t ordinal, int64_t cycle, uint32_t stream) const;
    std::optional<bool> input_leaf(uint32_t ordinal, int64_t cycle, SatLit lit);
    FailReport make_report(const Pending& p, SolveStatus st);
    void replay_and_validate(FailReport& r);

    const Aignet& g_;
    const WaveDb& wave_;
    TagMap tags_;
    RunConfig cfg_;

    Solver solver_;
    FrameMap fm_;
    ConeLeafRule leaf_rule_;
    int64_t t_min_ = 0;
    int64_t t_max_ = 0;
    std::vector<Pending> pending_;
    std::map<int64_t, std::vector<std::pair<uint32_t, SatLit>>> free_vars_;
    int64_t unbound_free_ = 0;
    std::vector<uint8_t> initial_regs_;
    // every concrete input binding, recorded for replay: (ordinal, cycle) -> bit
    std::map<std::pair<uint32_t, int64_t>, bool> bound_inputs_;
    RunStats stats_;
};

// Runs policy-chosen actions until Done (or the first validated fail when
// configured); deterministic for fixed inputs, seed and policy. The observer,
// when provided, sees every executed action.
RunReport main_loop(const Aignet& g, const WaveDb& wave, const TagMap& tags,
                    const RunConfig& cfg, PolicyFn policy = nullptr,
                    const std::function<void(Action, const Run&)>& observer = {});

} // namespace exsim

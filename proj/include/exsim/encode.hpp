// SPDX-License-Identifier: Apache-2.0
// Frame-indexed Tseitin encoding of AIG cones into the incremental solver.
//
// The FrameMap is the bridge between graph literals and solver variables: one
// SAT variable per (node, cycle), complement folded into the literal sign.
// Registers at cycle c recurse into their next-state literal at cycle c-1 and
// bottom out at the window start, where they take recorded initial values.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>

#include "exsim/aig.hpp"
#include "exsim/sat.hpp"

namespace exsim {

class FrameMap {
public:
    // Mapping for a node's positive literal at a cycle; negation is applied by
    // the caller via lit.negated().
    std::optional<SatLit> lookup(uint32_t node, int64_t cycle) const {
        auto it = map_.find(key(node, cycle));
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }
    void insert(uint32_t node, int64_t cycle, SatLit l) {
        map_.emplace(key(node, cycle), l);
        inverse_.emplace(l.var(), std::make_pair(node, cycle));
    }
    // Inverse direction, for model decoding and diagnostics. Aliased entries
    // (registers forwarding to their next-state cone) resolve to the variable's
    // defining (node, cycle).
    std::optional<std::pair<uint32_t, int64_t>> lookup_var(int32_t var) const {
        auto it = inverse_.find(var);
        if (it == inverse_.end()) return std::nullopt;
        return it->second;
    }
    size_t size() const { return map_.size(); }

private:
    static uint64_t key(uint32_t node, int64_t cycle) {
        return (static_cast<uint64_t>(cycle) << 30) ^ node;
    }
    std::unordered_map<uint64_t, SatLit> map_;
    std::unordered_map<int32_t, std::pair<uint32_t, int64_t>> inverse_;
};

// How cone encoding treats the sequential boundary and input leaves.
struct ConeLeafRule {
    int64_t window_start = 0;

    // Called once per (input ordinal, cycle) when the cone reaches an input
    // leaf; `lit` is the freshly allocated positive solver literal. Return a
    // bit to pin the leaf with a unit clause, or nullopt to leave it free.
    std::function<std::optional<bool>(uint32_t ordinal, int64_t cycle, SatLit lit)> input_rule;

    // Recorded initial value of a register at the window start cycle.
    std::function<bool(uint32_t ordinal)> initial_state;
};

// Encodes the cone of `lit` at `cycle`, memoized on the frame map: mapped
// (node, cycle) pairs add no clauses. And gates emit the three implication
// clauses; constant and initial-state leaves emit unit clauses. Throws
// EngineError if a register recursion would cross below the window start.
SatLit encode_cone(Solver& solver, FrameMap& fm, const Aignet& g, AigLit lit, int64_t cycle,
                   const ConeLeafRule& rule);

} // namespace exsim

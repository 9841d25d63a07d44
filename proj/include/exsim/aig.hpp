// SPDX-License-Identifier: Apache-2.0
// And-inverter graph with registers: the circuit IR every other stage works on.
//
// Nodes are appended in topological order; inverters live on edges as the low
// bit of a packed literal. Node 0 is the constant-FALSE node, so literal 0 is
// FALSE and literal 1 is TRUE. Construction applies constant folding and
// structural hashing; a sealed graph is immutable and safe to read from any
// number of threads. Construction itself is single-threaded.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "exsim/error.hpp"

namespace exsim {

// Packed literal: 2*node + negated.
struct AigLit {
    uint32_t code = 0;

    static constexpr AigLit make(uint32_t node, bool neg) {
        return AigLit{node * 2 + (neg ? 1u : 0u)};
    }
    constexpr uint32_t node() const { return code >> 1; }
    constexpr bool negated() const { return code & 1u; }
    constexpr AigLit operator~() const { return AigLit{code ^ 1u}; }
    constexpr AigLit operator^(bool flip) const { return AigLit{code ^ (flip ? 1u : 0u)}; }
    constexpr bool is_const() const { return node() == 0; }
    auto operator<=>(const AigLit&) const = default;
};

inline constexpr AigLit aig_false{0};
inline constexpr AigLit aig_true{1};

enum class NodeKind : uint8_t { ConstFalse, Input, Register, And };

struct AigNode {
    NodeKind kind = NodeKind::ConstFalse;
    AigLit fanin0;        // And only
    AigLit fanin1;        // And only
    uint32_t ordinal = 0; // index within its kind (Input/Register)
};

// Where a named bit came from: signal name plus bit index within the vector.
struct BitRef {
    std::string signal;
    uint32_t bit = 0;
    std::string pretty() const { return signal + "[" + std::to_string(bit) + "]"; }
};

struct SimState {
    std::vector<uint8_t> regs; // one bit per register, by ordinal
    uint64_t time = 0;         // clock-cycle ordinal
};

class Aignet {
public:
    Aignet();

    // --- construction (pre-seal only) ---
    std::vector<AigLit> add_input(const std::string& name, uint32_t width);
    std::vector<AigLit> add_register(const std::string& name, uint32_t width);
    void set_next_state(AigLit reg_lit, AigLit next);

    AigLit mk_and(AigLit a, AigLit b);
    AigLit mk_or(AigLit a, AigLit b);
    AigLit mk_xor(AigLit a, AigLit b);
    AigLit mk_mux(AigLit sel, AigLit t, AigLit e);

    // Bind a name to already-built literals (derived signals, aliases).
    void name_signal(const std::string& name, std::vector<AigLit> bits);
    void add_output(const std::string& name, std::vector<AigLit> bits);

    // Checks every register has a next-state, then freezes the graph.
    void seal();
    bool sealed() const { return sealed_; }

    // --- introspection ---
    size_t node_count() const { return nodes_.size(); }
    size_t input_count() const { return inputs_.size(); }
    size_t register_count() const { return registers_.size(); }
    size_t and_count() const { return and_count_; }
    const AigNode& node(uint32_t idx) const { return nodes_.at(idx); }

    uint32_t input_node(uint32_t ordinal) const { return inputs_.at(ordinal); }
    uint32_t register_node(uint32_t ordinal) const { return registers_.at(ordinal); }
    AigLit register_next(uint32_t ordinal) const;
    const BitRef& input_ref(uint32_t ordinal) const { return input_refs_.at(ordinal); }
    const BitRef& register_ref(uint32_t ordinal) const { return register_refs_.at(ordinal); }

    const std::vector<std::pair<std::string, std::vector<AigLit>>>& outputs() const {
        return outputs_;
    }
    // Ordered list of (name, bits LSB-first); lookup returns nullptr when absent.
    const std::vector<std::pair<std::string, std::vector<AigLit>>>& signals() const {
        return signal_list_;
    }
    const std::vector<AigLit>* lookup(const std::string& name) const;

    // --- evaluation ---
    // Value of every node under the standard AND/negation semantics.
    std::vector<uint8_t> eval_comb(std::span<const uint8_t> input_bits,
                                   std::span<const uint8_t> register_bits) const;
    static bool eval_lit(const std::vector<uint8_t>& node_values, AigLit lit) {
        return node_values[lit.node()] ^ (lit.negated() ? 1 : 0);
    }

    struct StepResult {
        std::vector<uint8_t> outputs; // flattened: outputs() order, bits LSB-first
        SimState next;
    };
    StepResult sim_step(const SimState& state, std::span<const uint8_t> input_bits) const;

    // Walks the graph and throws if topological order or hashing invariants broke.
    void check_invariants() const;

private:
    AigLit append_and(AigLit f0, AigLit f1);
    void require_unsealed(const char* what) const;
    void require_lit(AigLit l, const char* what) const;

    std::vector<AigNode> nodes_;
    std::vector<uint32_t> inputs_;    // ordinal -> node index
    std::vector<uint32_t> registers_; // ordinal -> node index
    std::vector<BitRef> input_refs_;
    std::vector<BitRef> register_refs_;
    std::vector<std::optional<AigLit>> next_state_;
    std::vector<std::pair<std::string, std::vector<AigLit>>> outputs_;
    std::vector<std::pair<std::string, std::vector<AigLit>>> signal_list_;
    std::unordered_map<std::string, size_t> signal_index_;
    std::unordered_map<uint64_t, uint32_t> strash_; // (fanin0,fanin1) -> node
    size_t and_count_ = 0;
    bool sealed_ = false;
};

} // namespace exsim

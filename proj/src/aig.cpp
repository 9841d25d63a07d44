// SPDX-License-Identifier: Apache-2.0

#include "exsim/aig.hpp"

#include <algorithm>

namespace exsim {

Aignet::Aignet() {
    nodes_.push_back(AigNode{NodeKind::ConstFalse, aig_false, aig_false, 0});
}

void Aignet::require_unsealed(const char* what) const {
    if (sealed_) throw BuildError(std::string(what) + ": graph is sealed");
}

void Aignet::require_lit(AigLit l, const char* what) const {
    if (l.node() >= nodes_.size())
        throw BuildError(std::string(what) + ": literal references nonexistent node " +
                         std::to_string(l.node()));
}

std::vector<AigLit> Aignet::add_input(const std::string& name, uint32_t width) {
    require_unsealed("add_input");
    if (width == 0) throw BuildError("add_input: zero width for '" + name + "'");
    if (signal_index_.count(name)) throw BuildError("duplicate signal name '" + name + "'");
    std::vector<AigLit> bits;
    for (uint32_t b = 0; b < width; b++) {
        uint32_t idx = static_cast<uint32_t>(nodes_.size());
        nodes_.push_back(AigNode{NodeKind::Input, aig_false, aig_false,
                                 static_cast<uint32_t>(inputs_.size())});
        inputs_.push_back(idx);
        input_refs_.push_back(BitRef{name, b});
        bits.push_back(AigLit::make(idx, false));
    }
    name_signal(name, bits);
    return bits;
}

std::vector<AigLit> Aignet::add_register(const std::string& name, uint32_t width) {
    require_unsealed("add_register");
    if (width == 0) throw BuildError("add_register: zero width for '" + name + "'");
    if (signal_index_.count(name)) throw BuildError("duplicate signal name '" + name + "'");
    std::vector<AigLit> bits;
    for (uint32_t b = 0; b < width; b++) {
        uint32_t idx = static_cast<uint32_t>(nodes_.size());
        nodes_.push_back(AigNode{NodeKind::Register, aig_false, aig_false,
                                 static_cast<uint32_t>(registers_.size())});
        registers_.push_back(idx);
        register_refs_.push_back(BitRef{name, b});
        next_state_.push_back(std::nullopt);
        bits.push_back(AigLit::make(idx, false));
    }
    name_signal(name, bits);
    return bits;
}

void Aignet::set_next_state(AigLit reg_lit, AigLit next) {
    require_unsealed("set_next_state");
    require_lit(reg_lit, "set_next_state");
    require_lit(next, "set_next_state");
    const AigNode& n = nodes_[reg_lit.node()];
    if (n.kind != NodeKind::Register)
        throw BuildError("set_next_state: literal is not a register");
    if (reg_lit.negated())
        throw BuildError("set_next_state: register literal must not be negated");
    if (next_state_[n.ordinal].has_value())
        throw BuildError("set_next_state: next-state already set for " +
                         register_refs_[n.ordinal].pretty());
    next_state_[n.ordinal] = next;
}

AigLit Aignet::register_next(uint32_t ordinal) const {
    const auto& ns = next_state_.at(ordinal);
    if (!ns) throw BuildError("register_next: next-state unset for " +
                              register_refs_.at(ordinal).pretty());
    return *ns;
}

AigLit Aignet::append_and(AigLit f0, AigLit f1) {
    uint64_t key = (static_cast<uint64_t>(f0.code) << 32) | f1.code;
    auto it = strash_.find(key);
    if (it != strash_.end()) return AigLit::make(it->second, false);
    uint32_t idx = static_cast<uint32_t>(nodes_.size());
    nodes_.push_back(AigNode{NodeKind::And, f0, f1, 0});
    and_count_++;
    strash_.emplace(key, idx);
    return AigLit::make(idx, false);
}

AigLit Aignet::mk_and(AigLit a, AigLit b) {
    require_unsealed("mk_and");
    require_lit(a, "mk_and");
    require_lit(b, "mk_and");
    if (a == aig_false || b == aig_false) return aig_false;
    if (a == aig_true) return b;
    if (b == aig_true) return a;
    if (a == b) return a;
    if (a == ~b) return aig_false;
    if (b.code < a.code) std::swap(a, b);
    return append_and(a, b);
}

AigLit Aignet::mk_or(AigLit a, AigLit b) { return ~mk_and(~a, ~b); }

AigLit Aignet::mk_xor(AigLit a, AigLit b) {
    return ~mk_and(~mk_and(a, ~b), ~mk_and(~a, b));
}

AigLit Aignet::mk_mux(AigLit sel, AigLit t, AigLit e) {
    return mk_or(mk_and(sel, t), mk_and(~sel, e));
}

void Aignet::name_signal(const std::string& name, std::vector<AigLit> bits) {
    require_unsealed("name_signal");
    if (signal_index_.count(name)) throw BuildError("duplicate signal name '" + name + "'");
    for (AigLit l : bits) require_lit(l, "name_signal");
    signal_index_.emplace(name, signal_list_.size());
    signal_list_.emplace_back(name, std::move(bits));
}

void Aignet::add_output(const std::string& name, std::vector<AigLit> bits) {
    require_unsealed("add_output");
    for (AigLit l : bits) require_lit(l, "add_output");
    if (!signal_index_.count(name)) name_signal(name, bits);
    outputs_.emplace_back(name, std::move(bits));
}

const std::vector<AigLit>* Aignet::lookup(const std::string& name) const {
    auto it = signal_index_.find(name);
    if (it == signal_index_.end()) return nullptr;
    return &signal_list_[it->second].second;
}

void Aignet::seal() {
    require_unsealed("seal");
    for (size_t i = 0; i < next_state_.size(); i++)
        if (!next_state_[i])
            throw BuildError("seal: register " + register_refs_[i].pretty() +
                             " has no next-state");
    sealed_ = true;
}

std::vector<uint8_t> Aignet::eval_comb(std::span<const uint8_t> input_bits,
                                       std::span<const uint8_t> register_bits) const {
    if (input_bits.size() != inputs_.size())
        throw BuildError("eval_comb: expected " + std::to_string(inputs_.size()) +
                         " input bits, got " + std::to_string(input_bits.size()));
    if (register_bits.size() != registers_.size())
        throw BuildError("eval_comb: expected " + std::to_string(registers_.size()) +
                         " register bits, got " + std::to_string(register_bits.size()));
    std::vector<uint8_t> val(nodes_.size(), 0);
    for (uint32_t i = 0; i < nodes_.size(); i++) {
        const AigNode& n = nodes_[i];
        switch (n.kind) {
        case NodeKind::ConstFalse: val[i] = 0; break;
        case NodeKind::Input: val[i] = input_bits[n.ordinal] ? 1 : 0; break;
        case NodeKind::Register: val[i] = register_bits[n.ordinal] ? 1 : 0; break;
        case NodeKind::And: {
            uint8_t a = val[n.fanin0.node()] ^ (n.fanin0.negated() ? 1 : 0);
            uint8_t b = val[n.fanin1.node()] ^ (n.fanin1.negated() ? 1 : 0);
            val[i] = a & b;
            break;
        }
        }
    }
    return val;
}

Aignet::StepResult Aignet::sim_step(const SimState& state,
                                    std::span<const uint8_t> input_bits) const {
    if (!sealed_) throw BuildError("sim_step: graph not sealed");
    if (state.regs.size() != registers_.size())
        throw BuildError("sim_step: register state length mismatch");
    std::vector<uint8_t> val = eval_comb(input_bits, state.regs);

    StepResult r;
    for (const auto& [name, bits] : outputs_)
        for (AigLit l : bits) r.outputs.push_back(eval_lit(val, l) ? 1 : 0);
    r.next.regs.resize(registers_.size());
    for (uint32_t i = 0; i < registers_.size(); i++)
        r.next.regs[i] = eval_lit(val, *next_state_[i]) ? 1 : 0;
    r.next.time = state.time + 1;
    return r;
}

void Aignet::check_invariants() const {
    if (nodes_.empty() || nodes_[0].kind != NodeKind::ConstFalse)
        throw BuildError("invariant: node 0 must be constant FALSE");
    std::unordered_map<uint64_t, uint32_t> seen;
    for (uint32_t i = 0; i < nodes_.size(); i++) {
        const AigNode& n = nodes_[i];
        if (n.kind != NodeKind::And) continue;
        if (n.fanin0.node() >= i || n.fanin1.node() >= i)
            throw BuildError("invariant: And node " + std::to_string(i) +
                             " has non-topological fanin");
        if (n.fanin0.code > n.fanin1.code)
            throw BuildError("invariant: And node " + std::to_string(i) +
                             " fanins not canonically ordered");
        uint64_t key = (static_cast<uint64_t>(n.fanin0.code) << 32) | n.fanin1.code;
        if (!seen.emplace(key, i).second)
            throw BuildError("invariant: duplicate And node for fanin pair at " +
                             std::to_string(i));
    }
    for (const auto& [name, bits] : signal_list_)
        for (AigLit l : bits)
            if (l.node() >= nodes_.size())
                throw BuildError("invariant: signal '" + name + "' references missing node");
}

} // namespace exsim

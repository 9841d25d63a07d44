// SPDX-License-Identifier: Apache-2.0

#include "exsim/encode.hpp"

#include <vector>

namespace exsim {

namespace {

struct Frame {
    uint32_t node;
    int64_t cycle;
    bool expanded;
};

} // namespace

SatLit encode_cone(Solver& solver, FrameMap& fm, const Aignet& g, AigLit lit, int64_t cycle,
                   const ConeLeafRule& rule) {
    if (!g.sealed()) throw EngineError("encode_cone: graph not sealed");
    if (lit.node() >= g.node_count()) throw EngineError("encode_cone: literal out of range");

    std::vector<Frame> stack;
    stack.push_back({lit.node(), cycle, false});

    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (fm.lookup(f.node, f.cycle)) continue;
        const AigNode& n = g.node(f.node);

        switch (n.kind) {
        case NodeKind::ConstFalse: {
            SatLit v = solver.new_var();
            solver.add_unit(~v);
            fm.insert(f.node, f.cycle, v);
            break;
        }
        case NodeKind::Input: {
            SatLit v = solver.new_var();
            std::optional<bool> pin = rule.input_rule(n.ordinal, f.cycle, v);
            fm.insert(f.node, f.cycle, v);
            if (pin) solver.add_unit(v ^ !*pin);
            break;
        }
        case NodeKind::Register: {
            if (f.cycle < rule.window_start)
                throw EngineError("encode_cone: register " + g.register_ref(n.ordinal).pretty() +
                                  " recursed below window start cycle " +
                                  std::to_string(rule.window_start));
            if (f.cycle == rule.window_start) {
                SatLit v = solver.new_var();
                fm.insert(f.node, f.cycle, v);
                solver.add_unit(v ^ !rule.initial_state(n.ordinal));
                break;
            }
            AigLit next = g.register_next(n.ordinal);
            auto sub = fm.lookup(next.node(), f.cycle - 1);
            if (!sub) {
                stack.push_back(f); // revisit once the next-state cone exists
                stack.push_back({next.node(), f.cycle - 1, false});
                break;
            }
            fm.insert(f.node, f.cycle, *sub ^ next.negated());
            break;
        }
        case NodeKind::And: {
            auto a = fm.lookup(n.fanin0.node(), f.cycle);
            auto b = fm.lookup(n.fanin1.node(), f.cycle);
            if (!a || !b) {
                if (f.expanded)
                    throw EngineError("encode_cone: internal traversal error"); // unreachable
                stack.push_back({f.node, f.cycle, true});
                if (!a) stack.push_back({n.fanin0.node(), f.cycle, false});
                if (!b) stack.push_back({n.fanin1.node(), f.cycle, false});
                break;
            }
            SatLit fa = *a ^ n.fanin0.negated();
            SatLit fb = *b ^ n.fanin1.negated();
            SatLit o = solver.new_var();
            solver.add_clause({~o, fa});
            solver.add_clause({~o, fb});
            solver.add_clause({o, ~fa, ~fb});
            fm.insert(f.node, f.cycle, o);
            break;
        }
        }
    }

    auto mapped = fm.lookup(lit.node(), cycle);
    return *mapped ^ lit.negated();
}

} // namespace exsim

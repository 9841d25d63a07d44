// SPDX-License-Identifier: Apache-2.0

#include "exsim/elaborate.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <vector>

namespace exsim {

namespace {

struct Inst;

struct Sig {
    uint32_t width = 1;
    enum class Drive { None, TopInput, Register, Comb, InPort, SubOutput, Clock };
    Drive drive = Drive::None;
    bool is_port = false;
    VPort::Dir port_dir = VPort::Dir::Input;
    const VExpr* comb_rhs = nullptr;
    const VExpr* conn_expr = nullptr; // InPort: expression in the parent scope
    Inst* sub = nullptr;              // SubOutput: child carrying the driver
    std::string sub_port;
    const VExpr* next_rhs = nullptr;  // Register
    int line = 0;

    enum class State { Unbuilt, Building, Built } state = State::Unbuilt;
    std::vector<AigLit> bits;
};

struct Inst {
    const VModule* mod = nullptr;
    std::string prefix; // "" for top, "des." for children
    Inst* parent = nullptr;
    std::map<std::string, Sig> sigs;
    std::vector<std::unique_ptr<Inst>> children;

    std::string path(const std::string& sig) const { return prefix + sig; }
};

struct Elaborator {
    const VDesign& design;
    Aignet g;
    std::string clock_name; // resolved top-level clock input
    std::vector<std::string> build_stack;

    explicit Elaborator(const VDesign& d) : design(d) {}

    [[noreturn]] void fail(const std::string& msg, int line = 0) const {
        if (line > 0) throw ElabError(msg + " (line " + std::to_string(line) + ")");
        throw ElabError(msg);
    }

    // ---- structure -------------------------------------------------------

    std::unique_ptr<Inst> instantiate(const VModule& mod, std::string prefix, Inst* parent,
                                      std::vector<std::string>& mod_stack) {
        if (std::find(mod_stack.begin(), mod_stack.end(), mod.name) != mod_stack.end())
            fail("recursive instantiation of module '" + mod.name + "'");
        mod_stack.push_back(mod.name);

        auto inst = std::make_unique<Inst>();
        inst->mod = &mod;
        inst->prefix = std::move(prefix);
        inst->parent = parent;

        for (const VPort& p : mod.ports) {
            Sig s;
            s.width = p.range ? p.range->width() : 1;
            s.is_port = true;
            s.port_dir = p.dir;
            s.line = p.line;
            if (!inst->sigs.emplace(p.name, std::move(s)).second)
                fail("duplicate port '" + p.name + "' in module '" + mod.name + "'", p.line);
        }
        for (const VDecl& d : mod.decls) {
            Sig s;
            s.width = d.range ? d.range->width() : 1;
            s.line = d.line;
            if (!inst->sigs.emplace(d.name, std::move(s)).second)
                fail("duplicate declaration of '" + d.name + "' in module '" + mod.name + "'",
                     d.line);
        }

        std::set<std::string> instance_names;
        for (const VInstance& vi : mod.instances) {
            const VModule* child_mod = design.find(vi.module_name);
            if (!child_mod)
                fail("unknown module '" + vi.module_name + "' instantiated as '" +
                         vi.instance_name + "'",
                     vi.line);
            if (inst->sigs.count(vi.instance_name))
                fail("instance name '" + vi.instance_name + "' collides with a signal", vi.line);
            if (!instance_names.insert(vi.instance_name).second)
                fail("duplicate instance name '" + vi.instance_name + "'", vi.line);
            auto child = instantiate(*child_mod, inst->prefix + vi.instance_name + ".",
                                     inst.get(), mod_stack);
            wire_instance(*inst, *child, vi);
            inst->children.push_back(std::move(child));
        }

        mod_stack.pop_back();
        return inst;
    }

    void wire_instance(Inst& parent, Inst& child, const VInstance& vi) {
        std::map<std::string, const VExpr*> conns;
        for (const auto& [port, expr] : vi.connections) {
            if (!child.sigs.count(port) || !child.sigs[port].is_port)
                fail("module '" + vi.module_name + "' has no port '" + port + "'", vi.line);
            if (conns.count(port)) fail("port '" + port + "' connected twice", vi.line);
            conns[port] = expr.get();
        }

        for (const VPort& p : child.mod->ports) {
            const VExpr* expr = nullptr;
            bool named = conns.count(p.name) > 0;
            if (named) expr = conns[p.name];
            if (!named && !vi.wildcard)
                fail("port '" + p.name + "' of instance '" + vi.instance_name +
                         "' is unconnected",
                     vi.line);

            Sig& ps = child.sigs[p.name];
            if (p.dir == VPort::Dir::Input) {
                if (named && !expr)
                    fail("input port '" + p.name + "' of instance '" + vi.instance_name +
                             "' is connected to nothing",
                         vi.line);
                ps.drive = Sig::Drive::InPort;
                ps.conn_expr = expr; // null means wildcard: same-named parent signal
            } else if (named && !expr) {
                // explicitly dangling output: child internals still elaborate
            } else {
                // output: the parent-side net aliases the child's driver
                std::string parent_name;
                if (expr) {
                    if (expr->kind != VExpr::Kind::Ident)
                        fail("output port '" + p.name +
                                 "' must be connected to a plain identifier",
                             vi.line);
                    parent_name = expr->name;
                } else {
                    parent_name = p.name;
                }
                auto it = parent.sigs.find(parent_name);
                if (it == parent.sigs.end())
                    fail("no signal '" + parent_name + "' for output port '" + p.name +
                             "' of instance '" + vi.instance_name + "'",
                         vi.line);
                Sig& out_sig = it->second;
                if (out_sig.drive != Sig::Drive::None)
                    fail("multiple drivers for '" + parent.path(parent_name) + "'", vi.line);
                if (out_sig.width != ps.width)
                    fail("width mismatch connecting port '" + p.name + "' of instance '" +
                             vi.instance_name + "'",
                         vi.line);
                out_sig.drive = Sig::Drive::SubOutput;
                out_sig.sub = &child;
                out_sig.sub_port = p.name;
            }
            if (!named && vi.wildcard && p.dir == VPort::Dir::Input &&
                !parent.sigs.count(p.name))
                fail("wildcard connection: no signal '" + p.name + "' in parent for instance '" +
                         vi.instance_name + "'",
                     vi.line);
        }
    }

    // ---- clock resolution --------------------------------------------------

    std::string resolve_clock(Inst& inst, const std::string& ident, int line) {
        auto it = inst.sigs.find(ident);
        if (it == inst.sigs.end())
            fail("clock '" + ident + "' is not declared in module '" + inst.mod->name + "'",
                 line);
        Sig& s = it->second;
        if (s.width != 1) fail("clock '" + inst.path(ident) + "' is not 1 bit wide", line);
        if (!inst.parent) {
            if (!s.is_port || s.port_dir != VPort::Dir::Input)
                fail("clock '" + ident + "' must be a top-level input", line);
            s.drive = Sig::Drive::Clock;
            return ident;
        }
        if (!s.is_port || s.port_dir != VPort::Dir::Input)
            fail("clock '" + inst.path(ident) + "' must reach a top-level input through ports",
                 line);
        const VExpr* conn = s.conn_expr;
        std::string parent_ident;
        if (conn == nullptr) {
            parent_ident = ident; // wildcard
        } else if (conn->kind == VExpr::Kind::Ident) {
            parent_ident = conn->name;
        } else {
            fail("clock port '" + inst.path(ident) + "' must be connected to a plain identifier",
                 line);
        }
        s.drive = Sig::Drive::Clock;
        return resolve_clock(*inst.parent, parent_ident, line);
    }

    void resolve_clocks(Inst& inst) {
        for (const VClockedAssign& ca : inst.mod->clocked) {
            std::string top_clk = resolve_clock(inst, ca.clock, ca.line);
            if (clock_name.empty())
                clock_name = top_clk;
            else if (clock_name != top_clk)
                fail("multiple clocks: '" + clock_name + "' and '" + top_clk + "'", ca.line);
        }
        for (auto& c : inst.children) resolve_clocks(*c);
    }

    // ---- drive classification ----------------------------------------------

    void classify(Inst& inst) {
        for (const VClockedAssign& ca : inst.mod->clocked) {
            auto it = inst.sigs.find(ca.lhs);
            if (it == inst.sigs.end())
                fail("assignment to undeclared signal '" + ca.lhs + "'", ca.line);
            Sig& s = it->second;
            if (s.drive == Sig::Drive::Clock) fail("clock '" + ca.lhs + "' cannot be assigned", ca.line);
            if (s.drive != Sig::Drive::None)
                fail("multiple drivers for '" + inst.path(ca.lhs) + "'", ca.line);
            s.drive = Sig::Drive::Register;
            s.next_rhs = ca.rhs.get();
        }
        for (const VAssign& a : inst.mod->assigns) {
            auto it = inst.sigs.find(a.lhs);
            if (it == inst.sigs.end())
                fail("assignment to undeclared signal '" + a.lhs + "'", a.line);
            Sig& s = it->second;
            if (s.drive == Sig::Drive::Clock) fail("clock '" + a.lhs + "' cannot be assigned", a.line);
            if (s.drive != Sig::Drive::None)
                fail("multiple drivers for '" + inst.path(a.lhs) + "'", a.line);
            s.drive = Sig::Drive::Comb;
            s.comb_rhs = a.rhs.get();
        }
        if (!inst.parent) {
            for (const VPort& p : inst.mod->ports) {
                Sig& s = inst.sigs[p.name];
                if (p.dir == VPort::Dir::Input) {
                    if (s.drive == Sig::Drive::Clock) continue;
                    if (s.drive != Sig::Drive::None)
                        fail("top-level input '" + p.name + "' is also driven internally",
                             s.line);
                    s.drive = Sig::Drive::TopInput;
                }
            }
        }
        for (auto& c : inst.children) classify(*c);
    }

    // ---- node creation -----------------------------------------------------

    void create_state(Inst& inst) {
        if (!inst.parent) {
            for (const VPort& p : inst.mod->ports) {
                Sig& s = inst.sigs[p.name];
                if (s.drive == Sig::Drive::TopInput) {
                    s.bits = g.add_input(p.name, s.width);
                    s.state = Sig::State::Built;
                }
            }
        }
        for (const VClockedAssign& ca : inst.mod->clocked) {
            Sig& s = inst.sigs[ca.lhs];
            if (s.state == Sig::State::Built) continue; // diagnosed as double drive already
            s.bits = g.add_register(inst.path(ca.lhs), s.width);
            s.state = Sig::State::Built;
        }
        for (auto& c : inst.children) create_state(*c);
    }

    // ---- expression building -----------------------------------------------

    uint32_t natural_width(Inst& inst, const VExpr& e) {
        switch (e.kind) {
        case VExpr::Kind::Const: return e.width;
        case VExpr::Kind::Ident: {
            auto it = inst.sigs.find(e.name);
            if (it == inst.sigs.end())
                fail("reference to undeclared signal '" + e.name + "'", e.line);
            return it->second.width;
        }
        case VExpr::Kind::Select: return 1;
        case VExpr::Kind::PartSelect:
            return static_cast<uint32_t>(e.sel_msb - e.sel_lsb + 1);
        case VExpr::Kind::Not: return natural_width(inst, *e.args[0]);
        case VExpr::Kind::RedAnd:
        case VExpr::Kind::RedOr: return 1;
        case VExpr::Kind::And:
        case VExpr::Kind::Or:
        case VExpr::Kind::Xor: {
            uint32_t a = natural_width(inst, *e.args[0]);
            uint32_t b = natural_width(inst, *e.args[1]);
            if (a == 0) return b;
            if (b == 0) return a;
            if (a != b)
                fail("width mismatch: operands are " + std::to_string(a) + " and " +
                         std::to_string(b) + " bits",
                     e.line);
            return a;
        }
        case VExpr::Kind::Ternary: {
            uint32_t a = natural_width(inst, *e.args[1]);
            uint32_t b = natural_width(inst, *e.args[2]);
            if (a == 0) return b;
            if (b == 0) return a;
            if (a != b)
                fail("width mismatch: ternary branches are " + std::to_string(a) + " and " +
                         std::to_string(b) + " bits",
                     e.line);
            return a;
        }
        case VExpr::Kind::Concat: {
            uint32_t sum = 0;
            for (const auto& a : e.args) {
                uint32_t w = natural_width(inst, *a);
                if (w == 0) fail("unsized constant inside concatenation", e.line);
                sum += w;
            }
            return sum;
        }
        case VExpr::Kind::Replicate: {
            uint32_t w = natural_width(inst, *e.args[0]);
            if (w == 0) fail("unsized constant inside replication", e.line);
            return e.repeat * w;
        }
        }
        fail("internal: unhandled expression kind", e.line);
    }

    AigLit reduce_or(const std::vector<AigLit>& bits) {
        AigLit acc = aig_false;
        for (AigLit b : bits) acc = g.mk_or(acc, b);
        return acc;
    }

    std::vector<AigLit> build_expr(Inst& inst, const VExpr& e, uint32_t ctx_width) {
        switch (e.kind) {
        case VExpr::Kind::Const: {
            uint32_t w = e.width ? e.width : ctx_width;
            if (w == 0) fail("unsized constant requires a width context", e.line);
            if (e.width && ctx_width && e.width != ctx_width)
                fail("width mismatch: " + std::to_string(e.width) + "-bit constant in " +
                         std::to_string(ctx_width) + "-bit context",
                     e.line);
            if (!e.width && w < 64 && (e.value >> w) != 0)
                fail("constant " + std::to_string(e.value) + " does not fit in " +
                         std::to_string(w) + " bits",
                     e.line);
            std::vector<AigLit> bits(w, aig_false);
            for (uint32_t i = 0; i < w && i < 64; i++)
                if ((e.value >> i) & 1) bits[i] = aig_true;
            return bits;
        }
        case VExpr::Kind::Ident: {
            const std::vector<AigLit>& bits = build_signal(inst, e.name, e.line);
            if (ctx_width && bits.size() != ctx_width)
                fail("width mismatch: '" + e.name + "' is " + std::to_string(bits.size()) +
                         " bits in a " + std::to_string(ctx_width) + "-bit context",
                     e.line);
            return bits;
        }
        case VExpr::Kind::Select:
        case VExpr::Kind::PartSelect: {
            const std::vector<AigLit>& bits = build_signal(inst, e.name, e.line);
            if (e.sel_msb >= static_cast<int>(bits.size()) || e.sel_lsb < 0)
                fail("select [" + std::to_string(e.sel_msb) + ":" + std::to_string(e.sel_lsb) +
                         "] out of range for '" + e.name + "'",
                     e.line);
            std::vector<AigLit> out(bits.begin() + e.sel_lsb, bits.begin() + e.sel_msb + 1);
            if (ctx_width && out.size() != ctx_width)
                fail("width mismatch in select of '" + e.name + "'", e.line);
            return out;
        }
        case VExpr::Kind::Not: {
            std::vector<AigLit> a = build_expr(inst, *e.args[0], ctx_width);
            for (AigLit& b : a) b = ~b;
            return a;
        }
        case VExpr::Kind::RedAnd: {
            std::vector<AigLit> a = build_expr(inst, *e.args[0], 0);
            AigLit acc = aig_true;
            for (AigLit b : a) acc = g.mk_and(acc, b);
            if (ctx_width > 1) fail("width mismatch: reduction yields 1 bit", e.line);
            return {acc};
        }
        case VExpr::Kind::RedOr: {
            std::vector<AigLit> a = build_expr(inst, *e.args[0], 0);
            if (ctx_width > 1) fail("width mismatch: reduction yields 1 bit", e.line);
            return {reduce_or(a)};
        }
        case VExpr::Kind::And:
        case VExpr::Kind::Or:
        case VExpr::Kind::Xor: {
            uint32_t w = ctx_width ? ctx_width : natural_width(inst, e);
            std::vector<AigLit> a = build_expr(inst, *e.args[0], w);
            std::vector<AigLit> b = build_expr(inst, *e.args[1], w);
            std::vector<AigLit> out(w);
            for (uint32_t i = 0; i < w; i++) {
                out[i] = e.kind == VExpr::Kind::And ? g.mk_and(a[i], b[i])
                       : e.kind == VExpr::Kind::Or  ? g.mk_or(a[i], b[i])
                                                    : g.mk_xor(a[i], b[i]);
            }
            return out;
        }
        case VExpr::Kind::Ternary: {
            uint32_t w = ctx_width ? ctx_width : natural_width(inst, e);
            std::vector<AigLit> cond = build_expr(inst, *e.args[0], 0);
            AigLit sel = reduce_or(cond);
            std::vector<AigLit> t = build_expr(inst, *e.args[1], w);
            std::vector<AigLit> f = build_expr(inst, *e.args[2], w);
            std::vector<AigLit> out(w);
            for (uint32_t i = 0; i < w; i++) out[i] = g.mk_mux(sel, t[i], f[i]);
            return out;
        }
        case VExpr::Kind::Concat: {
            std::vector<AigLit> out;
            for (size_t i = e.args.size(); i-- > 0;) { // operands are MSB-first
                std::vector<AigLit> part = build_expr(inst, *e.args[i], 0);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (ctx_width && out.size() != ctx_width)
                fail("width mismatch: concatenation is " + std::to_string(out.size()) +
                         " bits in a " + std::to_string(ctx_width) + "-bit context",
                     e.line);
            return out;
        }
        case VExpr::Kind::Replicate: {
            std::vector<AigLit> part = build_expr(inst, *e.args[0], 0);
            std::vector<AigLit> out;
            for (uint32_t r = 0; r < e.repeat; r++)
                out.insert(out.end(), part.begin(), part.end());
            if (ctx_width && out.size() != ctx_width)
                fail("width mismatch: replication is " + std::to_string(out.size()) +
                         " bits in a " + std::to_string(ctx_width) + "-bit context",
                     e.line);
            return out;
        }
        }
        fail("internal: unhandled expression kind", e.line);
    }

    const std::vector<AigLit>& build_signal(Inst& inst, const std::string& name, int line) {
        auto it = inst.sigs.find(name);
        if (it == inst.sigs.end())
            fail("reference to undeclared signal '" + name + "'", line);
        Sig& s = it->second;
        if (s.state == Sig::State::Built) return s.bits;
        if (s.state == Sig::State::Building) {
            std::string cycle;
            auto pos = std::find(build_stack.begin(), build_stack.end(), inst.path(name));
            for (auto i = pos; i != build_stack.end(); ++i) cycle += *i + " -> ";
            cycle += inst.path(name);
            fail("combinational cycle: " + cycle, s.line);
        }
        s.state = Sig::State::Building;
        build_stack.push_back(inst.path(name));

        switch (s.drive) {
        case Sig::Drive::Comb:
            s.bits = build_expr(inst, *s.comb_rhs, s.width);
            break;
        case Sig::Drive::InPort:
            if (s.conn_expr)
                s.bits = build_expr(*inst.parent, *s.conn_expr, s.width);
            else
                s.bits = build_expr(*inst.parent, ident_expr(name, s.line), s.width);
            break;
        case Sig::Drive::SubOutput:
            s.bits = build_signal(*s.sub, s.sub_port, line);
            break;
        case Sig::Drive::Clock:
            fail("clock '" + inst.path(name) + "' used in a data expression", line);
        case Sig::Drive::None:
            fail("no driver for signal '" + inst.path(name) + "'", s.line);
        case Sig::Drive::TopInput:
        case Sig::Drive::Register:
            fail("internal: state signal '" + inst.path(name) + "' not prebuilt", line);
        }

        build_stack.pop_back();
        s.state = Sig::State::Built;
        return s.bits;
    }

    // conn-less wildcard ports borrow an Ident expression; cache them here
    std::vector<std::unique_ptr<VExpr>> synth_exprs;
    const VExpr& ident_expr(const std::string& name, int line) {
        auto e = std::make_unique<VExpr>();
        e->kind = VExpr::Kind::Ident;
        e->name = name;
        e->line = line;
        synth_exprs.push_back(std::move(e));
        return *synth_exprs.back();
    }

    void build_all(Inst& inst) {
        for (auto& [name, s] : inst.sigs) {
            if (s.drive == Sig::Drive::Clock) continue;
            build_signal(inst, name, s.line);
            // state signals are named at creation; everything else here
            if (s.drive != Sig::Drive::TopInput && s.drive != Sig::Drive::Register)
                g.name_signal(inst.path(name), s.bits);
        }
        for (auto& c : inst.children) build_all(*c);
    }

    void set_next_states(Inst& inst) {
        for (const VClockedAssign& ca : inst.mod->clocked) {
            Sig& s = inst.sigs[ca.lhs];
            std::vector<AigLit> next = build_expr(inst, *ca.rhs, s.width);
            for (uint32_t i = 0; i < s.width; i++) g.set_next_state(s.bits[i], next[i]);
        }
        for (auto& c : inst.children) set_next_states(*c);
    }
};

} // namespace

Elaboration elaborate(const VDesign& design, const std::string& top_name) {
    const VModule* top = design.find(top_name);
    if (!top) throw ElabError("top module '" + top_name + "' not found");

    Elaborator el(design);
    std::vector<std::string> mod_stack;
    std::unique_ptr<Inst> root = el.instantiate(*top, "", nullptr, mod_stack);
    el.resolve_clocks(*root);
    el.classify(*root);
    el.create_state(*root);
    el.build_all(*root);
    el.set_next_states(*root);

    Elaboration out;
    out.top_name = top_name;
    out.clock_name = el.clock_name;
    for (const VPort& p : top->ports) {
        out.port_roles[p.name] = p.dir;
        if (p.dir == VPort::Dir::Output)
            el.g.add_output(p.name, root->sigs[p.name].bits);
    }
    el.g.seal();
    out.aignet = std::move(el.g);
    return out;
}

} // namespace exsim

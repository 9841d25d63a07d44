// SPDX-License-Identifier: Apache-2.0

#include "exsim/aiger.hpp"

#include <cstdint>
#include <map>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace exsim {

namespace {

struct AigerError : BuildError {
    using BuildError::BuildError;
};

uint64_t to_number(const std::string& tok, const char* what) {
    if (tok.empty()) throw AigerError(std::string("aiger: missing ") + what);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw AigerError(std::string("aiger: malformed ") + what + " '" + tok + "'");
    try {
        return std::stoull(tok);
    } catch (const std::exception&) {
        throw AigerError(std::string("aiger: malformed ") + what + " '" + tok + "'");
    }
}

// "name[3]" -> ("name", 3); plain names map to bit 0 of a scalar
std::pair<std::string, std::optional<uint32_t>> split_bit(const std::string& sym) {
    size_t open = sym.rfind('[');
    if (open == std::string::npos || sym.back() != ']') return {sym, std::nullopt};
    std::string idx = sym.substr(open + 1, sym.size() - open - 2);
    if (idx.empty()) return {sym, std::nullopt};
    for (char c : idx)
        if (!std::isdigit(static_cast<unsigned char>(c))) return {sym, std::nullopt};
    return {sym.substr(0, open), static_cast<uint32_t>(std::stoul(idx))};
}

// Groups per-bit symbols back into vectors where the bits are complete and
// contiguous in file order; everything else stays scalar under its raw symbol.
std::vector<std::pair<std::string, uint32_t>>
group_symbols(const std::vector<std::string>& syms) {
    std::vector<std::pair<std::string, uint32_t>> groups; // (name, width)
    size_t i = 0;
    while (i < syms.size()) {
        auto [base, bit] = split_bit(syms[i]);
        if (bit && *bit == 0) {
            uint32_t w = 1;
            while (i + w < syms.size()) {
                auto [b2, bit2] = split_bit(syms[i + w]);
                if (b2 == base && bit2 && *bit2 == w)
                    w++;
                else
                    break;
            }
            if (w > 1) {
                groups.emplace_back(base, w);
                i += w;
                continue;
            }
        }
        groups.emplace_back(syms[i], 1);
        i++;
    }
    return groups;
}

} // namespace

std::string write_aiger(const Aignet& g) {
    if (!g.sealed()) throw BuildError("write_aiger: graph not sealed");

    size_t I = g.input_count(), L = g.register_count(), A = g.and_count();
    std::vector<uint32_t> var_of(g.node_count(), 0);
    for (uint32_t i = 0; i < I; i++) var_of[g.input_node(i)] = static_cast<uint32_t>(i + 1);
    for (uint32_t i = 0; i < L; i++)
        var_of[g.register_node(i)] = static_cast<uint32_t>(I + 1 + i);
    uint32_t next_var = static_cast<uint32_t>(I + L + 1);
    std::vector<uint32_t> and_nodes;
    for (uint32_t n = 0; n < g.node_count(); n++)
        if (g.node(n).kind == NodeKind::And) {
            var_of[n] = next_var++;
            and_nodes.push_back(n);
        }
    auto alit = [&](AigLit l) -> uint64_t {
        return 2ull * var_of[l.node()] + (l.negated() ? 1 : 0);
    };

    size_t nout = 0;
    for (const auto& [name, bits] : g.outputs()) nout += bits.size();

    std::ostringstream out;
    out << "aag " << (I + L + A) << " " << I << " " << L << " " << nout << " " << A << "\n";
    for (uint32_t i = 0; i < I; i++) out << 2 * (i + 1) << "\n";
    for (uint32_t i = 0; i < L; i++) {
        uint64_t self = 2ull * (I + 1 + i);
        out << self << " " << alit(g.register_next(i)) << " " << self << "\n";
    }
    for (const auto& [name, bits] : g.outputs())
        for (AigLit b : bits) out << alit(b) << "\n";
    for (uint32_t n : and_nodes) {
        const AigNode& nd = g.node(n);
        out << 2ull * var_of[n] << " " << alit(nd.fanin0) << " " << alit(nd.fanin1) << "\n";
    }

    auto sym_name = [&](const BitRef& r, uint32_t width_hint) {
        (void)width_hint;
        return r.bit == 0 && g.lookup(r.signal) && g.lookup(r.signal)->size() == 1
                   ? r.signal
                   : r.signal + "[" + std::to_string(r.bit) + "]";
    };
    for (uint32_t i = 0; i < I; i++) out << "i" << i << " " << sym_name(g.input_ref(i), 0) << "\n";
    for (uint32_t i = 0; i < L; i++)
        out << "l" << i << " " << sym_name(g.register_ref(i), 0) << "\n";
    size_t opos = 0;
    for (const auto& [name, bits] : g.outputs()) {
        for (uint32_t b = 0; b < bits.size(); b++, opos++) {
            out << "o" << opos << " "
                << (bits.size() == 1 ? name : name + "[" + std::to_string(b) + "]") << "\n";
        }
    }
    return out.str();
}

Aignet parse_aiger(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw AigerError("aiger: empty input");
    std::istringstream hdr(line);
    std::string magic;
    hdr >> magic;
    if (magic != "aag") throw AigerError("aiger: expected ASCII header 'aag', got '" + magic + "'");
    std::string tok;
    std::vector<uint64_t> counts;
    while (hdr >> tok) counts.push_back(to_number(tok, "header count"));
    if (counts.size() < 5) throw AigerError("aiger: malformed header (need M I L O A)");
    for (size_t i = 5; i < counts.size(); i++)
        if (counts[i] != 0)
            throw AigerError("aiger: B/C/J/F sections are not supported");
    uint64_t M = counts[0], I = counts[1], L = counts[2], O = counts[3], A = counts[4];
    if (I + L + A > M) throw AigerError("aiger: header counts exceed maximum index M");

    auto read_line = [&](const char* what) {
        if (!std::getline(in, line)) throw AigerError(std::string("aiger: missing ") + what);
        return std::istringstream(line);
    };
    auto check_lit = [&](uint64_t l, const char* what) {
        if (l > 2 * M + 1) throw AigerError(std::string("aiger: ") + what + " literal " +
                                            std::to_string(l) + " out of range");
        return l;
    };

    enum class DefKind : uint8_t { None, Input, Latch, And };
    std::vector<DefKind> def(M + 1, DefKind::None);
    std::vector<uint32_t> ordinal(M + 1, 0);

    std::vector<uint64_t> input_vars(I), latch_vars(L);
    std::vector<uint64_t> latch_next(L);
    std::vector<uint64_t> output_lits(O);
    std::vector<std::pair<uint64_t, std::pair<uint64_t, uint64_t>>> ands;

    auto define = [&](uint64_t lit, DefKind kind, uint32_t ord, const char* what) {
        uint64_t v = check_lit(lit, what) / 2;
        if (lit == 0 || lit % 2 != 0)
            throw AigerError(std::string("aiger: ") + what + " must be a positive even literal");
        if (def[v] != DefKind::None)
            throw AigerError("aiger: duplicate definition of variable " + std::to_string(v));
        def[v] = kind;
        ordinal[v] = ord;
        return v;
    };

    for (uint64_t i = 0; i < I; i++) {
        auto ls = read_line("input line");
        std::string t;
        ls >> t;
        input_vars[i] = define(to_number(t, "input literal"), DefKind::Input,
                               static_cast<uint32_t>(i), "input");
    }
    for (uint64_t i = 0; i < L; i++) {
        auto ls = read_line("latch line");
        std::string t;
        ls >> t;
        latch_vars[i] = define(to_number(t, "latch literal"), DefKind::Latch,
                               static_cast<uint32_t>(i), "latch");
        ls >> t;
        latch_next[i] = check_lit(to_number(t, "latch next-state"), "latch next-state");
        if (ls >> t) {
            uint64_t r = to_number(t, "latch reset");
            if (r != 0 && r != 1 && r != 2 * latch_vars[i])
                throw AigerError("aiger: latch reset must be 0, 1 or the latch literal");
            // reset values are ignored: initial state comes from the waveform
        }
    }
    for (uint64_t i = 0; i < O; i++) {
        auto ls = read_line("output line");
        std::string t;
        ls >> t;
        output_lits[i] = check_lit(to_number(t, "output literal"), "output");
    }
    for (uint64_t i = 0; i < A; i++) {
        auto ls = read_line("and line");
        std::string t0, t1, t2;
        ls >> t0 >> t1 >> t2;
        uint64_t lhs = to_number(t0, "and literal");
        uint64_t v = define(lhs, DefKind::And, static_cast<uint32_t>(ands.size()), "and");
        (void)v;
        ands.emplace_back(lhs / 2,
                          std::make_pair(check_lit(to_number(t1, "and fanin"), "and fanin"),
                                         check_lit(to_number(t2, "and fanin"), "and fanin")));
    }

    // symbol table and comments
    std::vector<std::string> in_syms(I), latch_syms(L), out_syms(O);
    for (uint64_t i = 0; i < I; i++) in_syms[i] = "i" + std::to_string(i);
    for (uint64_t i = 0; i < L; i++) latch_syms[i] = "l" + std::to_string(i);
    for (uint64_t i = 0; i < O; i++) out_syms[i] = "o" + std::to_string(i);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == 'c') break; // comment section
        char kind = line[0];
        size_t sp = line.find(' ');
        if ((kind != 'i' && kind != 'l' && kind != 'o') || sp == std::string::npos)
            throw AigerError("aiger: malformed symbol line '" + line + "'");
        uint64_t pos = to_number(line.substr(1, sp - 1), "symbol position");
        std::string name = line.substr(sp + 1);
        if (name.empty()) throw AigerError("aiger: empty symbol name");
        if (kind == 'i') {
            if (pos >= I) throw AigerError("aiger: input symbol position out of range");
            in_syms[pos] = name;
        } else if (kind == 'l') {
            if (pos >= L) throw AigerError("aiger: latch symbol position out of range");
            latch_syms[pos] = name;
        } else {
            if (pos >= O) throw AigerError("aiger: output symbol position out of range");
            out_syms[pos] = name;
        }
    }

    // build the graph: grouped inputs and latches first, then AND cones
    Aignet g;
    std::vector<AigLit> lit_of(M + 1);
    lit_of[0] = aig_false;

    size_t pos = 0;
    for (const auto& [name, width] : group_symbols(in_syms)) {
        std::vector<AigLit> bits = g.add_input(name, width);
        for (uint32_t b = 0; b < width; b++) lit_of[input_vars[pos + b]] = bits[b];
        pos += width;
    }
    pos = 0;
    for (const auto& [name, width] : group_symbols(latch_syms)) {
        std::vector<AigLit> bits = g.add_register(name, width);
        for (uint32_t b = 0; b < width; b++) lit_of[latch_vars[pos + b]] = bits[b];
        pos += width;
    }

    std::unordered_map<uint64_t, std::pair<uint64_t, uint64_t>> and_def;
    for (const auto& [v, fan] : ands) and_def.emplace(v, fan);

    std::vector<uint8_t> resolved(M + 1, 0);
    std::vector<uint8_t> building(M + 1, 0);
    for (uint64_t v = 0; v <= M; v++)
        if (def[v] == DefKind::Input || def[v] == DefKind::Latch) resolved[v] = 1;
    resolved[0] = 1;

    // iterative post-order resolution of AND definitions (forward references
    // are legal in the ASCII format as long as the graph is acyclic)
    struct RFrame {
        uint64_t v;
        bool expanded;
    };
    auto resolve = [&](uint64_t root_lit) -> AigLit {
        uint64_t root = root_lit / 2;
        std::vector<RFrame> stack{{root, false}};
        while (!stack.empty()) {
            auto [v, expanded] = stack.back();
            stack.pop_back();
            if (resolved[v]) continue;
            if (def[v] == DefKind::None)
                throw AigerError("aiger: variable " + std::to_string(v) + " is never defined");
            auto [f0, f1] = and_def.at(v);
            uint64_t v0 = f0 / 2, v1 = f1 / 2;
            if (expanded) {
                lit_of[v] = g.mk_and(lit_of[v0] ^ static_cast<bool>(f0 & 1),
                                     lit_of[v1] ^ static_cast<bool>(f1 & 1));
                resolved[v] = 1;
                building[v] = 0;
                continue;
            }
            if (building[v])
                throw AigerError("aiger: cyclic AND definition at variable " + std::to_string(v));
            building[v] = 1;
            stack.push_back({v, true});
            if (!resolved[v0]) stack.push_back({v0, false});
            if (!resolved[v1]) stack.push_back({v1, false});
        }
        return lit_of[root] ^ static_cast<bool>(root_lit & 1);
    };
    for (const auto& [v, fan] : ands) resolve(2 * v);

    for (uint64_t i = 0; i < L; i++) {
        AigLit reg = lit_of[latch_vars[i]];
        g.set_next_state(reg, resolve(latch_next[i]));
    }

    pos = 0;
    for (const auto& [name, width] : group_symbols(out_syms)) {
        std::vector<AigLit> bits;
        for (uint32_t b = 0; b < width; b++) bits.push_back(resolve(output_lits[pos + b]));
        g.add_output(name, std::move(bits)); // names the signal unless already bound
        pos += width;
    }

    g.seal();
    return g;
}

} // namespace exsim

// SPDX-License-Identifier: Apache-2.0
// AST and parser for the mini-Verilog synthesizable subset.
//
// The subset covers: module/endmodule with ANSI ports, input/output/wire/reg
// declarations with [msb:lsb] ranges, continuous assigns, single-assignment
// always@* blocks, always@(posedge clk) non-blocking assignments, operators
// ~ & | ^ ?:, reduction &/|, concatenation, replication, bit/part select,
// named and .* instantiation. Everything else is a clean unsupported error.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exsim/error.hpp"

namespace exsim {

struct VRange {
    int msb = 0;
    int lsb = 0;
    uint32_t width() const { return static_cast<uint32_t>(msb - lsb + 1); }
};

struct VExpr;
using VExprPtr = std::unique_ptr<VExpr>;

struct VExpr {
    enum class Kind {
        Const,     // value/width
        Ident,     // name
        Select,    // name[index]
        PartSelect,// name[msb:lsb]
        Not,       // ~a
        RedAnd,    // &a
        RedOr,     // |a
        And,       // a & b
        Or,        // a | b
        Xor,       // a ^ b
        Ternary,   // a ? b : c
        Concat,    // {a, b, ...}  (operands MSB-first)
        Replicate, // {n{a}}
    };

    Kind kind;
    uint64_t value = 0;   // Const
    uint32_t width = 0;   // Const: 0 means unsized
    uint32_t repeat = 0;  // Replicate
    std::string name;     // Ident/Select/PartSelect
    int sel_msb = 0, sel_lsb = 0;
    std::vector<VExprPtr> args;
    int line = 0, col = 0;
};

struct VPort {
    enum class Dir { Input, Output };
    Dir dir = Dir::Input;
    bool is_reg = false;
    std::string name;
    std::optional<VRange> range;
    int line = 0;
};

struct VDecl {
    enum class Net { Wire, Reg };
    Net net = Net::Wire;
    std::string name;
    std::optional<VRange> range;
    int line = 0;
};

// `assign lhs = rhs;` and single-assignment `always@* lhs = rhs;`
struct VAssign {
    std::string lhs;
    VExprPtr rhs;
    bool from_always_comb = false;
    int line = 0;
};

// `always@(posedge clock) lhs <= rhs;`
struct VClockedAssign {
    std::string clock;
    std::string lhs;
    VExprPtr rhs;
    int line = 0;
};

struct VInstance {
    std::string module_name;
    std::string instance_name;
    bool wildcard = false; // .*
    std::vector<std::pair<std::string, VExprPtr>> connections;
    int line = 0;
};

struct VModule {
    std::string name;
    std::vector<VPort> ports;
    std::vector<VDecl> decls;
    std::vector<VAssign> assigns;
    std::vector<VClockedAssign> clocked;
    std::vector<VInstance> instances;
    int line = 0;
};

struct VDesign {
    std::vector<VModule> modules;
    const VModule* find(std::string_view name) const;
};

// Throws ParseError with line/column for syntax errors; unsupported constructs
// get an error naming the construct.
VDesign parse_mini_verilog(std::string_view source);

} // namespace exsim

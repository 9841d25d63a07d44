// SPDX-License-Identifier: Apache-2.0
// Elaboration of a parsed mini-Verilog design into a sealed Aignet.
//
// Vectors are bit-blasted; instances are flattened with dot-separated
// hierarchical names; clocked non-blocking assignments become registers whose
// next-state is the elaborated right-hand side. Clock nets are excluded from
// the data graph — cycle semantics live in the frame index downstream.

#pragma once

#include <map>
#include <string>

#include "exsim/aig.hpp"
#include "exsim/verilog.hpp"

namespace exsim {

struct Elaboration {
    Aignet aignet;
    std::string top_name;
    std::map<std::string, VPort::Dir> port_roles; // top-level ports
    std::string clock_name;                       // empty when the design has no registers
};

Elaboration elaborate(const VDesign& design, const std::string& top_name);

} // namespace exsim

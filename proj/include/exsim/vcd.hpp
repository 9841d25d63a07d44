// SPDX-License-Identifier: Apache-2.0
// VCD waveform ingestion and emission.
//
// Sampling convention: cycle k of a signal is its value immediately after the
// timestamp of the clock's k-th 0->1 transition; changes dumped at the same
// timestamp as the edge are included. Everything downstream reasons in cycle
// ordinals, never in raw VCD time.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "exsim/error.hpp"

namespace exsim {

enum class WBit : uint8_t { Zero = 0, One = 1, X = 2 };

inline char wbit_char(WBit b) { return b == WBit::Zero ? '0' : b == WBit::One ? '1' : 'x'; }

struct WaveSignal {
    uint32_t width = 0;
    // cycles[k] holds `width` bits, LSB first.
    std::vector<std::vector<WBit>> cycles;
};

class WaveDb {
public:
    std::string clock_name;
    std::vector<uint64_t> cycle_times;          // strictly increasing, one per posedge
    std::map<std::string, WaveSignal> signals;  // flattened dotted paths
    uint64_t timescale_fs = 1000000;            // parsed; display only

    size_t cycle_count() const { return cycle_times.size(); }

    // Exact name match, else unique dot-suffix match ("des.tmp" finds "top.des.tmp").
    // Returns nullptr when absent; throws VcdError when ambiguous.
    const WaveSignal* find(const std::string& name) const;

    // Value at a cycle with hold-last semantics past the final posedge.
    // Throws VcdError for unknown signals.
    std::vector<WBit> sample(const std::string& name, uint64_t cycle) const;

    bool has_x(const std::string& name) const;
};

WaveDb parse_vcd(std::string_view text, const std::string& clock_name);

// Emits one timestamp per cycle at the given period; posedge k sits at
// k*period + period/2 and cycle-k values change exactly there, so a re-parse
// samples identically. Values are emitted only when they differ from the
// previous cycle.
std::string write_vcd(const WaveDb& db, uint64_t period = 10);

} // namespace exsim

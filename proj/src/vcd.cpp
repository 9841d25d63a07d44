// SPDX-License-Identifier: Apache-2.0

#include "exsim/vcd.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

namespace exsim {

const WaveSignal* WaveDb::find(const std::string& name) const {
    auto it = signals.find(name);
    if (it != signals.end()) return &it->second;
    const WaveSignal* hit = nullptr;
    std::string suffix = "." + name;
    for (const auto& [path, sig] : signals) {
        if (path.size() > suffix.size() &&
            path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
            if (hit) throw VcdError("signal name '" + name + "' is ambiguous in the waveform");
            hit = &sig;
        }
    }
    return hit;
}

std::vector<WBit> WaveDb::sample(const std::string& name, uint64_t cycle) const {
    const WaveSignal* sig = find(name);
    if (!sig) throw VcdError("unknown signal '" + name + "' in waveform");
    if (sig->cycles.empty()) return std::vector<WBit>(sig->width, WBit::X);
    if (cycle >= sig->cycles.size()) return sig->cycles.back(); // hold-last
    return sig->cycles[cycle];
}

bool WaveDb::has_x(const std::string& name) const {
    const WaveSignal* sig = find(name);
    if (!sig) throw VcdError("unknown signal '" + name + "' in waveform");
    for (const auto& cyc : sig->cycles)
        for (WBit b : cyc)
            if (b == WBit::X) return true;
    return false;
}

namespace {

struct Tok {
    std::string_view text;
    size_t pos = 0;

    std::string_view next() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
        if (pos >= text.size()) return {};
        size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
        return text.substr(start, pos - start);
    }
};

uint64_t to_u64(const std::string& s, const char* what) {
    if (s.empty()) throw VcdError(std::string("missing ") + what);
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw VcdError(std::string("malformed ") + what + " '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw VcdError(std::string("malformed ") + what + " '" + s + "'");
    }
}

uint64_t parse_timescale(const std::string& num, const std::string& unit) {
    uint64_t n = to_u64(num, "timescale");
    uint64_t fs = 1;
    if (unit == "s") fs = 1000000000000000ull;
    else if (unit == "ms") fs = 1000000000000ull;
    else if (unit == "us") fs = 1000000000ull;
    else if (unit == "ns") fs = 1000000ull;
    else if (unit == "ps") fs = 1000ull;
    else if (unit == "fs") fs = 1ull;
    else throw VcdError("unknown timescale unit '" + unit + "'");
    return n * fs;
}

struct VarDef {
    std::string path;
    uint32_t width;
};

} // namespace

WaveDb parse_vcd(std::string_view text, const std::string& clock_name) {
    WaveDb db;
    db.clock_name = clock_name;

    Tok tok{text};
    std::vector<std::string> scope;
    // id code -> variables carrying it (aliases allowed)
    std::unordered_map<std::string, std::vector<VarDef>> vars;
    bool defs_done = false;

    // current value per path, updated as changes stream in
    std::unordered_map<std::string, std::vector<WBit>> current;

    auto scoped = [&](const std::string& name) {
        std::string p;
        for (const auto& s : scope) { p += s; p += '.'; }
        p += name;
        return p;
    };

    auto expect_end = [&](const char* what) {
        for (;;) {
            std::string_view t = tok.next();
            if (t.empty()) throw VcdError(std::string("unterminated ") + what);
            if (t == "$end") return;
        }
    };

    auto apply_scalar = [&](char v, const std::string& id) {
        auto it = vars.find(id);
        if (it == vars.end()) throw VcdError("value change for unknown identifier code '" + id + "'");
        WBit b = v == '0' ? WBit::Zero : v == '1' ? WBit::One : WBit::X; // 'z' reads as X
        for (const VarDef& vd : it->second) {
            auto& cur = current[vd.path];
            cur.assign(vd.width, b);
        }
    };

    auto apply_vector = [&](std::string_view bits, const std::string& id) {
        auto it = vars.find(id);
        if (it == vars.end()) throw VcdError("value change for unknown identifier code '" + id + "'");
        for (const VarDef& vd : it->second) {
            std::vector<WBit> val(vd.width, WBit::Zero);
            // bits are MSB first; left-extend with 0 (or x if leading bit is x/z)
            size_t n = bits.size();
            WBit ext = WBit::Zero;
            if (n > 0 && (bits[0] == 'x' || bits[0] == 'X' || bits[0] == 'z' || bits[0] == 'Z'))
                ext = WBit::X;
            for (uint32_t i = 0; i < vd.width; i++) {
                if (i < n) {
                    char c = bits[n - 1 - i];
                    val[i] = c == '0' ? WBit::Zero
                           : c == '1' ? WBit::One
                           : (c == 'x' || c == 'X' || c == 'z' || c == 'Z')
                               ? WBit::X
                               : throw VcdError("bad vector value character '" + std::string(1, c) + "'");
                } else {
                    val[i] = ext;
                }
            }
            current[vd.path] = std::move(val);
        }
    };

    bool have_clk_prev = false;
    WBit clk_prev = WBit::X;
    std::string clock_path; // resolved after definitions

    auto take_sample = [&](uint64_t t) {
        db.cycle_times.push_back(t);
        for (auto& [path, sig] : db.signals) {
            auto it = current.find(path);
            if (it != current.end() && !it->second.empty())
                sig.cycles.push_back(it->second);
            else
                sig.cycles.push_back(std::vector<WBit>(sig.width, WBit::X));
        }
    };

    uint64_t cur_time = 0;
    bool any_time = false;

    auto end_of_block = [&](uint64_t /*next_time*/) {
        // evaluate clock transition once all changes at cur_time are applied
        if (!any_time) return;
        auto it = current.find(clock_path);
        WBit clk_now = (it != current.end() && !it->second.empty()) ? it->second[0] : WBit::X;
        if (have_clk_prev && clk_prev == WBit::Zero && clk_now == WBit::One) {
            if (!db.cycle_times.empty() && db.cycle_times.back() >= cur_time)
                throw VcdError("timestamps not strictly increasing");
            take_sample(cur_time);
        }
        clk_prev = clk_now;
        have_clk_prev = true;
    };

    for (;;) {
        std::string_view t = tok.next();
        if (t.empty()) break;

        if (t[0] == '$') {
            if (t == "$scope") {
                std::string_view kind = tok.next();
                std::string_view name = tok.next();
                (void)kind;
                if (name.empty()) throw VcdError("malformed $scope");
                scope.emplace_back(name);
                expect_end("$scope");
            } else if (t == "$upscope") {
                if (scope.empty()) throw VcdError("$upscope without matching $scope");
                scope.pop_back();
                expect_end("$upscope");
            } else if (t == "$var") {
                std::string_view vtype = tok.next();
                std::string_view wstr = tok.next();
                std::string_view id = tok.next();
                std::string_view name = tok.next();
                if (vtype != "wire" && vtype != "reg")
                    throw VcdError("unsupported $var type '" + std::string(vtype) + "'");
                if (wstr.empty() || id.empty() || name.empty()) throw VcdError("malformed $var");
                uint32_t width = static_cast<uint32_t>(to_u64(std::string(wstr), "$var width"));
                if (width == 0) throw VcdError("zero-width $var '" + std::string(name) + "'");
                // optional range/index token before $end: [msb:lsb] or [i]
                std::string canonical(name);
                std::string_view nx = tok.next();
                if (!nx.empty() && nx[0] == '[') {
                    if (nx.find(':') == std::string_view::npos)
                        canonical += std::string(nx); // bit-split var keeps its index
                    nx = tok.next();
                }
                if (nx != "$end") throw VcdError("malformed $var for '" + std::string(name) + "'");
                std::string path = scoped(canonical);
                auto [it, fresh] = db.signals.emplace(path, WaveSignal{width, {}});
                if (!fresh && it->second.width != width)
                    throw VcdError("conflicting widths for '" + path + "'");
                vars[std::string(id)].push_back(VarDef{path, width});
                current.emplace(path, std::vector<WBit>(width, WBit::X));
            } else if (t == "$enddefinitions") {
                expect_end("$enddefinitions");
                defs_done = true;
                // resolve clock now
                const WaveSignal* c = db.find(clock_name);
                if (!c) throw VcdError("clock signal '" + clock_name + "' not found in VCD");
                if (c->width != 1) throw VcdError("clock signal '" + clock_name + "' is not 1 bit wide");
                for (const auto& [path, sig] : db.signals) {
                    if (&sig == c) { clock_path = path; break; }
                }
            } else if (t == "$timescale") {
                // forms: "$timescale 1ns $end" or "$timescale 1 ns $end"
                std::string num, unit;
                for (;;) {
                    std::string_view p = tok.next();
                    if (p.empty()) throw VcdError("unterminated $timescale");
                    if (p == "$end") break;
                    std::string s(p);
                    size_t d = 0;
                    while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d]))) d++;
                    if (d > 0) num += s.substr(0, d);
                    if (d < s.size()) unit += s.substr(d);
                }
                if (!num.empty() && !unit.empty()) db.timescale_fs = parse_timescale(num, unit);
            } else if (t == "$dumpvars" || t == "$dumpall") {
                // value changes follow until $end; handled by the main loop
                if (!defs_done) throw VcdError("value dump before $enddefinitions");
            } else if (t == "$end") {
                // terminator of a $dumpvars/$dumpall block
            } else if (t == "$dumpoff" || t == "$dumpon") {
                throw VcdError("unsupported VCD section '" + std::string(t) + "'");
            } else if (t == "$date" || t == "$version" || t == "$comment") {
                expect_end("metadata directive");
            } else {
                throw VcdError("unsupported VCD directive '" + std::string(t) + "'");
            }
            continue;
        }

        if (t[0] == '#') {
            if (!defs_done) throw VcdError("timestamp before $enddefinitions");
            uint64_t next_time = to_u64(std::string(t.substr(1)), "timestamp");
            end_of_block(next_time);
            cur_time = next_time;
            any_time = true;
            continue;
        }

        // value change
        if (!defs_done) throw VcdError("value change before $enddefinitions");
        if (!any_time) throw VcdError("value change before first timestamp");
        char c = t[0];
        if (c == '0' || c == '1' || c == 'x' || c == 'X' || c == 'z' || c == 'Z') {
            if (t.size() < 2) throw VcdError("malformed scalar value change '" + std::string(t) + "'");
            apply_scalar(std::tolower(c), std::string(t.substr(1)));
        } else if (c == 'b' || c == 'B') {
            std::string_view bits = t.substr(1);
            std::string_view id = tok.next();
            if (bits.empty() || id.empty()) throw VcdError("malformed vector value change");
            apply_vector(bits, std::string(id));
        } else if (c == 'r' || c == 'R') {
            throw VcdError("unsupported real-valued variable change");
        } else {
            throw VcdError("malformed value change '" + std::string(t) + "'");
        }
    }

    end_of_block(0); // flush the final timestamp block
    if (!defs_done) throw VcdError("VCD has no $enddefinitions");
    return db;
}

namespace {

std::string make_id(size_t n) {
    // printable identifier codes, base 94 starting at '!'
    std::string s;
    do {
        s += static_cast<char>('!' + n % 94);
        n /= 94;
    } while (n > 0);
    return s;
}

} // namespace

std::string write_vcd(const WaveDb& db, uint64_t period) {
    if (period < 2) throw VcdError("write_vcd: period must be at least 2");
    std::ostringstream out;
    out << "$timescale 1ns $end\n";

    size_t next_id = 0;
    std::string clk_id = make_id(next_id++);
    out << "$var wire 1 " << clk_id << " " << db.clock_name << " $end\n";
    std::map<std::string, std::string> ids;
    for (const auto& [name, sig] : db.signals) {
        if (name == db.clock_name) continue;
        std::string id = make_id(next_id++);
        ids[name] = id;
        if (sig.width == 1)
            out << "$var wire 1 " << id << " " << name << " $end\n";
        else
            out << "$var wire " << sig.width << " " << id << " " << name << " ["
                << (sig.width - 1) << ":0] $end\n";
    }
    out << "$enddefinitions $end\n";

    auto emit_value = [&](const std::string& id, const std::vector<WBit>& val) {
        if (val.size() == 1) {
            out << wbit_char(val[0]) << id << "\n";
        } else {
            out << "b";
            for (size_t i = val.size(); i-- > 0;) out << wbit_char(val[i]);
            out << " " << id << "\n";
        }
    };

    size_t n = db.cycle_count();
    std::map<std::string, std::vector<WBit>> prev;
    for (size_t k = 0; k < n; k++) {
        out << "#" << (k * period) << "\n";
        out << "0" << clk_id << "\n";
        out << "#" << (k * period + period / 2) << "\n";
        out << "1" << clk_id << "\n";
        for (const auto& [name, sig] : db.signals) {
            if (name == db.clock_name) continue;
            const std::vector<WBit>& val =
                k < sig.cycles.size() ? sig.cycles[k]
                                      : (sig.cycles.empty() ? std::vector<WBit>(sig.width, WBit::X)
                                                            : sig.cycles.back());
            auto it = prev.find(name);
            if (it == prev.end() || it->second != val) {
                emit_value(ids[name], val);
                prev[name] = val;
            }
        }
    }
    if (n > 0) out << "#" << (n * period) << "\n0" << clk_id << "\n";
    return out.str();
}

} // namespace exsim

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crsim/errors.hpp"
#include "crsim/exec.hpp"

namespace crsim::detail {

/// Resolves symbolic signals to line levels for one run.
class SignalResolver {
public:
    SignalResolver(const Program& p, const Word& a, const Word& b, bool c0)
        : p_(p), a_(a), b_(b), c0_(c0) {
        if (a.width() != p.n || b.width() != p.n) {
            throw ArgumentError("operand width must equal the program width n=" + std::to_string(p.n));
        }
    }

    std::map<std::string, bool>& registers() { return regs_; }

    /// nullopt when the signal forwards a read that has not happened yet.
    std::optional<Level> resolve(const Signal& s, const std::map<CellAddr, bool>& forwarded) const {
        switch (s.kind) {
            case SignalKind::const0:
                return Level::low;
            case SignalKind::const1:
                return Level::high;
            case SignalKind::ground:
                return Level::ground;
            case SignalKind::carry_in:
                return bit(c0_);
            case SignalKind::input_a:
                return bit(operand(a_, s.index));
            case SignalKind::input_b:
                return bit(operand(b_, s.index));
            case SignalKind::not_b:
                return bit(!operand(b_, s.index));
            case SignalKind::reg: {
                const auto it = regs_.find(s.reg);
                if (it == regs_.end()) throw ExecutionError("register '" + s.reg + "' read before latch");
                return bit(it->second);
            }
            case SignalKind::read_forward: {
                const auto it = forwarded.find(s.source);
                if (it == forwarded.end()) return std::nullopt;
                return bit(it->second);
            }
        }
        return Level::ground;
    }

private:
    static Level bit(bool v) { return v ? Level::high : Level::low; }
    bool operand(const Word& w, int i) const {
        if (i < 0 || i >= w.width()) throw ExecutionError("operand index out of range");
        return w.bits[static_cast<std::size_t>(i)];
    }

    const Program& p_;
    const Word& a_;
    const Word& b_;
    bool c0_;
    std::map<std::string, bool> regs_;
};

/// Every cell on the active row of each array, array-major.
inline std::vector<CellAddr> layout_cells(const Program& p) {
    std::vector<CellAddr> cells;
    for (int a = 0; a < static_cast<int>(p.arrays.size()); ++a) {
        for (int k = 0; k < p.arrays[a].bitlines; ++k) cells.push_back({a, p.arrays[a].wordline, k});
    }
    return cells;
}

inline void require_valid_layout(const Program& p) {
    for (const auto& step : p.steps) {
        for (const auto& d : step.arrays) {
            if (d.array < 0 || d.array >= static_cast<int>(p.arrays.size()) ||
                static_cast<int>(d.bls.size()) != p.arrays[d.array].bitlines) {
                throw ExecutionError("step drives an array that does not match the layout");
            }
        }
    }
}

inline std::string state_name(const std::optional<CrsLogicState>& s) {
    return s ? std::string(to_string(*s)) : std::string("X");
}

}  // namespace crsim::detail

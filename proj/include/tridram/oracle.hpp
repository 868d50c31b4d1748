#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tridram/mapping.hpp"

namespace tridram {

struct DeviceConfig;

/// Timing-free open-page bookkeeping for one access stream. A miss is any
/// access whose row differs from the bank's previously open row; the first
/// access to a bank counts as a miss. first_conflict_index is the first miss
/// that closed an already-open row (i.e. excluding the initial activation),
/// which is the quantity the stagger is supposed to spread across banks.
struct MissReport {
    std::vector<uint64_t> misses_per_bank;
    std::vector<std::optional<uint64_t>> first_miss_index;
    std::vector<std::optional<uint64_t>> first_conflict_index;
    uint64_t total_misses = 0;
    uint64_t total_accesses = 0;
};

/// Black-box: consumes addresses only.
class PageMissOracle {
public:
    explicit PageMissOracle(const DramTopology& t);

    void access(uint64_t index, const DramAddress& a);
    MissReport finish();

private:
    DramTopology t_;
    MissReport report_;
    std::vector<std::optional<uint32_t>> open_row_;
    uint64_t next_index_ = 0;
};

MissReport oracle_page_misses(const std::vector<DramAddress>& addresses,
                              const DramTopology& t);

template <typename Stream, typename Mapper>
MissReport oracle_page_misses(Stream stream, const Mapper& mapper) {
    PageMissOracle o(mapper.topology());
    Position p;
    uint64_t idx = 0;
    while (stream.next(p)) o.access(idx++, mapper.map(p));
    return o.finish();
}

struct Collision {
    Position first;
    Position second;
    DramAddress address;
};

/// Enumerates every valid position, maps it through the given scheme and
/// reports any pair landing on the same address. Empty result = injective.
/// Guarded to T <= 2^24 positions.
std::vector<Collision> verify_bijection(const std::function<DramAddress(Position)>& scheme,
                                        const Geometry& g, const DramTopology& t,
                                        size_t max_collisions = 16);

/// Independent re-check of every pairwise timing constraint over an emitted
/// command trace. Kept free of any scheduler state on purpose: it rebuilds
/// its own per-bank history from the trace alone.
class TraceAuditor {
public:
    struct Violation {
        uint64_t cycle;
        std::string rule;
    };

    explicit TraceAuditor(const DeviceConfig& cfg);

    /// command is one of "ACT", "PRE", "RD", "WR", "REF".
    void on_command(uint64_t cycle, const char* command, uint32_t bank, uint32_t row,
                    uint32_t column);

    const std::vector<Violation>& violations() const { return violations_; }

private:
    void fail(uint64_t cycle, std::string rule);

    const DeviceConfig& cfg_;
    uint32_t burst_cycles_ = 1;
    struct BankHist {
        bool open = false;
        uint32_t row = 0;
        int64_t last_act = -1'000'000'000;
        int64_t last_pre = -1'000'000'000;
        int64_t last_rd = -1'000'000'000;
        int64_t last_wr = -1'000'000'000;
    };
    std::vector<BankHist> banks_;
    std::vector<int64_t> act_times_;  // all ACTs, for tFAW
    int64_t last_act_ = -1'000'000'000;
    uint32_t last_act_bank_ = 0;
    int64_t last_col_ = -1'000'000'000;
    uint32_t last_col_bank_ = 0;
    bool last_col_was_write_ = false;
    bool have_col_ = false;
    int64_t last_ref_ = -1'000'000'000;
    int64_t last_cmd_ = -1;
    std::vector<Violation> violations_;
};

} // namespace tridram

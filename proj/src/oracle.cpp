#include "tridram/oracle.hpp"

#include <cstring>
#include <unordered_map>

#include "tridram/dram_model.hpp"
#include "tridram/error.hpp"

namespace tridram {

PageMissOracle::PageMissOracle(const DramTopology& t) : t_(t) {
    uint32_t b = t.banks();
    report_.misses_per_bank.assign(b, 0);
    report_.first_miss_index.assign(b, std::nullopt);
    report_.first_conflict_index.assign(b, std::nullopt);
    open_row_.assign(b, std::nullopt);
}

void PageMissOracle::access(uint64_t index, const DramAddress& a) {
    if (a.bank >= t_.banks()) throw OutOfRangeError("bank out of range");
    ++report_.total_accesses;
    auto& open = open_row_[a.bank];
    if (!open.has_value() || *open != a.row) {
        ++report_.misses_per_bank[a.bank];
        ++report_.total_misses;
        if (!report_.first_miss_index[a.bank])
            report_.first_miss_index[a.bank] = index;
        if (open.has_value() && !report_.first_conflict_index[a.bank])
            report_.first_conflict_index[a.bank] = index;
        open = a.row;
    }
    next_index_ = index + 1;
}

MissReport PageMissOracle::finish() { return report_; }

MissReport oracle_page_misses(const std::vector<DramAddress>& addresses,
                              const DramTopology& t) {
    PageMissOracle o(t);
    for (uint64_t i = 0; i < addresses.size(); ++i) o.access(i, addresses[i]);
    return o.finish();
}

std::vector<Collision> verify_bijection(const std::function<DramAddress(Position)>& scheme,
                                        const Geometry& g, const DramTopology& t,
                                        size_t max_collisions) {
    if (g.total() > (uint64_t(1) << 24))
        throw TooLargeError("bijection check is exhaustive; T must be <= 2^24");
    (void)t;
    std::unordered_map<uint64_t, Position> seen;
    seen.reserve(size_t(g.total()) * 2);
    std::vector<Collision> out;
    WriteStream ws(g);
    Position p;
    while (ws.next(p)) {
        DramAddress a = scheme(p);
        auto [it, inserted] = seen.emplace(a.packed(), p);
        if (!inserted) {
            out.push_back({it->second, p, a});
            if (out.size() >= max_collisions) break;
        }
    }
    return out;
}

TraceAuditor::TraceAuditor(const DeviceConfig& cfg)
    : cfg_(cfg), burst_cycles_(cfg.burst_cycles), banks_(cfg.topology.banks()) {}

void TraceAuditor::fail(uint64_t cycle, std::string rule) {
    violations_.push_back({cycle, std::move(rule)});
}

void TraceAuditor::on_command(uint64_t cycle, const char* command, uint32_t bank, uint32_t row,
                              uint32_t column) {
    int64_t t = int64_t(cycle);
    if (int64_t(cycle) <= last_cmd_) fail(cycle, "command bus: one command per cycle");
    last_cmd_ = t;

    auto same_group = [&](uint32_t b1, uint32_t b2) {
        return cfg_.topology.group_of(b1) == cfg_.topology.group_of(b2);
    };

    if (std::strcmp(command, "ACT") == 0) {
        if (bank >= banks_.size() || row >= cfg_.topology.rows) {
            fail(cycle, "ACT out of bounds");
            return;
        }
        BankHist& b = banks_[bank];
        if (b.open) fail(cycle, "ACT on open bank");
        if (t < b.last_pre + int64_t(cfg_.tRP)) fail(cycle, "tRP");
        if (t < b.last_act + int64_t(cfg_.tRC)) fail(cycle, "tRC");
        if (t < last_ref_ + int64_t(cfg_.tRFC)) fail(cycle, "tRFC");
        int64_t rrd = same_group(bank, last_act_bank_) ? cfg_.tRRD_L : cfg_.tRRD_S;
        if (t < last_act_ + rrd) fail(cycle, "tRRD");
        if (act_times_.size() >= 4 && t < act_times_[act_times_.size() - 4] + int64_t(cfg_.tFAW))
            fail(cycle, "tFAW");
        act_times_.push_back(t);
        last_act_ = t;
        last_act_bank_ = bank;
        b.open = true;
        b.row = row;
        b.last_act = t;
        return;
    }
    if (std::strcmp(command, "PRE") == 0) {
        if (bank >= banks_.size()) {
            fail(cycle, "PRE out of bounds");
            return;
        }
        BankHist& b = banks_[bank];
        if (!b.open) fail(cycle, "PRE on closed bank");
        if (t < b.last_act + int64_t(cfg_.tRAS)) fail(cycle, "tRAS");
        if (t < b.last_rd + int64_t(cfg_.tRTP)) fail(cycle, "tRTP");
        if (t < b.last_wr + int64_t(cfg_.CWL) + burst_cycles_ + int64_t(cfg_.tWR))
            fail(cycle, "tWR");
        b.open = false;
        b.last_pre = t;
        return;
    }
    if (std::strcmp(command, "REF") == 0) {
        for (auto& b : banks_)
            if (b.open) fail(cycle, "REF with open bank");
        for (auto& b : banks_)
            if (t < b.last_pre + int64_t(cfg_.tRP)) fail(cycle, "REF before tRP");
        if (t < last_ref_ + int64_t(cfg_.tRFC)) fail(cycle, "REF before tRFC");
        last_ref_ = t;
        return;
    }

    bool is_write = std::strcmp(command, "WR") == 0;
    if (!is_write && std::strcmp(command, "RD") != 0) {
        fail(cycle, std::string("unknown command ") + command);
        return;
    }
    if (bank >= banks_.size() || column >= cfg_.topology.bursts_per_page) {
        fail(cycle, "column command out of bounds");
        return;
    }
    BankHist& b = banks_[bank];
    if (!b.open || b.row != row) fail(cycle, "column access without matching open row");
    if (t < b.last_act + int64_t(cfg_.tRCD)) fail(cycle, "tRCD");
    if (have_col_) {
        int64_t ccd = same_group(bank, last_col_bank_) ? cfg_.tCCD_L : cfg_.tCCD_S;
        if (t < last_col_ + ccd) fail(cycle, "tCCD");
        if (last_col_was_write_ && !is_write) {
            int64_t wtr = same_group(bank, last_col_bank_) ? cfg_.tWTR_L : cfg_.tWTR_S;
            if (t < last_col_ + int64_t(cfg_.CWL) + burst_cycles_ + wtr) fail(cycle, "tWTR");
        }
        if (!last_col_was_write_ && is_write && t < last_col_ + int64_t(cfg_.tRTW))
            fail(cycle, "tRTW");
    }
    // Data bus: transfers of a homogeneous stream must not overlap.
    int64_t lat = is_write ? cfg_.CWL : cfg_.CL;
    int64_t data_start = t + lat;
    if (have_col_) {
        int64_t prev_lat = last_col_was_write_ ? cfg_.CWL : cfg_.CL;
        if (data_start < last_col_ + prev_lat + burst_cycles_) fail(cycle, "data bus overlap");
    }
    last_col_ = t;
    last_col_bank_ = bank;
    last_col_was_write_ = is_write;
    have_col_ = true;
    if (is_write)
        b.last_wr = t;
    else
        b.last_rd = t;
}

} // namespace tridram

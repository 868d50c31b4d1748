#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tridram/mapping.hpp"

namespace tridram {

/// One device preset: topology plus the JEDEC core timings, all in clock
/// cycles of the data-bus clock (half the transfer rate for double data
/// rate). Values live in the preset files, not here.
struct DeviceConfig {
    std::string name;
    DramTopology topology;
    uint32_t burst_cycles = 4;      // data-bus cycles per burst (BL / 2)
    uint32_t clock_period_ps = 0;   // informational

    uint32_t tRCD = 1, tRP = 1, tRAS = 1, tRC = 2;
    uint32_t tCCD_S = 1, tCCD_L = 1;
    uint32_t tRRD_S = 1, tRRD_L = 1;
    uint32_t tFAW = 1;
    uint32_t tWR = 1;
    uint32_t tWTR_S = 1, tWTR_L = 1;
    uint32_t tRTP = 1;
    uint32_t tRTW = 1;
    uint32_t tRFC = 1;
    uint32_t tREFI = 1;
    uint32_t CL = 1, CWL = 1;

    void validate() const;
};

/// Parses the line-oriented `key = integer` preset format. '#' starts a
/// comment; unknown keys are an error.
DeviceConfig parse_device_config(const std::string& text, const std::string& name);

/// Loads presets/<name>.cfg (case-insensitive name, e.g. "DDR4-3200").
/// Search order: TRIDRAM_PRESET_DIR, then the build-time preset directory.
DeviceConfig load_preset(const std::string& name);
DeviceConfig load_preset(const std::string& name, const std::string& preset_dir);

/// The ten shipped preset names, in report order.
const std::vector<std::string>& preset_names();

enum class AccessKind { Read, Write };

struct PhaseStats {
    uint64_t bursts = 0;
    uint64_t elapsed_cycles = 0;
    uint64_t data_bus_busy_cycles = 0;
    uint64_t page_hits = 0;
    uint64_t page_misses = 0;   // row-conflict reopenings
    uint64_t activates = 0;     // page_misses + banks touched the first time
    uint64_t precharges = 0;
    uint64_t refreshes = 0;
};

/// data_bus_busy / elapsed, in [0, 1].
double utilization(const PhaseStats& s);

/// Lower bound on the cycles a phase can take: pure data transfer plus the
/// refresh duty the stream length implies.
uint64_t ideal_phase_cycles(uint64_t bursts, const DeviceConfig& cfg, bool refresh_enabled);

/// Pull-based address source so large phases run in constant memory.
class AddressSource {
public:
    virtual ~AddressSource() = default;
    virtual bool next(DramAddress& out) = 0;
};

class SpanSource : public AddressSource {
public:
    explicit SpanSource(std::span<const DramAddress> a) : a_(a) {}
    bool next(DramAddress& out) override {
        if (pos_ >= a_.size()) return false;
        out = a_[pos_++];
        return true;
    }

private:
    std::span<const DramAddress> a_;
    size_t pos_ = 0;
};

template <typename Stream, typename Mapper>
class MappedSource : public AddressSource {
public:
    MappedSource(Stream stream, const Mapper& mapper) : s_(stream), m_(&mapper) {}
    bool next(DramAddress& out) override {
        Position p;
        if (!s_.next(p)) return false;
        out = m_->map(p);
        return true;
    }

private:
    Stream s_;
    const Mapper* m_;
};

/// "cycle,command,bank,row,column"; command is ACT/PRE/RD/WR/REF.
using CommandCallback =
    std::function<void(uint64_t cycle, const char* command, uint32_t bank, uint32_t row,
                       uint32_t column)>;

/// Cycle-approximate single-channel simulation of one homogeneous access
/// phase under an open-page policy.
///
/// Scheduling: the next `lookahead` requests form a window. Within it,
/// column commands go first-ready / oldest-first (requests to the same bank
/// stay in order), and ACT/PRE for upcoming misses issue as soon as their
/// constraints allow, so a staggered miss on one bank hides behind hits on
/// the others. Completion is in order through the reorder buffer the window
/// models; the window only admits a new request once its oldest one has
/// issued.
///
/// One command per cycle on the command bus; one burst at a time on the
/// data bus. With refresh enabled an all-bank refresh is injected every
/// tREFI: the controller drains, precharges everything, and stalls tRFC.
PhaseStats simulate_phase(AddressSource& source, const DeviceConfig& cfg, AccessKind kind,
                          uint32_t lookahead, bool refresh_enabled,
                          const CommandCallback* trace = nullptr);

PhaseStats simulate_phase(std::span<const DramAddress> addresses, const DeviceConfig& cfg,
                          AccessKind kind, uint32_t lookahead, bool refresh_enabled,
                          const CommandCallback* trace = nullptr);

} // namespace tridram

#include "tridram/dram_model.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "tridram/error.hpp"

#ifndef TRIDRAM_DEFAULT_PRESET_DIR
#define TRIDRAM_DEFAULT_PRESET_DIR ""
#endif

namespace tridram {

void DeviceConfig::validate() const {
    if (topology.banks() == 0 || (topology.banks() & (topology.banks() - 1)) != 0)
        throw UnsupportedTopologyError(name + ": bank count must be a power of two");
    if (burst_cycles == 0) throw UnsupportedTopologyError(name + ": burst_cycles must be >= 1");
    const std::array<std::pair<const char*, uint32_t>, 18> timings{{
        {"tRCD", tRCD}, {"tRP", tRP}, {"tRAS", tRAS}, {"tRC", tRC},
        {"tCCD_S", tCCD_S}, {"tCCD_L", tCCD_L}, {"tRRD_S", tRRD_S}, {"tRRD_L", tRRD_L},
        {"tFAW", tFAW}, {"tWR", tWR}, {"tWTR_S", tWTR_S}, {"tWTR_L", tWTR_L},
        {"tRTP", tRTP}, {"tRTW", tRTW}, {"tRFC", tRFC}, {"tREFI", tREFI},
        {"CL", CL}, {"CWL", CWL},
    }};
    for (auto& [key, v] : timings)
        if (v < 1)
            throw UnsupportedTopologyError(name + ": " + key + " must be >= 1");
    if (tRC != tRAS + tRP)
        throw UnsupportedTopologyError(name + ": tRC must equal tRAS + tRP");
}

DeviceConfig parse_device_config(const std::string& text, const std::string& name) {
    DeviceConfig cfg;
    cfg.name = name;
    std::map<std::string, uint32_t*> fields{
        {"bank_groups", &cfg.topology.bank_groups},
        {"banks_per_group", &cfg.topology.banks_per_group},
        {"bursts_per_page", &cfg.topology.bursts_per_page},
        {"rows", &cfg.topology.rows},
        {"burst_cycles", &cfg.burst_cycles},
        {"clock_period_ps", &cfg.clock_period_ps},
        {"tRCD", &cfg.tRCD}, {"tRP", &cfg.tRP}, {"tRAS", &cfg.tRAS}, {"tRC", &cfg.tRC},
        {"tCCD_S", &cfg.tCCD_S}, {"tCCD_L", &cfg.tCCD_L},
        {"tRRD_S", &cfg.tRRD_S}, {"tRRD_L", &cfg.tRRD_L},
        {"tFAW", &cfg.tFAW}, {"tWR", &cfg.tWR},
        {"tWTR_S", &cfg.tWTR_S}, {"tWTR_L", &cfg.tWTR_L},
        {"tRTP", &cfg.tRTP}, {"tRTW", &cfg.tRTW},
        {"tRFC", &cfg.tRFC}, {"tREFI", &cfg.tREFI},
        {"CL", &cfg.CL}, {"CWL", &cfg.CWL},
    };
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(name + ":" + std::to_string(lineno) + ": expected 'key = integer'");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = fields.find(key);
        if (it == fields.end())
            throw IoError(name + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
            throw IoError(name + ":" + std::to_string(lineno) + ": value of '" + key +
                          "' must be a decimal integer");
        *it->second = uint32_t(std::stoul(value));
        seen[key] = true;
    }
    for (auto& [key, ptr] : fields) {
        (void)ptr;
        if (!seen[key]) throw IoError(name + ": missing key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{
        "DDR3-800",    "DDR3-1600",   "DDR4-1600",   "DDR4-3200",   "DDR5-3200",
        "DDR5-6400",   "LPDDR4-2133", "LPDDR4-4266", "LPDDR5-4267", "LPDDR5-8533",
    };
    return names;
}

namespace {

std::string to_lower(std::string s) {
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

DeviceConfig load_preset(const std::string& name, const std::string& preset_dir) {
    bool known = false;
    for (const auto& n : preset_names())
        if (to_lower(n) == to_lower(name)) known = true;
    if (!known) throw UnknownPresetError("unknown preset '" + name + "'");
    std::string path = preset_dir + "/" + to_lower(name) + ".cfg";
    std::ifstream f(path);
    if (!f) throw IoError("cannot open preset file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    // Canonical casing for reports regardless of how the caller spelled it.
    for (const auto& n : preset_names())
        if (to_lower(n) == to_lower(name)) return parse_device_config(ss.str(), n);
    throw UnknownPresetError("unknown preset '" + name + "'");
}

DeviceConfig load_preset(const std::string& name) {
    const char* env = std::getenv("TRIDRAM_PRESET_DIR");
    return load_preset(name, env && *env ? env : TRIDRAM_DEFAULT_PRESET_DIR);
}

double utilization(const PhaseStats& s) {
    if (s.elapsed_cycles == 0) throw UndefinedUtilizationError("phase elapsed zero cycles");
    return double(s.data_bus_busy_cycles) / double(s.elapsed_cycles);
}

uint64_t ideal_phase_cycles(uint64_t bursts, const DeviceConfig& cfg, bool refresh_enabled) {
    uint64_t data = bursts * cfg.burst_cycles;
    if (refresh_enabled) data += data / cfg.tREFI * cfg.tRFC;
    return data;
}

namespace {

constexpr int64_t kNever = -(int64_t(1) << 40);

struct BankState {
    bool open = false;
    uint32_t row = 0;
    bool touched = false;
    int64_t act_ready = 0;   // earliest next ACT (tRP after PRE, tRC after ACT, tRFC)
    int64_t col_ready = 0;   // earliest next RD/WR (tRCD after ACT)
    int64_t pre_ready = 0;   // earliest next PRE (tRAS, tRTP, write recovery)
};

struct PendingReq {
    uint32_t row;
    uint32_t column;
    uint64_t idx;
};

class Simulator {
public:
    Simulator(AddressSource& src, const DeviceConfig& cfg, AccessKind kind, uint32_t lookahead,
              bool refresh_enabled, const CommandCallback* trace)
        : src_(src), cfg_(cfg), kind_(kind),
          lookahead_(std::max<uint32_t>(1, lookahead)), refresh_enabled_(refresh_enabled),
          trace_(trace), banks_(cfg.topology.banks()), queues_(cfg.topology.banks()) {
        next_ref_ = refresh_enabled_ ? int64_t(cfg_.tREFI) : std::numeric_limits<int64_t>::max();
    }

    PhaseStats run();

private:
    enum class Cmd { None, Col, Pre, Act, Ref };

    void admit();
    void issue_col(uint32_t bank, int64_t t);
    void issue_pre(uint32_t bank, int64_t t);
    void issue_act(uint32_t bank, uint32_t row, int64_t t);
    void issue_ref(int64_t t);

    int64_t col_time(uint32_t bank) const;
    int64_t act_time(uint32_t bank) const;

    AddressSource& src_;
    const DeviceConfig& cfg_;
    AccessKind kind_;
    uint32_t lookahead_;
    bool refresh_enabled_;
    const CommandCallback* trace_;

    std::vector<BankState> banks_;
    std::vector<std::deque<PendingReq>> queues_;
    uint32_t pending_ = 0;
    bool source_done_ = false;
    uint64_t next_idx_ = 0;

    int64_t now_ = 0;            // command bus free from here on
    int64_t databus_free_ = 0;
    int64_t last_col_cmd_ = kNever;
    uint32_t last_col_group_ = 0;
    uint32_t last_col_bank_ = 0;
    bool have_col_ = false;
    int64_t last_act_cmd_ = kNever;
    uint32_t last_act_group_ = 0;
    bool have_act_ = false;
    std::array<int64_t, 4> act_window_{kNever, kNever, kNever, kNever};
    size_t act_window_pos_ = 0;
    int64_t next_ref_ = 0;
    bool ref_pending_ = false;
    int64_t last_data_end_ = 0;

    PhaseStats stats_;
};

void Simulator::admit() {
    DramAddress a;
    while (!source_done_ && pending_ < lookahead_) {
        if (!src_.next(a)) {
            source_done_ = true;
            break;
        }
        if (a.bank >= cfg_.topology.banks() || a.row >= cfg_.topology.rows ||
            a.column >= cfg_.topology.bursts_per_page)
            throw SimulationAbortError(cfg_.name + ": address out of topology bounds");
        queues_[a.bank].push_back({a.row, a.column, next_idx_++});
        ++pending_;
    }
}

int64_t Simulator::col_time(uint32_t bank) const {
    const BankState& b = banks_[bank];
    const PendingReq& r = queues_[bank].front();
    (void)r;
    int64_t t = std::max(now_, b.col_ready);
    if (have_col_) {
        bool same_group = cfg_.topology.group_of(bank) == last_col_group_;
        t = std::max(t, last_col_cmd_ + int64_t(same_group ? cfg_.tCCD_L : cfg_.tCCD_S));
    }
    // Homogeneous phases never mix kinds; tWTR/tRTW would bind here if they did.
    uint32_t lat = kind_ == AccessKind::Read ? cfg_.CL : cfg_.CWL;
    t = std::max(t, databus_free_ - int64_t(lat));
    return t;
}

int64_t Simulator::act_time(uint32_t bank) const {
    const BankState& b = banks_[bank];
    int64_t t = std::max(now_, b.act_ready);
    if (have_act_) {
        bool same_group = cfg_.topology.group_of(bank) == last_act_group_;
        t = std::max(t, last_act_cmd_ + int64_t(same_group ? cfg_.tRRD_L : cfg_.tRRD_S));
    }
    t = std::max(t, act_window_[act_window_pos_] + int64_t(cfg_.tFAW));
    return t;
}

void Simulator::issue_col(uint32_t bank, int64_t t) {
    BankState& b = banks_[bank];
    PendingReq r = queues_[bank].front();
    queues_[bank].pop_front();
    --pending_;
    uint32_t lat = kind_ == AccessKind::Read ? cfg_.CL : cfg_.CWL;
    int64_t data_end = t + lat + cfg_.burst_cycles;
    databus_free_ = data_end;
    last_data_end_ = std::max(last_data_end_, data_end);
    if (kind_ == AccessKind::Read) {
        b.pre_ready = std::max(b.pre_ready, t + int64_t(cfg_.tRTP));
    } else {
        b.pre_ready = std::max(b.pre_ready, data_end + int64_t(cfg_.tWR));
    }
    last_col_cmd_ = t;
    last_col_group_ = cfg_.topology.group_of(bank);
    last_col_bank_ = bank;
    have_col_ = true;
    ++stats_.bursts;
    stats_.data_bus_busy_cycles += cfg_.burst_cycles;
    if (trace_)
        (*trace_)(uint64_t(t), kind_ == AccessKind::Read ? "RD" : "WR", bank, r.row, r.column);
    now_ = t + 1;
}

void Simulator::issue_pre(uint32_t bank, int64_t t) {
    BankState& b = banks_[bank];
    b.open = false;
    b.act_ready = std::max(b.act_ready, t + int64_t(cfg_.tRP));
    ++stats_.precharges;
    if (trace_) (*trace_)(uint64_t(t), "PRE", bank, b.row, 0);
    now_ = t + 1;
}

void Simulator::issue_act(uint32_t bank, uint32_t row, int64_t t) {
    BankState& b = banks_[bank];
    b.open = true;
    b.row = row;
    if (b.touched) {
        ++stats_.page_misses;
    } else {
        b.touched = true;
    }
    ++stats_.activates;
    b.col_ready = t + int64_t(cfg_.tRCD);
    b.pre_ready = t + int64_t(cfg_.tRAS);
    b.act_ready = t + int64_t(cfg_.tRC);
    last_act_cmd_ = t;
    last_act_group_ = cfg_.topology.group_of(bank);
    have_act_ = true;
    act_window_[act_window_pos_] = t;
    act_window_pos_ = (act_window_pos_ + 1) % act_window_.size();
    if (trace_) (*trace_)(uint64_t(t), "ACT", bank, row, 0);
    now_ = t + 1;
}

void Simulator::issue_ref(int64_t t) {
    for (auto& b : banks_) b.act_ready = std::max(b.act_ready, t + int64_t(cfg_.tRFC));
    ++stats_.refreshes;
    ref_pending_ = false;
    next_ref_ += cfg_.tREFI;
    if (trace_) (*trace_)(uint64_t(t), "REF", 0, 0, 0);
    now_ = t + 1;
}

PhaseStats Simulator::run() {
    const uint32_t nbanks = cfg_.topology.banks();
    while (true) {
        admit();
        if (pending_ == 0 && source_done_) break;

        if (ref_pending_) {
            // Drain: close every open bank, then refresh all banks at once.
            int64_t best = std::numeric_limits<int64_t>::max();
            uint32_t best_bank = 0;
            bool any_open = false;
            int64_t ready_all = now_;
            for (uint32_t b = 0; b < nbanks; ++b) {
                if (banks_[b].open) {
                    any_open = true;
                    int64_t t = std::max(now_, banks_[b].pre_ready);
                    if (t < best) {
                        best = t;
                        best_bank = b;
                    }
                } else {
                    ready_all = std::max(ready_all, banks_[b].act_ready);
                }
            }
            if (any_open) {
                issue_pre(best_bank, best);
            } else {
                issue_ref(std::max(ready_all, next_ref_));
            }
            continue;
        }

        Cmd kind = Cmd::None;
        int64_t best = std::numeric_limits<int64_t>::max();
        uint64_t best_score = ~uint64_t(0);
        uint32_t best_bank = 0;
        for (uint32_t b = 0; b < nbanks; ++b) {
            if (queues_[b].empty()) continue;
            const PendingReq& r = queues_[b].front();
            Cmd c;
            int64_t t;
            if (banks_[b].open && banks_[b].row == r.row) {
                c = Cmd::Col;
                t = col_time(b);
            } else if (banks_[b].open) {
                c = Cmd::Pre;
                t = std::max(now_, banks_[b].pre_ready);
            } else {
                c = Cmd::Act;
                t = act_time(b);
            }
            // Earliest first. Ties prefer data movement, then staying on the
            // bank that moved data last (draining an open page in one run
            // frees its bank for the precharge/activate chain as early as
            // possible), then the oldest request so nothing starves.
            bool cont = c == Cmd::Col && have_col_ && b == last_col_bank_;
            uint64_t score = (uint64_t(c != Cmd::Col) << 63) | (uint64_t(!cont) << 62) |
                             (r.idx & ((uint64_t(1) << 62) - 1));
            bool better = t < best || (t == best && score < best_score);
            if (kind == Cmd::None || better) {
                kind = c;
                best = t;
                best_score = score;
                best_bank = b;
            }
        }

        if (refresh_enabled_ && best >= next_ref_) {
            ref_pending_ = true;
            continue;
        }

        switch (kind) {
            case Cmd::Col: issue_col(best_bank, best); break;
            case Cmd::Pre: issue_pre(best_bank, best); break;
            case Cmd::Act: issue_act(best_bank, queues_[best_bank].front().row, best); break;
            default: throw SimulationAbortError("scheduler deadlock");
        }
    }
    stats_.elapsed_cycles = uint64_t(std::max<int64_t>(0, last_data_end_));
    stats_.page_hits = stats_.bursts - stats_.page_misses;
    return stats_;
}

} // namespace

PhaseStats simulate_phase(AddressSource& source, const DeviceConfig& cfg, AccessKind kind,
                          uint32_t lookahead, bool refresh_enabled,
                          const CommandCallback* trace) {
    cfg.validate();
    Simulator sim(source, cfg, kind, lookahead, refresh_enabled, trace);
    return sim.run();
}

PhaseStats simulate_phase(std::span<const DramAddress> addresses, const DeviceConfig& cfg,
                          AccessKind kind, uint32_t lookahead, bool refresh_enabled,
                          const CommandCallback* trace) {
    SpanSource src(addresses);
    return simulate_phase(src, cfg, kind, lookahead, refresh_enabled, trace);
}

} // namespace tridram

// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff everything holds.

#include <chrono>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "tridram/experiment.hpp"
#include "tridram/oracle.hpp"

using namespace tridram;

namespace {

int g_failures = 0;

void line(const std::string& label, bool pass, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct PropertyOutcome {
    bool bijective = true;
    bool roundtrip = true;
    bool increments = true;
    bool balance = true;
    bool stagger = true;
    std::string detail;
};

PropertyOutcome check_properties(uint32_t n, const DramTopology& t) {
    PropertyOutcome out;
    Geometry g(n);
    OptimizedMapper m(g, t);

    out.bijective = verify_bijection([&](Position p) { return m.map(p); }, g, t).empty();

    {
        WriteStream ws(g);
        Position p;
        while (ws.next(p)) {
            if (m.unmap(m.map(p)) != p) {
                out.roundtrip = false;
                break;
            }
        }
    }

    {
        uint32_t banks = t.banks();
        Position p;
        WriteStream ws(g);
        uint32_t prev = 0, prev_i = ~0u;
        while (ws.next(p)) {
            uint32_t b = m.map(p).bank;
            if (p.i == prev_i && b != (prev + 1) % banks) out.increments = false;
            prev = b;
            prev_i = p.i;
        }
        ReadStream rs(g);
        uint32_t prev_j = ~0u;
        while (rs.next(p)) {
            uint32_t b = m.map(p).bank;
            if (p.j == prev_j && b != (prev + 1) % banks) out.increments = false;
            prev = b;
            prev_j = p.j;
        }
    }

    MissReport w = oracle_page_misses(WriteStream(g), m);
    MissReport r = oracle_page_misses(ReadStream(g), m);
    if (w.total_misses == 0 || r.total_misses == 0) {
        out.balance = false;
    } else {
        double ratio = double(w.total_misses) / double(r.total_misses);
        out.balance = ratio >= 0.9 && ratio <= 1.1;
        char buf[128];
        std::snprintf(buf, sizeof buf, "w=%llu r=%llu", (unsigned long long)w.total_misses,
                      (unsigned long long)r.total_misses);
        out.detail = buf;
    }

    std::set<uint64_t> firsts;
    for (auto& f : w.first_conflict_index) {
        if (!f) continue;  // banks with a single page never reopen
        if (!firsts.insert(*f).second) out.stagger = false;
    }
    return out;
}

void criterion1() {
    const DramTopology topos[] = {
        {1, 2, 2, 1 << 20}, {2, 2, 8, 1 << 20}, {2, 4, 64, 1 << 20}, {4, 4, 128, 1 << 20}};
    const uint32_t sizes[] = {16, 64, 256, 1024};
    bool bij = true, inc = true, bal = true, stag = true;
    std::string bad;
    for (const auto& t : topos) {
        for (uint32_t n : sizes) {
            PropertyOutcome o = check_properties(n, t);
            if (!(o.bijective && o.roundtrip && o.increments && o.balance && o.stagger)) {
                char buf[160];
                std::snprintf(buf, sizeof buf, " [N=%u B=%u C=%u %s%s%s%s%s %s]", n, t.banks(),
                              t.bursts_per_page, o.bijective ? "" : "bij ",
                              o.roundtrip ? "" : "inv ", o.increments ? "" : "inc ",
                              o.balance ? "" : "bal ", o.stagger ? "" : "stag ",
                              o.detail.c_str());
                bad += buf;
            }
            bij &= o.bijective && o.roundtrip;
            inc &= o.increments;
            bal &= o.balance;
            stag &= o.stagger;
        }
    }
    line("1a bijectivity + exact round-trip (4 sizes x 4 topologies)", bij, bad);
    line("1b bank increment-by-one within rows and columns", inc);
    line("1c write/read page-miss balance within 10 %", bal, bad);
    line("1d first page misses pairwise distinct across banks", stag);
}

void criterion2() {
    Geometry g(1024);
    DramTopology t{4, 4, 128, 1 << 20};
    RowMajorMapper rm(g, t);
    MissReport rw = oracle_page_misses(WriteStream(g), rm);
    MissReport rr = oracle_page_misses(ReadStream(g), rm);
    bool contrast = rr.total_misses >= 10 * rw.total_misses;
    char buf[128];
    std::snprintf(buf, sizeof buf, "write=%llu read=%llu", (unsigned long long)rw.total_misses,
                  (unsigned long long)rr.total_misses);
    line("2a row-major read misses >= 10x write misses (N=1024, B=16, C=128)", contrast, buf);

    OptimizedMapper om(g, t);
    MissReport ow = oracle_page_misses(WriteStream(g), om);
    MissReport orr = oracle_page_misses(ReadStream(g), om);
    double ratio = orr.total_misses ? double(ow.total_misses) / double(orr.total_misses) : 0.0;
    std::snprintf(buf, sizeof buf, "write=%llu read=%llu ratio=%.3f",
                  (unsigned long long)ow.total_misses, (unsigned long long)orr.total_misses,
                  ratio);
    line("2b optimized write/read miss ratio in [0.9, 1.1]", ratio >= 0.9 && ratio <= 1.1, buf);
}

struct TimedMatrix {
    MatrixResult with_refresh;   // both schemes at the desk-scale N
    MatrixResult without_refresh;  // optimized, refresh off, full-scale N
    uint64_t audit_violations = 0;
    double max_preset_seconds = 0.0;
};

CellResult run_audited(const std::string& name, const DeviceConfig& cfg, const Geometry& g,
                       const RowMajorMapper* rm, const OptimizedMapper* om, Scheme scheme,
                       Phase phase, bool refresh, uint32_t lookahead,
                       uint64_t* audit_violations) {
    TraceAuditor audit(cfg);
    CommandCallback cb = [&](uint64_t cyc, const char* cmd, uint32_t b, uint32_t r,
                             uint32_t c) { audit.on_command(cyc, cmd, b, r, c); };
    PhaseStats stats;
    AccessKind kind = phase == Phase::Write ? AccessKind::Write : AccessKind::Read;
    if (scheme == Scheme::RowMajor) {
        if (phase == Phase::Write) {
            MappedSource<WriteStream, RowMajorMapper> src(WriteStream(g), *rm);
            stats = simulate_phase(src, cfg, kind, lookahead, refresh, &cb);
        } else {
            MappedSource<ReadStream, RowMajorMapper> src(ReadStream(g), *rm);
            stats = simulate_phase(src, cfg, kind, lookahead, refresh, &cb);
        }
    } else {
        if (phase == Phase::Write) {
            MappedSource<WriteStream, OptimizedMapper> src(WriteStream(g), *om);
            stats = simulate_phase(src, cfg, kind, lookahead, refresh, &cb);
        } else {
            MappedSource<ReadStream, OptimizedMapper> src(ReadStream(g), *om);
            stats = simulate_phase(src, cfg, kind, lookahead, refresh, &cb);
        }
    }
    *audit_violations += audit.violations().size();
    CellResult c;
    c.config = name;
    c.scheme = scheme;
    c.phase = phase;
    c.stats = stats;
    c.util = utilization(stats);
    return c;
}

TimedMatrix run_full_matrix(uint32_t n_desk, uint32_t n_full, uint32_t lookahead) {
    TimedMatrix out;
    for (const auto& name : preset_names()) {
        auto t0 = std::chrono::steady_clock::now();
        DeviceConfig cfg = load_preset(name);
        Geometry g(n_desk);
        RowMajorMapper rm(g, cfg.topology);
        OptimizedMapper om(g, cfg.topology);

        for (Scheme s : {Scheme::RowMajor, Scheme::Optimized})
            for (Phase p : {Phase::Write, Phase::Read})
                out.with_refresh.cells.push_back(run_audited(
                    name, cfg, g, &rm, &om, s, p, true, lookahead, &out.audit_violations));

        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.max_preset_seconds = std::max(out.max_preset_seconds, sec);

        // The refresh-off claim is about the full-size interleaver; triangle
        // row transitions cost a fixed amount per row, so the margin above
        // 99 % grows with N.
        Geometry gf(n_full);
        OptimizedMapper omf(gf, cfg.topology);
        for (Phase p : {Phase::Write, Phase::Read})
            out.without_refresh.cells.push_back(run_audited(
                name, cfg, gf, nullptr, &omf, Scheme::Optimized, p, false, lookahead,
                &out.audit_violations));
    }
    return out;
}

void criteria3to5(uint32_t n_desk, uint32_t n_full, uint32_t lookahead) {
    TimedMatrix tm = run_full_matrix(n_desk, n_full, lookahead);

    // 3a: optimized >= 90 % in both phases (DDR4 presets >= 88 %).
    bool floors = true;
    std::string floor_bad;
    for (const auto& name : preset_names()) {
        double fl = name.rfind("DDR4", 0) == 0 ? 0.88 : 0.90;
        for (Phase p : {Phase::Write, Phase::Read}) {
            const CellResult* c = tm.with_refresh.find(name, Scheme::Optimized, p);
            if (c->util < fl) {
                char buf[96];
                std::snprintf(buf, sizeof buf, " [%s %s %.2f%% < %.0f%%]", name.c_str(),
                              phase_name(p), c->util * 100, fl * 100);
                floor_bad += buf;
                floors = false;
            }
        }
    }
    line("3a optimized utilization floors with refresh", floors, floor_bad);

    // 3b: row-major read collapses below 75 % on the listed presets.
    const char* collapse[] = {"DDR3-1600",   "DDR4-1600",   "DDR4-3200", "LPDDR4-2133",
                              "LPDDR4-4266", "LPDDR5-4267", "LPDDR5-8533"};
    bool collapses = true;
    std::string col_bad;
    for (const char* name : collapse) {
        const CellResult* c = tm.with_refresh.find(name, Scheme::RowMajor, Phase::Read);
        if (c->util >= 0.75) {
            char buf[96];
            std::snprintf(buf, sizeof buf, " [%s %.2f%%]", name, c->util * 100);
            col_bad += buf;
            collapses = false;
        }
    }
    line("3b row-major read below 75 % on the seven affected presets", collapses, col_bad);

    // 3c: every cell within 15 pp of the reference.
    ComparisonReport rep = compare_to_reference(tm.with_refresh, reference_table(), 15.0);
    bool cells_ok = true;
    std::string cell_bad;
    for (const auto& c : rep.cells) {
        if (!c.pass) {
            char buf[120];
            std::snprintf(buf, sizeof buf, " [%s %s %s sim %.2f ref %.2f]", c.config.c_str(),
                          scheme_name(c.scheme), phase_name(c.phase), c.simulated_pct,
                          c.reference_pct);
            cell_bad += buf;
            cells_ok = false;
        }
    }
    line("3c all forty cells within 15 pp of the reference table", cells_ok, cell_bad);

    // 3d: rank order within each standard.
    bool ranks_ok = true;
    std::string rank_bad;
    for (const auto& rc : rep.ranks) {
        if (!rc.pass) {
            char buf[120];
            std::snprintf(buf, sizeof buf, " [%s: %s %.2f%% !< %s %.2f%%]", rc.standard.c_str(),
                          rc.faster.c_str(), rc.faster_pct, rc.slower.c_str(), rc.slower_pct);
            rank_bad += buf;
            ranks_ok = false;
        }
    }
    line("3d faster speed grades rank below slower on row-major read", ranks_ok, rank_bad);

    char buf[96];
    std::snprintf(buf, sizeof buf, "slowest preset %.1f s", tm.max_preset_seconds);
    line("3e per-preset runtime under 60 s", tm.max_preset_seconds < 60.0, buf);

    // 4: refresh disabled -> >= 99 % everywhere for the optimized mapping.
    bool ro = true;
    std::string ro_bad;
    for (const auto& name : preset_names()) {
        for (Phase p : {Phase::Write, Phase::Read}) {
            const CellResult* c = tm.without_refresh.find(name, Scheme::Optimized, p);
            if (c->util < 0.99) {
                char b2[96];
                std::snprintf(b2, sizeof b2, " [%s %s %.2f%%]", name.c_str(), phase_name(p),
                              c->util * 100);
                ro_bad += b2;
                ro = false;
            }
        }
    }
    char nbuf[96];
    std::snprintf(nbuf, sizeof nbuf, "N=%u (12.5 M elements)%s", n_full, ro_bad.c_str());
    line("4  optimized utilization >= 99 % with refresh disabled", ro, nbuf);

    std::snprintf(buf, sizeof buf, "%llu violations", (unsigned long long)tm.audit_violations);
    line("5  independent timing audit of every simulated trace", tm.audit_violations == 0, buf);
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion1();
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f s", sec);
    line("1e property suite runtime under 60 s", sec < 60.0, buf);
    criterion2();
    criteria3to5(2000, 5000, 32);
    std::printf("[----] 6  cycle-exact reproduction of the published simulator is out of "
                "scope by design; criteria 3-4 are the substituted forms\n");
    if (g_failures) std::printf("%d criterion check(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

#include "tridram/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "tridram/error.hpp"
#include "tridram/oracle.hpp"

namespace tridram {

const char* scheme_name(Scheme s) { return s == Scheme::RowMajor ? "row_major" : "optimized"; }

const CellResult* MatrixResult::find(const std::string& config, Scheme s, Phase p) const {
    for (const auto& c : cells)
        if (c.config == config && c.scheme == s && c.phase == p) return &c;
    return nullptr;
}

std::optional<double> MatrixResult::row_minimum(const std::string& config, Scheme s) const {
    const CellResult* w = find(config, s, Phase::Write);
    const CellResult* r = find(config, s, Phase::Read);
    if (!w || !r) return std::nullopt;
    return std::min(w->util, r->util);
}

namespace {

CellResult run_cell(const DeviceConfig& cfg, Scheme scheme, Phase phase, uint32_t n,
                    bool refresh, uint32_t lookahead) {
    Geometry g(n);
    PhaseStats stats;
    if (scheme == Scheme::RowMajor) {
        RowMajorMapper mapper(g, cfg.topology);
        if (phase == Phase::Write) {
            MappedSource<WriteStream, RowMajorMapper> src(WriteStream(g), mapper);
            stats = simulate_phase(src, cfg, AccessKind::Write, lookahead, refresh);
        } else {
            MappedSource<ReadStream, RowMajorMapper> src(ReadStream(g), mapper);
            stats = simulate_phase(src, cfg, AccessKind::Read, lookahead, refresh);
        }
    } else {
        OptimizedMapper mapper(g, cfg.topology);
        if (phase == Phase::Write) {
            MappedSource<WriteStream, OptimizedMapper> src(WriteStream(g), mapper);
            stats = simulate_phase(src, cfg, AccessKind::Write, lookahead, refresh);
        } else {
            MappedSource<ReadStream, OptimizedMapper> src(ReadStream(g), mapper);
            stats = simulate_phase(src, cfg, AccessKind::Read, lookahead, refresh);
        }
    }
    CellResult out;
    out.config = cfg.name;
    out.scheme = scheme;
    out.phase = phase;
    out.stats = stats;
    out.util = utilization(stats);
    return out;
}

} // namespace

MatrixResult run_matrix(const ExperimentSpec& spec) {
    if (spec.n < 1) throw InvalidGeometryError("interleaver side length must be >= 1");
    if (spec.presets.empty() || spec.schemes.empty())
        throw IncompleteResultsError("nothing to simulate");

    std::vector<DeviceConfig> cfgs;
    for (const auto& name : spec.presets)
        cfgs.push_back(spec.preset_dir.empty() ? load_preset(name)
                                                : load_preset(name, spec.preset_dir));

    struct Job {
        const DeviceConfig* cfg;
        Scheme scheme;
        Phase phase;
    };
    std::vector<Job> jobs;
    for (const auto& cfg : cfgs)
        for (Scheme s : spec.schemes)
            for (Phase p : {Phase::Write, Phase::Read}) jobs.push_back({&cfg, s, p});

    std::vector<std::future<CellResult>> futures;
    futures.reserve(jobs.size());
    for (const Job& j : jobs)
        futures.push_back(std::async(std::launch::async, run_cell, std::cref(*j.cfg), j.scheme,
                                     j.phase, spec.n, spec.refresh, spec.lookahead));

    MatrixResult out;
    out.cells.reserve(jobs.size());
    for (auto& f : futures) out.cells.push_back(f.get());

    if (!spec.out_dir.empty()) emit_reports(out, spec.out_dir);
    return out;
}

const ReferenceTable& reference_table() {
    static const ReferenceTable table{
        {"DDR3-800", 95.99, 96.03, 95.99, 96.26},
        {"DDR3-1600", 95.75, 64.16, 95.91, 96.16},
        {"DDR4-1600", 92.02, 73.92, 92.01, 92.37},
        {"DDR4-3200", 91.83, 43.50, 91.86, 92.15},
        {"DDR5-3200", 100.00, 96.37, 100.00, 100.00},
        {"DDR5-6400", 99.90, 88.95, 99.83, 99.97},
        {"LPDDR4-2133", 99.02, 66.00, 99.41, 98.30},
        {"LPDDR4-4266", 98.03, 35.77, 99.67, 99.72},
        {"LPDDR5-4267", 99.39, 55.87, 99.77, 100.00},
        {"LPDDR5-8533", 97.56, 47.25, 99.14, 99.66},
    };
    return table;
}

ComparisonReport compare_to_reference(const MatrixResult& results, const ReferenceTable& ref,
                                      double tolerance_pp) {
    if (results.cells.empty()) throw IncompleteResultsError("no simulation results");
    ComparisonReport rep;
    rep.tolerance_pp = tolerance_pp;
    rep.all_pass = true;

    for (const auto& row : ref) {
        struct Want {
            Scheme s;
            Phase p;
            double pct;
        };
        const Want wants[4] = {
            {Scheme::RowMajor, Phase::Write, row.row_major_write},
            {Scheme::RowMajor, Phase::Read, row.row_major_read},
            {Scheme::Optimized, Phase::Write, row.optimized_write},
            {Scheme::Optimized, Phase::Read, row.optimized_read},
        };
        for (const auto& w : wants) {
            const CellResult* c = results.find(row.config, w.s, w.p);
            if (!c)
                throw IncompleteResultsError("missing cell " + row.config + "/" +
                                             scheme_name(w.s) + "/" + phase_name(w.p));
            CellComparison cc;
            cc.config = row.config;
            cc.scheme = w.s;
            cc.phase = w.p;
            cc.simulated_pct = c->util * 100.0;
            cc.reference_pct = w.pct;
            cc.diff_pp = std::abs(cc.simulated_pct - cc.reference_pct);
            cc.pass = cc.diff_pp <= tolerance_pp;
            rep.all_pass = rep.all_pass && cc.pass;
            rep.cells.push_back(cc);
        }
    }

    // Speed grades of one standard appear adjacently in the reference table,
    // slower grade first. Faster grades pay more cycles per page miss, so
    // their row-major read utilization must come out lower.
    for (size_t i = 0; i + 1 < ref.size(); ++i) {
        std::string std_a = ref[i].config.substr(0, ref[i].config.find('-'));
        std::string std_b = ref[i + 1].config.substr(0, ref[i + 1].config.find('-'));
        if (std_a != std_b) continue;
        const CellResult* slow = results.find(ref[i].config, Scheme::RowMajor, Phase::Read);
        const CellResult* fast = results.find(ref[i + 1].config, Scheme::RowMajor, Phase::Read);
        if (!slow || !fast)
            throw IncompleteResultsError("missing rank cells for " + std_a);
        RankCheck rc;
        rc.standard = std_a;
        rc.faster = ref[i + 1].config;
        rc.slower = ref[i].config;
        rc.faster_pct = fast->util * 100.0;
        rc.slower_pct = slow->util * 100.0;
        rc.pass = rc.faster_pct < rc.slower_pct;
        rep.all_pass = rep.all_pass && rc.pass;
        rep.ranks.push_back(rc);
    }
    return rep;
}

std::string render_results_csv(const MatrixResult& results) {
    std::string out = "config,scheme,phase,bursts,elapsed_cycles,utilization,page_hits,"
                      "page_misses,activates,refreshes\n";
    char line[256];
    for (const auto& c : results.cells) {
        std::snprintf(line, sizeof line,
                      "%s,%s,%s,%" PRIu64 ",%" PRIu64 ",%.6f,%" PRIu64 ",%" PRIu64 ",%" PRIu64
                      ",%" PRIu64 "\n",
                      c.config.c_str(), scheme_name(c.scheme), phase_name(c.phase),
                      c.stats.bursts, c.stats.elapsed_cycles, c.util, c.stats.page_hits,
                      c.stats.page_misses, c.stats.activates, c.stats.refreshes);
        out += line;
    }
    return out;
}

std::string render_table(const MatrixResult& results) {
    std::ostringstream os;
    os << "Configuration   | Row-Major Write | Row-Major Read | Optimized Write | Optimized Read\n";
    os << "----------------+-----------------+----------------+-----------------+---------------\n";
    auto fmt = [](double pct, bool is_min) {
        char buf[32];
        std::snprintf(buf, sizeof buf, is_min ? "*%6.2f %%*" : " %6.2f %% ", pct);
        return std::string(buf);
    };
    for (const auto& name : preset_names()) {
        bool have_any = false;
        os << name << std::string(name.size() < 16 ? 16 - name.size() : 0, ' ');
        for (Scheme s : {Scheme::RowMajor, Scheme::Optimized}) {
            const CellResult* w = results.find(name, s, Phase::Write);
            const CellResult* r = results.find(name, s, Phase::Read);
            if (!w || !r) {
                os << "|       -        |       -        ";
                continue;
            }
            have_any = true;
            bool wmin = w->util <= r->util;
            os << "|   " << fmt(w->util * 100.0, wmin) << "   |  " << fmt(r->util * 100.0, !wmin);
        }
        os << "|\n";
        (void)have_any;
    }
    os << "\n* minimum of the two phases: the throughput the interleaver actually gets\n";
    return os.str();
}

std::vector<std::string> emit_reports(const MatrixResult& results, const std::string& out_dir) {
    if (results.cells.empty()) throw IncompleteResultsError("no results to report");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::vector<std::string> paths;
    {
        std::string p = out_dir + "/results.csv";
        std::ofstream f(p, std::ios::binary);
        if (!f) throw IoError("cannot write " + p);
        f << render_results_csv(results);
        paths.push_back(p);
    }
    {
        std::string p = out_dir + "/table.txt";
        std::ofstream f(p, std::ios::binary);
        if (!f) throw IoError("cannot write " + p);
        f << render_table(results);
        paths.push_back(p);
    }
    return paths;
}

MatrixResult load_results_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    MatrixResult out;
    std::string line;
    if (!std::getline(f, line)) throw IoError(path + ": empty file");
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 10) throw IoError(path + ": malformed row '" + line + "'");
        CellResult c;
        c.config = fields[0];
        c.scheme = fields[1] == "row_major" ? Scheme::RowMajor : Scheme::Optimized;
        c.phase = fields[2] == std::string("write") ? Phase::Write : Phase::Read;
        c.stats.bursts = std::stoull(fields[3]);
        c.stats.elapsed_cycles = std::stoull(fields[4]);
        c.util = std::stod(fields[5]);
        c.stats.page_hits = std::stoull(fields[6]);
        c.stats.page_misses = std::stoull(fields[7]);
        c.stats.activates = std::stoull(fields[8]);
        c.stats.refreshes = std::stoull(fields[9]);
        out.cells.push_back(c);
    }
    return out;
}

} // namespace tridram

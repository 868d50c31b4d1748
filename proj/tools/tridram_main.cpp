#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "tridram/experiment.hpp"
#include "tridram/oracle.hpp"

using namespace tridram;

namespace {

std::vector<std::string> resolve_presets(const std::string& arg) {
    if (arg == "all") return preset_names();
    return {arg};
}

std::vector<Scheme> resolve_schemes(const std::string& arg) {
    if (arg == "row-major") return {Scheme::RowMajor};
    if (arg == "optimized") return {Scheme::Optimized};
    return {Scheme::RowMajor, Scheme::Optimized};
}

int cmd_simulate(const std::string& preset, const std::string& scheme, uint32_t n, bool refresh,
                 uint32_t lookahead, const std::string& out, const std::string& preset_dir,
                 const std::string& trace_path) {
    ExperimentSpec spec;
    spec.presets = resolve_presets(preset);
    spec.schemes = resolve_schemes(scheme);
    spec.n = n;
    spec.refresh = refresh;
    spec.lookahead = lookahead;
    spec.out_dir = out;
    spec.preset_dir = preset_dir;

    if (!trace_path.empty()) {
        // Address-trace dump for the first (preset, scheme) pair only.
        std::ofstream f(trace_path);
        if (!f) throw IoError("cannot write " + trace_path);
        DeviceConfig cfg = preset_dir.empty() ? load_preset(spec.presets[0])
                                              : load_preset(spec.presets[0], preset_dir);
        Geometry g(n);
        if (spec.schemes[0] == Scheme::RowMajor) {
            RowMajorMapper m(g, cfg.topology);
            dump_trace(f, Phase::Write, WriteStream(g), m);
            dump_trace(f, Phase::Read, ReadStream(g), m);
        } else {
            OptimizedMapper m(g, cfg.topology);
            dump_trace(f, Phase::Write, WriteStream(g), m);
            dump_trace(f, Phase::Read, ReadStream(g), m);
        }
    }

    MatrixResult res = run_matrix(spec);
    std::cout << render_table(res);
    if (!out.empty()) std::cout << "\nreports written to " << out << "/\n";
    return 0;
}

int cmd_verify(const std::string& preset, uint32_t n, const std::string& preset_dir) {
    DeviceConfig cfg =
        preset_dir.empty() ? load_preset(preset) : load_preset(preset, preset_dir);
    Geometry g(n);
    OptimizedMapper mapper(g, cfg.topology);
    const DramTopology& t = cfg.topology;
    bool ok = true;
    auto report = [&](const char* what, bool pass) {
        std::printf("%-34s %s\n", what, pass ? "PASS" : "FAIL");
        ok = ok && pass;
    };

    auto collisions = verify_bijection([&](Position p) { return mapper.map(p); }, g, t);
    report("bijectivity (no collisions)", collisions.empty());

    bool roundtrip = true;
    {
        WriteStream ws(g);
        Position p;
        while (ws.next(p)) {
            if (mapper.unmap(mapper.map(p)) != p) {
                roundtrip = false;
                break;
            }
        }
    }
    report("unmap round-trip", roundtrip);

    bool increments = true;
    {
        WriteStream ws(g);
        Position p;
        uint32_t prev_bank = 0;
        bool have_prev = false;
        uint32_t prev_i = 0;
        while (ws.next(p)) {
            DramAddress a = mapper.map(p);
            if (have_prev && p.i == prev_i && a.bank != (prev_bank + 1) % t.banks())
                increments = false;
            prev_bank = a.bank;
            prev_i = p.i;
            have_prev = true;
        }
    }
    report("bank round-robin within rows", increments);

    MissReport w = oracle_page_misses(WriteStream(g), mapper);
    MissReport r = oracle_page_misses(ReadStream(g), mapper);
    double ratio = r.total_misses ? double(w.total_misses) / double(r.total_misses) : 0.0;
    report("write/read miss balance (10%)", ratio >= 0.9 && ratio <= 1.1);

    std::set<uint64_t> firsts;
    bool distinct = true;
    for (auto& f : w.first_conflict_index)
        if (f && !firsts.insert(*f).second) distinct = false;
    report("staggered first misses distinct", distinct);

    std::printf("write misses %llu, read misses %llu, storage overhead %.4f\n",
                (unsigned long long)w.total_misses, (unsigned long long)r.total_misses,
                mapper.storage_overhead());
    return ok ? 0 : 1;
}

int cmd_compare(const std::string& results_path, double tolerance_pp) {
    MatrixResult res = load_results_csv(results_path);
    ComparisonReport rep = compare_to_reference(res, reference_table(), tolerance_pp);
    for (const auto& c : rep.cells)
        std::printf("%-12s %-10s %-6s sim %7.2f %%  ref %7.2f %%  diff %6.2f pp  %s\n",
                    c.config.c_str(), scheme_name(c.scheme), phase_name(c.phase),
                    c.simulated_pct, c.reference_pct, c.diff_pp, c.pass ? "PASS" : "FAIL");
    for (const auto& rc : rep.ranks)
        std::printf("rank %-7s %s (%.2f %%) < %s (%.2f %%)  %s\n", rc.standard.c_str(),
                    rc.faster.c_str(), rc.faster_pct, rc.slower.c_str(), rc.slower_pct,
                    rc.pass ? "PASS" : "FAIL");
    std::printf("overall: %s\n", rep.all_pass ? "PASS" : "FAIL");
    return rep.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Triangular block interleaver DRAM mapping and bandwidth simulator"};
    app.require_subcommand(1);

    std::string preset = "all", scheme = "both", refresh = "on";
    std::string out, preset_dir, trace_path, results_path;
    uint32_t n = 2000, lookahead = 32;
    double tolerance_pp = 15.0;

    CLI::App* sim = app.add_subcommand("simulate", "Run the experiment matrix");
    sim->add_option("--preset", preset, "Preset name or 'all'")->capture_default_str();
    sim->add_option("--scheme", scheme, "row-major | optimized | both")
        ->check(CLI::IsMember({"row-major", "optimized", "both"}))
        ->capture_default_str();
    sim->add_option("--n", n, "Interleaver side length in bursts")->capture_default_str();
    sim->add_option("--refresh", refresh, "on | off")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    sim->add_option("--lookahead", lookahead, "Scheduler window in requests")
        ->capture_default_str();
    sim->add_option("--out", out, "Report directory");
    sim->add_option("--preset-dir", preset_dir, "Preset file directory");
    sim->add_option("--trace", trace_path, "Dump the address trace of the first matrix cell");

    CLI::App* ver = app.add_subcommand("verify", "Run the mapping property suite");
    ver->add_option("--preset", preset, "Preset name")->required();
    ver->add_option("--n", n, "Interleaver side length in bursts")->capture_default_str();
    ver->add_option("--preset-dir", preset_dir, "Preset file directory");

    CLI::App* cmp = app.add_subcommand("compare", "Compare results.csv to the reference table");
    cmp->add_option("--results", results_path, "results.csv from simulate")->required();
    cmp->add_option("--tolerance-pp", tolerance_pp, "Tolerance in percentage points")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(preset, scheme, n, refresh == "on", lookahead, out, preset_dir,
                                trace_path);
        if (ver->parsed()) return cmd_verify(preset, n, preset_dir);
        if (cmp->parsed()) return cmd_compare(results_path, tolerance_pp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

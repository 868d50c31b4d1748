#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tridram/geometry.hpp"

namespace tridram {

/// Per-device address-space counts. Bank index encoding: the low
/// log2(bank_groups) bits of the bank field are the bank group, so
/// incrementing the bank index by one always switches the group.
struct DramTopology {
    uint32_t bank_groups = 1;      // G
    uint32_t banks_per_group = 1;  // B / G
    uint32_t bursts_per_page = 1;  // C, page size in burst units
    uint32_t rows = 1;             // rows per bank

    uint32_t banks() const { return bank_groups * banks_per_group; }
    uint32_t group_of(uint32_t bank) const { return bank & (bank_groups - 1); }
};

struct DramAddress {
    uint32_t bank = 0;
    uint32_t row = 0;
    uint32_t column = 0;  // burst-aligned

    bool operator==(const DramAddress&) const = default;
    uint64_t packed() const {
        return (uint64_t(bank) << 48) | (uint64_t(row) << 16) | column;
    }
};

/// Derived dimensions of the optimized mapping.
///
///   W x H = C x B   (one DRAM page per bank per tile)
///   d               stagger stride: bank b's view of the index space is
///                   shifted by d*b in both directions, circularly
///   n_pad           index-space extent rounded up to a multiple of max(W, H)
struct MappingParams {
    uint32_t tile_width = 1;   // W
    uint32_t tile_height = 1;  // H
    uint32_t stagger = 1;      // d
    uint32_t n_pad = 0;

    bool square() const { return tile_width == tile_height; }
};

/// Splits C*B into the widest balanced power-of-two rectangle and picks the
/// default stagger stride: 1 when W == B, otherwise B + 1. Both are 1 mod B,
/// which is what makes the per-bank page boundaries land a constant access
/// distance apart (see OptimizedMapper). A caller may force any stride >= 1.
MappingParams derive_params(const Geometry& g, const DramTopology& t);
MappingParams derive_params(const Geometry& g, const DramTopology& t, uint32_t stagger);

/// Baseline: packed triangular linearization L, banks interleaved at burst
/// granularity (the layout an SRAM-style design maps 1:1 onto linear DRAM):
///
///   bank = L mod B, column = (L / B) mod C, row = L / (B*C)
///
/// Sequential writes rotate through all banks burst by burst and advance all
/// pages in lockstep.
class RowMajorMapper {
public:
    RowMajorMapper(Geometry g, DramTopology t);

    DramAddress map(Position p) const;

    const Geometry& geometry() const { return g_; }
    const DramTopology& topology() const { return t_; }

    /// (allocated rows * C * B) / T - 1, a row counting as allocated when
    /// any valid position lands in it.
    double storage_overhead() const;

private:
    Geometry g_;
    DramTopology t_;
};

/// The optimized mapping. Three ingredients:
///
///  1. bank = (i + j) mod B. Both traversal directions walk anti-diagonals,
///     so the bank index increments by one with every access and the bank
///     group alternates whenever G >= 2.
///
///  2. The index space is cut into tiles of C*B cells; each tile owns one
///     DRAM row on every bank, so page misses are spread evenly over both
///     access directions. A tile is W columns by H rows taken every q-th
///     row of a W x W band (q = W/H, a power of two dividing B); q = 1 is
///     the plain square block. Striping is invisible to both sweep
///     directions: a row sweep stays on one stripe inside a band, and a
///     column sweep steps by B, a multiple of q, so it never leaves its
///     stripe class either. Each phase therefore sees runs of W/B
///     consecutive accesses per page, and the write and read phases take
///     exactly the same number of misses at every N (the open-page events
///     are #(row, band) and #(column, band) incidences, swapped 1:1 by the
///     transpose symmetry of the triangle).
///
///  3. Bank-dependent stagger: bank b's coordinates are shifted by d*b
///     (circular in the padded space) before tiling, so the remaining page
///     misses of different banks land on different access indices and a
///     miss on one bank hides behind hits on the others. The shift is
///     applied after the bank is computed, so it never changes a position's
///     bank, and (1 - 2d) odd keeps the bank-to-diagonal assignment inside
///     a tile a bijection.
///
/// Tiles that contain no valid triangle position are never allocated a DRAM
/// row: the allocation table densely renumbers the used tiles, which is what
/// keeps the storage overhead of the triangular shape small.
///
/// All index arithmetic is additions, shifts and masks (plus one conditional
/// subtract for the circular shift).
class OptimizedMapper {
public:
    OptimizedMapper(Geometry g, DramTopology t);
    OptimizedMapper(Geometry g, DramTopology t, MappingParams m);

    DramAddress map(Position p) const;

    /// Exact inverse over the mapped image; anything else is rejected.
    Position unmap(DramAddress a) const;

    double storage_overhead() const;
    uint32_t rows_allocated() const { return rows_allocated_; }

    const Geometry& geometry() const { return g_; }
    const DramTopology& topology() const { return t_; }
    const MappingParams& params() const { return m_; }

private:
    uint64_t raw_page(Position p, uint32_t bank) const;
    void build_allocation_table();

    Geometry g_;
    DramTopology t_;
    MappingParams m_;
    uint32_t supers_per_side_ = 0;   // n_pad / max(W, H)
    uint32_t pages_per_super_ = 1;   // 1 (square) or 2 (parity split)
    std::vector<uint32_t> page_to_row_;  // raw page id -> dense row, or UNALLOCATED
    std::vector<uint32_t> row_to_page_;  // dense row -> raw page id
    uint32_t rows_allocated_ = 0;

    static constexpr uint32_t kUnallocated = 0xffffffffu;
};

enum class Phase { Write, Read };

const char* phase_name(Phase p);

/// One line per access: "phase,index,i,j,bank,row,column".
template <typename Stream, typename Mapper>
void dump_trace(std::ostream& os, Phase phase, Stream stream, const Mapper& mapper);

} // namespace tridram

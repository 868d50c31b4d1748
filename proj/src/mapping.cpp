#include "tridram/mapping.hpp"

#include <bit>
#include <ostream>
#include <string>

namespace tridram {

namespace {

bool is_pow2(uint32_t x) { return x != 0 && (x & (x - 1)) == 0; }

void check_topology(const DramTopology& t) {
    if (!is_pow2(t.bank_groups) || !is_pow2(t.banks_per_group) || !is_pow2(t.bursts_per_page))
        throw UnsupportedTopologyError("bank and page counts must be powers of two");
    if (t.rows == 0) throw UnsupportedTopologyError("row count must be >= 1");
}

} // namespace

MappingParams derive_params(const Geometry& g, const DramTopology& t) {
    MappingParams m = derive_params(g, t, 0);
    // The stride must be 1 mod B: bank b's accesses sit on diagonal class b,
    // so only then do the per-bank page boundaries land a constant access
    // distance apart inside a tile span (d*b plus a bank-independent phase).
    // B+1 spreads the B boundaries evenly across the span; W == B needs no
    // spread beyond the class offset itself.
    m.stagger = m.tile_width == t.banks() ? 1 : t.banks() + 1;
    return m;
}

MappingParams derive_params(const Geometry& g, const DramTopology& t, uint32_t stagger) {
    check_topology(t);
    uint32_t b = t.banks();
    uint32_t c = t.bursts_per_page;
    uint32_t k = std::countr_zero(c) + std::countr_zero(b);
    // Every tile row span must cover all banks: the short tile side has to
    // be a multiple of B.
    if ((k % 2 == 0 && c < b) || (k % 2 == 1 && c < 2 * b))
        throw UnsupportedTopologyError("page too small for the bank count; tiles cannot span "
                                       "every bank");
    // Tile width: at least the balanced split of C*B, widened toward 4*B so
    // each bank keeps a page for four consecutive accesses per sweep (that
    // spacing is what rides out tRRD/tFAW on fast devices), capped where the
    // stripe period W^2/(C*B) would exceed the bank stride B.
    uint32_t lo = 1u << ((k + 1) / 2);
    uint32_t hi = 1u << ((k + std::countr_zero(b)) / 2);  // floor sqrt of C*B*B
    uint32_t w = std::clamp(4 * b, lo, std::max(lo, hi));
    MappingParams m;
    m.tile_width = w;
    m.tile_height = (c * b) / w;
    m.stagger = stagger;
    uint32_t s = m.tile_width;  // max(W, H)
    m.n_pad = (g.n() + s - 1) / s * s;
    return m;
}

RowMajorMapper::RowMajorMapper(Geometry g, DramTopology t) : g_(g), t_(t) {
    check_topology(t_);
}

DramAddress RowMajorMapper::map(Position p) const {
    uint64_t l = g_.linear_index(p);  // throws OutOfRangeError when invalid
    uint32_t b = t_.banks();
    uint32_t c = t_.bursts_per_page;
    DramAddress a;
    a.bank = uint32_t(l % b);
    a.column = uint32_t((l / b) % c);
    a.row = uint32_t(l / (uint64_t(b) * c));
    if (a.row >= t_.rows)
        throw UnsupportedTopologyError("triangle does not fit in the device rows");
    return a;
}

double RowMajorMapper::storage_overhead() const {
    uint64_t cells_per_row = uint64_t(t_.banks()) * t_.bursts_per_page;
    uint64_t rows_used = (g_.total() + cells_per_row - 1) / cells_per_row;
    return double(rows_used * cells_per_row) / double(g_.total()) - 1.0;
}

OptimizedMapper::OptimizedMapper(Geometry g, DramTopology t)
    : OptimizedMapper(g, t, derive_params(g, t)) {}

OptimizedMapper::OptimizedMapper(Geometry g, DramTopology t, MappingParams m)
    : g_(g), t_(t), m_(m) {
    check_topology(t_);
    if (uint64_t(m_.tile_width) * m_.tile_height !=
        uint64_t(t_.bursts_per_page) * t_.banks())
        throw UnsupportedTopologyError("tile dimensions do not match page capacity");
    if (m_.stagger < 1)
        throw UnsupportedTopologyError("stagger stride must be >= 1");
    if (!is_pow2(m_.tile_width) || !is_pow2(m_.tile_height) ||
        m_.tile_width < m_.tile_height)
        throw UnsupportedTopologyError("tile sides must be powers of two with W >= H");
    uint32_t s = m_.tile_width;
    // Stripe period: a tile is W columns by H rows taken every q-th row of a
    // W x W band. q must divide the bank stride B so a column sweep stays on
    // one stripe class, and W must cover all banks.
    uint32_t q = m_.tile_width / m_.tile_height;
    if (q > t_.banks() || m_.tile_width % t_.banks() != 0)
        throw UnsupportedTopologyError("tile shape incompatible with the bank count");
    if (m_.n_pad < g_.n() || m_.n_pad % s != 0)
        throw UnsupportedTopologyError("padded extent must cover N and be a multiple of the "
                                       "tile span");
    supers_per_side_ = m_.n_pad / s;
    pages_per_super_ = q;
    build_allocation_table();
}

uint64_t OptimizedMapper::raw_page(Position p, uint32_t bank) const {
    uint32_t n_pad = m_.n_pad;
    uint32_t o = (m_.stagger * bank) % n_pad;
    uint32_t si = p.i >= o ? p.i - o : p.i + n_pad - o;
    uint32_t sj = p.j >= o ? p.j - o : p.j + n_pad - o;
    uint32_t s = m_.tile_width;
    uint32_t sti = si / s, stj = sj / s;
    uint64_t super_id = uint64_t(sti) * supers_per_side_ + stj;
    return super_id * pages_per_super_ + (si & (pages_per_super_ - 1));
}

void OptimizedMapper::build_allocation_table() {
    uint64_t n_raw = uint64_t(supers_per_side_) * supers_per_side_ * pages_per_super_;
    page_to_row_.assign(n_raw, kUnallocated);
    // A page is allocated iff some valid position maps into it. One pass over
    // the triangle settles that exactly, padding included.
    WriteStream ws(g_);
    Position p;
    uint32_t b_mask = t_.banks() - 1;
    while (ws.next(p)) {
        uint32_t bank = (p.i + p.j) & b_mask;
        page_to_row_[raw_page(p, bank)] = 0;
    }
    rows_allocated_ = 0;
    for (auto& e : page_to_row_) {
        if (e != kUnallocated) e = rows_allocated_++;
    }
    if (rows_allocated_ > t_.rows)
        throw UnsupportedTopologyError("triangle needs " + std::to_string(rows_allocated_) +
                                       " rows per bank, device has " +
                                       std::to_string(t_.rows));
    row_to_page_.assign(rows_allocated_, 0);
    for (uint64_t raw = 0; raw < n_raw; ++raw) {
        if (page_to_row_[raw] != kUnallocated) row_to_page_[page_to_row_[raw]] = uint32_t(raw);
    }
}

DramAddress OptimizedMapper::map(Position p) const {
    if (!g_.contains(p)) throw OutOfRangeError("position outside triangle");
    uint32_t b_count = t_.banks();
    uint32_t bank = (p.i + p.j) & (b_count - 1);

    uint32_t n_pad = m_.n_pad;
    uint32_t o = (m_.stagger * bank) % n_pad;
    uint32_t si = p.i >= o ? p.i - o : p.i + n_pad - o;
    uint32_t sj = p.j >= o ? p.j - o : p.j + n_pad - o;

    uint32_t s = m_.tile_width;
    uint32_t li = si & (s - 1);
    uint32_t lj = sj & (s - 1);

    // Within a page a cell is addressed by (stripe row, bank-aligned column
    // slot); q = 1 degenerates to the tile-local linear index over B.
    uint32_t q = pages_per_super_;
    uint32_t column = (li / q) * (s / b_count) + lj / b_count;

    DramAddress a;
    a.bank = bank;
    a.column = column;
    a.row = page_to_row_[raw_page(p, bank)];
    return a;
}

Position OptimizedMapper::unmap(DramAddress a) const {
    uint32_t b_count = t_.banks();
    if (a.bank >= b_count || a.column >= t_.bursts_per_page || a.row >= rows_allocated_)
        throw UnmappedAddressError("address outside the mapped image");
    uint32_t raw = row_to_page_[a.row];

    uint32_t s = m_.tile_width;
    uint32_t q = pages_per_super_;
    uint32_t super_id = raw / q;
    uint32_t stripe = raw % q;
    uint32_t sti = super_id / supers_per_side_;
    uint32_t stj = super_id % supers_per_side_;

    // Diagonal class of the shifted coordinates for this bank: the stagger
    // moves i+j by -2*d*bank, and (1-2d) is odd, so the class is fixed.
    int64_t d = m_.stagger;
    uint32_t cls = uint32_t(((1 - 2 * d) * int64_t(a.bank) % b_count + b_count) % b_count);

    uint32_t slots = s / b_count;
    uint32_t li = q * (a.column / slots) + stripe;
    uint32_t lj_base = (a.column % slots) * b_count;
    uint32_t lj = lj_base + ((cls + 2 * b_count - li % b_count) % b_count);

    uint32_t n_pad = m_.n_pad;
    uint32_t o = (m_.stagger * a.bank) % n_pad;
    uint32_t i = sti * s + li + o;
    if (i >= n_pad) i -= n_pad;
    uint32_t j = stj * s + lj + o;
    if (j >= n_pad) j -= n_pad;

    Position p{i, j};
    if (!g_.contains(p) || ((p.i + p.j) & (b_count - 1)) != a.bank ||
        page_to_row_[raw_page(p, a.bank)] != a.row)
        throw UnmappedAddressError("address was never produced by the mapping");
    return p;
}

double OptimizedMapper::storage_overhead() const {
    uint64_t cells = uint64_t(rows_allocated_) * t_.bursts_per_page * t_.banks();
    return double(cells) / double(g_.total()) - 1.0;
}

const char* phase_name(Phase p) { return p == Phase::Write ? "write" : "read"; }

template <typename Stream, typename Mapper>
void dump_trace(std::ostream& os, Phase phase, Stream stream, const Mapper& mapper) {
    Position p;
    uint64_t idx = 0;
    const char* name = phase_name(phase);
    while (stream.next(p)) {
        DramAddress a = mapper.map(p);
        os << name << ',' << idx++ << ',' << p.i << ',' << p.j << ',' << a.bank << ','
           << a.row << ',' << a.column << '\n';
    }
}

template void dump_trace<WriteStream, RowMajorMapper>(std::ostream&, Phase, WriteStream,
                                                      const RowMajorMapper&);
template void dump_trace<ReadStream, RowMajorMapper>(std::ostream&, Phase, ReadStream,
                                                     const RowMajorMapper&);
template void dump_trace<WriteStream, OptimizedMapper>(std::ostream&, Phase, WriteStream,
                                                       const OptimizedMapper&);
template void dump_trace<ReadStream, OptimizedMapper>(std::ostream&, Phase, ReadStream,
                                                      const OptimizedMapper&);

} // namespace tridram

#include "tridram/geometry.hpp"

#include <set>
#include <string>

namespace tridram {

uint64_t triangle_size(uint32_t n) {
    if (n == 0) throw InvalidGeometryError("triangle side length must be >= 1");
    return uint64_t(n) * (uint64_t(n) + 1) / 2;
}

Geometry::Geometry(uint32_t n) : n_(n), total_(triangle_size(n)) {}

uint64_t Geometry::linear_index(Position p) const {
    if (!contains(p)) throw OutOfRangeError("position outside triangle");
    // Row i starts after rows 0..i-1, which hold n + (n-1) + ... + (n-i+1).
    uint64_t row_start = uint64_t(p.i) * n_ - uint64_t(p.i) * (p.i - 1) / 2;
    return row_start + p.j;
}

uint32_t symbols_per_burst(uint32_t symbol_bits, uint32_t burst_bits) {
    if (symbol_bits == 0 || burst_bits == 0)
        throw InvalidPackingError("symbol and burst widths must be >= 1 bit");
    if (symbol_bits > burst_bits)
        throw InvalidPackingError("symbol wider than a DRAM burst");
    return burst_bits / symbol_bits;
}

BurstPacking make_burst_packing(uint32_t symbol_bits, uint32_t burst_bits) {
    return {symbol_bits, burst_bits, symbols_per_burst(symbol_bits, burst_bits)};
}

std::vector<std::vector<uint32_t>> assign_codewords(uint32_t slots,
                                                    const std::vector<uint32_t>& codeword_ids) {
    if (slots == 0) throw InvalidPackingError("slot count must be >= 1");
    std::set<uint32_t> distinct(codeword_ids.begin(), codeword_ids.end());
    if (distinct.size() < slots)
        throw InfeasiblePackingError("need at least " + std::to_string(slots) +
                                     " distinct code words, got " +
                                     std::to_string(distinct.size()));

    // Round-robin: consecutive ids fill consecutive slots; a burst is closed
    // once full. A burst that would receive a duplicate id is infeasible.
    std::vector<std::vector<uint32_t>> bursts;
    std::vector<uint32_t> current;
    std::set<uint32_t> in_current;
    current.reserve(slots);
    for (uint32_t id : codeword_ids) {
        if (!in_current.insert(id).second)
            throw InfeasiblePackingError("duplicate code word id " + std::to_string(id) +
                                         " within one burst");
        current.push_back(id);
        if (current.size() == slots) {
            bursts.push_back(std::move(current));
            current.clear();
            in_current.clear();
        }
    }
    if (!current.empty()) bursts.push_back(std::move(current));
    return bursts;
}

} // namespace tridram

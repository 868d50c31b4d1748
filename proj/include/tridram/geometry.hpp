#pragma once

#include <cstdint>
#include <vector>

#include "tridram/error.hpp"

namespace tridram {

/// A (row, column) coordinate in the triangular index space.
/// One position corresponds to one DRAM burst.
struct Position {
    uint32_t i = 0;
    uint32_t j = 0;

    bool operator==(const Position&) const = default;
};

/// Triangular index space: the set {(i, j) : i + j <= n - 1}.
/// Row k holds n - k entries; the shape is symmetric under transpose,
/// which is what makes the row-wise write / column-wise read duality work.
class Geometry {
public:
    explicit Geometry(uint32_t n);

    uint32_t n() const { return n_; }
    uint64_t total() const { return total_; }

    bool contains(Position p) const {
        return p.i < n_ && p.j < n_ && uint64_t(p.i) + p.j <= uint64_t(n_) - 1;
    }

    /// Packed row-wise linear index: rows 0..i-1 fully, then j.
    uint64_t linear_index(Position p) const;

private:
    uint32_t n_;
    uint64_t total_;
};

/// n(n+1)/2, with n = 0 rejected.
uint64_t triangle_size(uint32_t n);

/// Row-major traversal of the triangle: row 0 left to right, then row 1, ...
/// Restartable generator; constant memory.
class WriteStream {
public:
    explicit WriteStream(Geometry g) : g_(g) { reset(); }

    void reset() { i_ = 0; j_ = 0; done_ = (g_.n() == 0); }

    bool next(Position& out) {
        if (done_) return false;
        out = {i_, j_};
        if (j_ + 1 < g_.n() - i_) {
            ++j_;
        } else {
            j_ = 0;
            ++i_;
            if (i_ >= g_.n()) done_ = true;
        }
        return true;
    }

    const Geometry& geometry() const { return g_; }

private:
    Geometry g_;
    uint32_t i_ = 0, j_ = 0;
    bool done_ = false;
};

/// Column-major traversal: column 0 top to bottom, then column 1, ...
class ReadStream {
public:
    explicit ReadStream(Geometry g) : g_(g) { reset(); }

    void reset() { i_ = 0; j_ = 0; done_ = (g_.n() == 0); }

    bool next(Position& out) {
        if (done_) return false;
        out = {i_, j_};
        if (i_ + 1 < g_.n() - j_) {
            ++i_;
        } else {
            i_ = 0;
            ++j_;
            if (j_ >= g_.n()) done_ = true;
        }
        return true;
    }

    const Geometry& geometry() const { return g_; }

private:
    Geometry g_;
    uint32_t i_ = 0, j_ = 0;
    bool done_ = false;
};

/// Burst packing contract of the SRAM pre-stage: how many symbols fit in
/// one DRAM burst.
struct BurstPacking {
    uint32_t symbol_bits = 0;
    uint32_t burst_bits = 0;
    uint32_t slots = 0;
};

/// floor(burst_bits / symbol_bits); symbols wider than a burst are rejected.
uint32_t symbols_per_burst(uint32_t symbol_bits, uint32_t burst_bits);

BurstPacking make_burst_packing(uint32_t symbol_bits, uint32_t burst_bits);

/// Assigns code word ids to the slots of consecutive bursts, round-robin
/// over the id sequence. Every burst must end up with pairwise-distinct ids;
/// fewer distinct ids than slots is infeasible.
std::vector<std::vector<uint32_t>> assign_codewords(uint32_t slots,
                                                    const std::vector<uint32_t>& codeword_ids);

} // namespace tridram

#include <doctest.h>

#include <set>

#include "tridram/geometry.hpp"

using namespace tridram;

TEST_CASE("triangle_size") {
    CHECK(triangle_size(1) == 1);
    CHECK(triangle_size(4) == 10);
    CHECK(triangle_size(5000) == 12502500);
    CHECK_THROWS_AS(triangle_size(0), InvalidGeometryError);
}

TEST_CASE("write stream order") {
    Geometry g(2);
    WriteStream ws(g);
    Position p;
    std::vector<Position> got;
    while (ws.next(p)) got.push_back(p);
    CHECK(got == std::vector<Position>{{0, 0}, {0, 1}, {1, 0}});

    Geometry g4(4);
    WriteStream ws4(g4);
    std::vector<Position> first5;
    for (int k = 0; k < 5; ++k) {
        REQUIRE(ws4.next(p));
        first5.push_back(p);
    }
    CHECK(first5 == std::vector<Position>{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}});
}

TEST_CASE("read stream order") {
    Geometry g(2);
    ReadStream rs(g);
    Position p;
    std::vector<Position> got;
    while (rs.next(p)) got.push_back(p);
    CHECK(got == std::vector<Position>{{0, 0}, {1, 0}, {0, 1}});

    Geometry g4(4);
    ReadStream rs4(g4);
    std::vector<Position> first5;
    for (int k = 0; k < 5; ++k) {
        REQUIRE(rs4.next(p));
        first5.push_back(p);
    }
    CHECK(first5 == std::vector<Position>{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0, 1}});
}

TEST_CASE("streams conserve the triangle") {
    for (uint32_t n : {1u, 2u, 7u, 64u, 129u}) {
        Geometry g(n);
        std::set<std::pair<uint32_t, uint32_t>> w, r;
        Position p;
        WriteStream ws(g);
        while (ws.next(p)) {
            CHECK(g.contains(p));
            CHECK(w.emplace(p.i, p.j).second);  // no duplicates
        }
        ReadStream rs(g);
        while (rs.next(p)) CHECK(r.emplace(p.i, p.j).second);
        CHECK(w.size() == g.total());
        CHECK(w == r);
    }
}

TEST_CASE("read is the transpose image of write") {
    Geometry g(9);
    std::vector<Position> w, r;
    Position p;
    WriteStream ws(g);
    while (ws.next(p)) w.push_back(p);
    ReadStream rs(g);
    while (rs.next(p)) r.push_back(p);
    REQUIRE(w.size() == r.size());
    // (i,j) appears in read order at the rank (j,i) holds in write order.
    for (size_t k = 0; k < w.size(); ++k) {
        CHECK(r[k].i == w[k].j);
        CHECK(r[k].j == w[k].i);
    }
}

TEST_CASE("linear index walks write order") {
    Geometry g(13);
    WriteStream ws(g);
    Position p;
    uint64_t expect = 0;
    while (ws.next(p)) CHECK(g.linear_index(p) == expect++);
    CHECK_THROWS_AS(g.linear_index({7, 7}), OutOfRangeError);
}

TEST_CASE("symbols_per_burst") {
    CHECK(symbols_per_burst(3, 512) == 170);
    CHECK(symbols_per_burst(8, 512) == 64);
    CHECK(symbols_per_burst(512, 512) == 1);
    CHECK_THROWS_AS(symbols_per_burst(513, 512), InvalidPackingError);
    CHECK_THROWS_AS(symbols_per_burst(0, 512), InvalidPackingError);
}

TEST_CASE("assign_codewords round-robin") {
    std::vector<uint32_t> ids;
    for (int rep = 0; rep < 3; ++rep)
        for (uint32_t id = 0; id < 4; ++id) ids.push_back(id);
    auto bursts = assign_codewords(4, ids);
    REQUIRE(bursts.size() == 3);
    for (auto& b : bursts) {
        std::set<uint32_t> distinct(b.begin(), b.end());
        CHECK(distinct.size() == b.size());
    }
    CHECK(bursts[0] == std::vector<uint32_t>{0, 1, 2, 3});
}

TEST_CASE("assign_codewords rejects duplicates in one burst") {
    CHECK_THROWS_AS(assign_codewords(2, {7, 7}), InfeasiblePackingError);
}

TEST_CASE("one symbol per code word at full burst width") {
    std::vector<uint32_t> ids(170);
    for (uint32_t k = 0; k < 170; ++k) ids[k] = 1000 + k;
    auto bursts = assign_codewords(170, ids);
    REQUIRE(bursts.size() == 1);
    std::set<uint32_t> distinct(bursts[0].begin(), bursts[0].end());
    CHECK(distinct.size() == 170);
}

#include "agelab/graph.hpp"

#include <doctest.h>

#include <algorithm>

using namespace agelab;

TEST_CASE("segment endpoints have one neighbour")
{
    const Graph g = Graph::segment(10);
    CHECK(g.vertex_count() == 21);
    CHECK(g.neighbors(0).size() == 1);
    CHECK(g.neighbors(g.origin()).size() == 2);
    CHECK(g.label(0).coords == std::vector<std::int64_t>{-10});
    CHECK(g.label(g.origin()).coords == std::vector<std::int64_t>{0});
}

TEST_CASE("torus vertices have four distinct neighbours")
{
    const Graph g = Graph::torus(4);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        auto nb = g.neighbors(v);
        std::sort(nb.begin(), nb.end());
        CHECK(std::unique(nb.begin(), nb.end()) == nb.end());
        CHECK(nb.size() == 4);
    }
    CHECK(g.index(VertexLabel{{2, 3}}) == 2 * 4 + 3);
}

TEST_CASE("hypercube neighbours are single flips")
{
    const Graph g = Graph::hypercube(3);
    const Vertex all_up = 0b111;
    CHECK(g.label(all_up).coords == std::vector<std::int64_t>{1, 1, 1});
    CHECK(g.label(0).coords == std::vector<std::int64_t>{-1, -1, -1});
    auto nb = g.neighbors(all_up);
    std::sort(nb.begin(), nb.end());
    CHECK(nb == std::vector<Vertex>{0b011, 0b101, 0b110});
}

TEST_CASE("neighbour relation is symmetric and degrees sum to twice the edges")
{
    for (const char* spec : {"segment:6", "torus:5", "torus:3", "complete:7", "hypercube:5"}) {
        const Graph g = Graph::parse(spec);
        std::size_t degree_sum = 0, edge_count = 0;
        for (Vertex x = 0; x < g.vertex_count(); ++x) {
            const auto nx = g.neighbors(x);
            CHECK(nx.size() == g.degree(x));
            degree_sum += nx.size();
            for (Vertex y : nx) {
                const auto ny = g.neighbors(y);
                CHECK(std::count(ny.begin(), ny.end(), x) == std::count(nx.begin(), nx.end(), y));
                edge_count += x < y;
            }
        }
        INFO(spec);
        CHECK(degree_sum == 2 * edge_count);
    }
}

TEST_CASE("label and index round trip")
{
    for (const char* spec : {"segment:4", "torus:3", "complete:5", "hypercube:4"}) {
        const Graph g = Graph::parse(spec);
        for (Vertex v = 0; v < g.vertex_count(); ++v) CHECK(g.index(g.label(v)) == v);
        CHECK(Graph::parse(g.spec()) == g);
    }
}

TEST_CASE("parse rejects malformed specs and oversized hypercubes")
{
    CHECK_THROWS_AS(Graph::parse("hypercube:30"), std::invalid_argument);
    CHECK_NOTHROW(Graph::parse("hypercube:24"));
    CHECK_THROWS_AS(Graph::parse("ring:5"), std::invalid_argument);
    CHECK_THROWS_AS(Graph::parse("segment:"), std::invalid_argument);
    CHECK_THROWS_AS(Graph::parse("torus:-3"), std::invalid_argument);
    CHECK_THROWS_AS(Graph::torus(2), std::invalid_argument);
    CHECK_THROWS_AS(Graph::segment(3).neighbors(7), std::out_of_range);
}

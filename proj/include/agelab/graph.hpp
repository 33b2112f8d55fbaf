#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agelab {

using Vertex = std::uint32_t;

enum class GraphKind { segment, torus2d, complete, hypercube };

inline constexpr int max_hypercube_dim = 24;

/// Structured vertex label.
///   segment:   {site}            with site in [-L, L]
///   torus2d:   {row, col}
///   complete:  {index}
///   hypercube: {s_0, ..., s_{N-1}} with s_i in {-1, +1}
struct VertexLabel {
    std::vector<std::int64_t> coords;
    bool operator==(const VertexLabel&) const = default;
};

/// Finite graph for the trap-model topologies: a segment of Z, a periodic
/// square torus, the complete graph and the hypercube {-1,1}^N.
class Graph {
public:
    static Graph segment(std::int64_t half_length);
    static Graph torus(std::int64_t side);
    static Graph complete(std::int64_t size);
    static Graph hypercube(int dim);

    /// "segment:L", "torus:L", "complete:M", "hypercube:N".
    static Graph parse(std::string_view spec);

    GraphKind kind() const noexcept { return kind_; }
    std::int64_t param() const noexcept { return param_; }
    std::size_t vertex_count() const noexcept { return count_; }
    std::string spec() const;

    std::size_t degree(Vertex v) const;
    std::vector<Vertex> neighbors(Vertex v) const;

    /// Calls f(y) for each neighbour y of v. Hypercube order is by flipped bit;
    /// other kinds are increasing. No range check.
    template <class F>
    void for_each_neighbor(Vertex v, F&& f) const
    {
        switch (kind_) {
        case GraphKind::segment:
            if (v > 0) f(v - 1);
            if (v + 1 < count_) f(v + 1);
            break;
        case GraphKind::torus2d: {
            const auto L = static_cast<Vertex>(param_);
            const Vertex r = v / L, c = v % L;
            Vertex nb[4] = {((r + L - 1) % L) * L + c, ((r + 1) % L) * L + c,
                            r * L + (c + L - 1) % L, r * L + (c + 1) % L};
            sort4(nb);
            for (Vertex y : nb) f(y);
            break;
        }
        case GraphKind::complete:
            for (Vertex y = 0; y < count_; ++y)
                if (y != v) f(y);
            break;
        case GraphKind::hypercube:
            for (int i = 0; i < param_; ++i) f(v ^ (Vertex{1} << i));
            break;
        }
    }

    VertexLabel label(Vertex v) const;
    Vertex index(const VertexLabel& label) const;

    /// Segment only: index of site 0.
    Vertex origin() const;

    bool operator==(const Graph& o) const noexcept { return kind_ == o.kind_ && param_ == o.param_; }

private:
    Graph(GraphKind kind, std::int64_t param, std::size_t count)
        : kind_(kind), param_(param), count_(count)
    {
    }

    void check(Vertex v) const
    {
        if (v >= count_) throw std::out_of_range("vertex " + std::to_string(v) + " out of range for " + spec());
    }

    static void sort4(Vertex (&a)[4]) noexcept;

    GraphKind kind_;
    std::int64_t param_;
    std::size_t count_;
};

}  // namespace agelab

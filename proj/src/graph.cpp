#include "agelab/graph.hpp"

#include <algorithm>
#include <charconv>

namespace agelab {

Graph Graph::segment(std::int64_t half_length)
{
    if (half_length < 1) throw std::invalid_argument("segment half-length must be >= 1");
    if (2 * half_length + 1 > std::int64_t{UINT32_MAX}) throw std::invalid_argument("segment too long");
    return Graph(GraphKind::segment, half_length, static_cast<std::size_t>(2 * half_length + 1));
}

Graph Graph::torus(std::int64_t side)
{
    // side 2 would give duplicate neighbours
    if (side < 3) throw std::invalid_argument("torus side must be >= 3");
    if (side > 65535) throw std::invalid_argument("torus too large");
    return Graph(GraphKind::torus2d, side, static_cast<std::size_t>(side * side));
}

Graph Graph::complete(std::int64_t size)
{
    if (size < 1) throw std::invalid_argument("complete graph needs >= 1 vertex");
    if (size > std::int64_t{UINT32_MAX}) throw std::invalid_argument("complete graph too large");
    return Graph(GraphKind::complete, size, static_cast<std::size_t>(size));
}

Graph Graph::hypercube(int dim)
{
    if (dim < 1) throw std::invalid_argument("hypercube dimension must be >= 1");
    if (dim > max_hypercube_dim)
        throw std::invalid_argument("hypercube dimension " + std::to_string(dim) + " exceeds cap " +
                                    std::to_string(max_hypercube_dim));
    return Graph(GraphKind::hypercube, dim, std::size_t{1} << dim);
}

Graph Graph::parse(std::string_view spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("graph spec must be kind:size, got '" + std::string(spec) + "'");
    const auto kind = spec.substr(0, colon);
    const auto num = spec.substr(colon + 1);
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
    if (ec != std::errc{} || ptr != num.data() + num.size())
        throw std::invalid_argument("bad graph size in '" + std::string(spec) + "'");
    if (kind == "segment") return segment(n);
    if (kind == "torus") return torus(n);
    if (kind == "complete") return complete(n);
    if (kind == "hypercube") {
        if (n > max_hypercube_dim)
            throw std::invalid_argument("hypercube dimension " + std::to_string(n) + " exceeds cap " +
                                        std::to_string(max_hypercube_dim));
        return hypercube(static_cast<int>(std::max<std::int64_t>(n, 0)));
    }
    throw std::invalid_argument("unknown graph kind '" + std::string(kind) + "'");
}

std::string Graph::spec() const
{
    switch (kind_) {
    case GraphKind::segment: return "segment:" + std::to_string(param_);
    case GraphKind::torus2d: return "torus:" + std::to_string(param_);
    case GraphKind::complete: return "complete:" + std::to_string(param_);
    case GraphKind::hypercube: return "hypercube:" + std::to_string(param_);
    }
    return {};
}

std::size_t Graph::degree(Vertex v) const
{
    check(v);
    switch (kind_) {
    case GraphKind::segment:
        return (v > 0 ? 1u : 0u) + (v + 1 < count_ ? 1u : 0u);
    case GraphKind::torus2d: return 4;
    case GraphKind::complete: return count_ - 1;
    case GraphKind::hypercube: return static_cast<std::size_t>(param_);
    }
    return 0;
}

std::vector<Vertex> Graph::neighbors(Vertex v) const
{
    check(v);
    std::vector<Vertex> out;
    out.reserve(kind_ == GraphKind::complete ? count_ - 1 : 4);
    for_each_neighbor(v, [&](Vertex y) { out.push_back(y); });
    if (kind_ == GraphKind::hypercube) std::sort(out.begin(), out.end());
    return out;
}

VertexLabel Graph::label(Vertex v) const
{
    check(v);
    switch (kind_) {
    case GraphKind::segment: return {{static_cast<std::int64_t>(v) - param_}};
    case GraphKind::torus2d: return {{static_cast<std::int64_t>(v) / param_, static_cast<std::int64_t>(v) % param_}};
    case GraphKind::complete: return {{static_cast<std::int64_t>(v)}};
    case GraphKind::hypercube: {
        VertexLabel l;
        l.coords.resize(static_cast<std::size_t>(param_));
        for (int i = 0; i < param_; ++i) l.coords[i] = ((v >> i) & 1u) ? 1 : -1;
        return l;
    }
    }
    return {};
}

Vertex Graph::index(const VertexLabel& label) const
{
    const auto& c = label.coords;
    auto bad = [&] { return std::out_of_range("label out of range for " + spec()); };
    switch (kind_) {
    case GraphKind::segment:
        if (c.size() != 1 || c[0] < -param_ || c[0] > param_) throw bad();
        return static_cast<Vertex>(c[0] + param_);
    case GraphKind::torus2d:
        if (c.size() != 2 || c[0] < 0 || c[0] >= param_ || c[1] < 0 || c[1] >= param_) throw bad();
        return static_cast<Vertex>(c[0] * param_ + c[1]);
    case GraphKind::complete:
        if (c.size() != 1 || c[0] < 0 || c[0] >= param_) throw bad();
        return static_cast<Vertex>(c[0]);
    case GraphKind::hypercube: {
        if (c.size() != static_cast<std::size_t>(param_)) throw bad();
        Vertex v = 0;
        for (int i = 0; i < param_; ++i) {
            if (c[i] == 1)
                v |= Vertex{1} << i;
            else if (c[i] != -1)
                throw bad();
        }
        return v;
    }
    }
    throw bad();
}

Vertex Graph::origin() const
{
    if (kind_ != GraphKind::segment) throw std::logic_error("origin() is defined for segments only");
    return static_cast<Vertex>(param_);
}

void Graph::sort4(Vertex (&a)[4]) noexcept
{
    std::sort(a, a + 4);
}

}  // namespace agelab

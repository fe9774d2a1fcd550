#include "qrg/gg.hpp"

#include "qrg/rng.hpp"

namespace qrg {

FunctionGG SubsetGG::indicator() const {
    FunctionGG f(n, 0.0, 0.0, 1.0);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (test(x, y)) f.at(x, y) = 1.0;
    return f;
}

SubsetGG random_subset_gg(int n, double delta, std::uint64_t seed) {
    require(delta >= 0.0 && delta <= 1.0, "DomainMismatch", "density must be in [0,1]");
    SubsetGG s(n);
    Prng rng(seed);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (rng.unit() < delta) s.set(x, y);
    return s;
}

SubsetGG product_subset_gg(const SubsetG& u, const SubsetG& v) {
    require(u.n == v.n, "DomainMismatch", "product factors need equal ambient order");
    SubsetGG s(u.n);
    u.bits.for_each([&](int x) { v.bits.for_each([&](int y) { s.set(x, y); }); });
    return s;
}

SubsetGG graph_subset_gg(const GroupTable& g, const std::vector<int>& translators) {
    SubsetGG s(g.n);
    for (int h : translators) {
        require(h >= 0 && h < g.n, "IndexOutOfRange", "graph translator out of range");
        for (int x = 0; x < g.n; ++x) s.set(x, g.op(h, x));
    }
    return s;
}

FunctionGG random_pm1_gg(int n, std::uint64_t seed) {
    FunctionGG f(n, 0.0, -1.0, 1.0);
    Prng rng(seed);
    for (double& x : f.v) x = rng.pm1();
    return f;
}

FunctionGG random_uniform_gg(int n, std::uint64_t seed) {
    FunctionGG f(n, 0.0, -1.0, 1.0);
    Prng rng(seed);
    for (double& x : f.v) x = 2.0 * rng.unit() - 1.0;
    return f;
}

} // namespace qrg

#include "gnnmerge/synth.hpp"

#include "gnnmerge/errors.hpp"
#include "gnnmerge/rng.hpp"

namespace gnnmerge {

Graph generate_sbm(std::size_t num_blocks, std::size_t nodes_per_block, double p_in,
                   double p_out, std::size_t feature_dim, double noise_sigma,
                   std::uint64_t seed) {
    if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0)) {
        throw ParameterError("generate_sbm: need 0 <= p_out <= p_in <= 1");
    }
    if (feature_dim < num_blocks) {
        throw ParameterError("generate_sbm: feature_dim must be >= num_blocks");
    }
    const std::size_t n = num_blocks * nodes_per_block;
    Rng rng(seed);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t u = 0; u < n; ++u) {
        const std::size_t bu = u / nodes_per_block;
        for (std::size_t v = u + 1; v < n; ++v) {
            const double p = (v / nodes_per_block == bu) ? p_in : p_out;
            if (rng.uniform() < p) {
                edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
            }
        }
    }

    DenseMatrix features(n, feature_dim);
    std::vector<std::int32_t> labels(n);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t block = v / nodes_per_block;
        labels[v] = static_cast<std::int32_t>(block);
        for (std::size_t j = 0; j < feature_dim; ++j) {
            const double mean = (j == block) ? 1.0 : 0.0;
            features(v, j) = mean + noise_sigma * rng.normal();
        }
    }
    return build_undirected(n, edges, std::move(features), std::move(labels));
}

} // namespace gnnmerge

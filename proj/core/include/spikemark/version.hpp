#pragma once

namespace spikemark {

inline constexpr const char* version_string = "0.1.0";

/// Identifier of the fixed random-number pipeline used by every generator
/// (reservoir init, workload generation, solvers, synthetic embeddings).
inline constexpr const char* prng_id = "splitmix64+xoshiro256++";

}  // namespace spikemark

#pragma once

#include "jkp/numeric.hpp"

#include <array>
#include <cstdint>

namespace jkp {

/// Seeded, splittable random stream.
///
/// Algorithm: xoshiro256** (Blackman & Vigna, 2018). The 256-bit state is
/// filled by SplitMix64 run over a key derived from (seed, stream_id), so a
/// stream is fully determined by that pair on every host. split(k) derives a
/// child stream from this stream's identity and k without consuming any
/// draws, which is how Monte Carlo reps and leave-one-out fits get their own
/// substreams independent of execution order.
///
/// Normal draws use the Marsaglia polar method; the cached second variate is
/// part of the value state, so copies replay identically.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    RngStream split(std::uint64_t child) const;

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double normal();

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// mean + L z with L L^T = cov (lower Cholesky factor), z standard normal.
Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng);

/// Same draw with a precomputed lower factor.
Vector sample_mvn_factored(const Vector& mean, const Matrix& lower, RngStream& rng);

/// Gamma(shape, scale=1); Marsaglia-Tsang squeeze.
double sample_gamma(double shape, RngStream& rng);

double sample_chi_square(double df, RngStream& rng);

/// (Z + ncp) / sqrt(V / df) with Z ~ N(0,1), V ~ chi-square(df) independent.
double sample_noncentral_t(double df, double ncp, RngStream& rng);

}  // namespace jkp

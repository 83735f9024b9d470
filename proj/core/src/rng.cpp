#include "jkp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace jkp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a;
    std::uint64_t h = splitmix64(x);
    x = h ^ (b * kGolden + 0x632BE59BD9B4E019ULL);
    return splitmix64(x);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::uint64_t key = mix(seed, stream_id);
    for (auto& word : state_) word = splitmix64(key);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
}

RngStream RngStream::split(std::uint64_t child) const {
    return RngStream(mix(seed_, stream_id_), child);
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

Vector sample_mvn_factored(const Vector& mean, const Matrix& lower, RngStream& rng) {
    if (lower.rows() != mean.size() || lower.cols() != mean.size()) {
        throw std::invalid_argument("covariance dimension does not match mean");
    }
    Vector z(mean.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    return mean + lower.triangularView<Eigen::Lower>() * z;
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng) {
    return sample_mvn_factored(mean, cholesky_lower(cov), rng);
}

double sample_gamma(double shape, RngStream& rng) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        const double u = rng.uniform();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_chi_square(double df, RngStream& rng) {
    if (!(df > 0.0)) throw std::invalid_argument("chi-square degrees of freedom must be positive");
    return 2.0 * sample_gamma(0.5 * df, rng);
}

double sample_noncentral_t(double df, double ncp, RngStream& rng) {
    if (!(df > 0.0)) throw std::invalid_argument("t degrees of freedom must be positive");
    const double z = rng.normal();
    const double v = sample_chi_square(df, rng);
    return (z + ncp) / std::sqrt(v / df);
}

}  // namespace jkp

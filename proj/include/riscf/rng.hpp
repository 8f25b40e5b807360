#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace riscf {

using cplx = std::complex<double>;

/// Labels that keep independent random quantities on disjoint streams.
enum class StreamTag : std::uint64_t {
    drop = 1,
    ap_position,
    user_position,
    ris_position,
    shadow_direct,
    shadow_ap_ris,
    shadow_user_ris,
    direct_channel,
    ris_channel,
    pilot_noise,
    pilot_emi,
    downlink_emi,
    downlink_symbols,
    test,
};

/// A random stream addressed by a master seed and a path of counters.
///
/// Streams are derived by hashing (seed, path...) into the engine's seed
/// sequence, so the draws seen by trial t do not depend on which thread runs
/// it or on how many other streams exist.
class Stream {
public:
    Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    {
        reseed(seed, 0, path);
    }

    Stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> path = {})
    {
        reseed(seed, static_cast<std::uint64_t>(tag), path);
    }

    double normal() { return normal_(engine_); }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    std::uint64_t bits() { return engine_(); }

    /// Circularly-symmetric CN(0, 1): independent real and imaginary parts of variance 1/2.
    cplx cnormal()
    {
        constexpr double s = 0.70710678118654752440;
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    Eigen::VectorXcd cnormal_vector(Eigen::Index n)
    {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = cnormal();
        return v;
    }

    Eigen::MatrixXcd cnormal_matrix(Eigen::Index rows, Eigen::Index cols)
    {
        Eigen::MatrixXcd a(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                a(r, c) = cnormal();
        return a;
    }

private:
    void reseed(std::uint64_t seed, std::uint64_t tag, std::initializer_list<std::uint64_t> path)
    {
        std::vector<std::uint32_t> words;
        words.reserve(4 + 2 * path.size());
        auto push = [&](std::uint64_t v) {
            words.push_back(static_cast<std::uint32_t>(v));
            words.push_back(static_cast<std::uint32_t>(v >> 32));
        };
        push(seed);
        push(tag);
        for (auto p : path)
            push(p);
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace riscf

#pragma once

// Counter-based random streams indexed by multi-indices.
//
// Every draw is a pure function of (seed, node path, counter):
//
//   node key   = digest(seed, zigzag(path[0]), ..., zigzag(path[L-1]), L)
//   raw bits   = Philox4x32-10(key = node key, counter = counter / 2), 64-bit lane counter % 2
//   uniform    = (raw >> 11) * 2^-53                        in [0, 1)
//   gaussian   = Phi^{-1}(((raw >> 12) + 0.5) * 2^-52)      one slot per scalar
//
// Slot layout inside a node: slot 0 is the uniform time draw, slots 1..d are
// the d Gaussian coordinates of a Brownian increment. Nodes that only need a
// Brownian increment still start at slot 1, so the layout never depends on
// which draws a node happens to use.
//
// The digest absorbs one zig-zag-encoded element at a time, so a child key is
// derived from its parent in O(1); the path length is mixed in at
// finalization. The recipe is frozen by tests/data/rng_golden.txt.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlp/problem.hpp"

namespace mlp {

inline constexpr std::uint64_t kUniformSlot = 0;
inline constexpr std::uint64_t kGaussianSlotBase = 1;

constexpr std::uint64_t zigzag(std::int64_t v) noexcept {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

constexpr std::int64_t unzigzag(std::uint64_t z) noexcept {
    return static_cast<std::int64_t>(z >> 1) ^ -static_cast<std::int64_t>(z & 1);
}

/// A multi-index theta in the union of Z^n; the empty path is the root.
class NodeId {
public:
    NodeId() = default;
    explicit NodeId(std::vector<std::int64_t> path) : path_(std::move(path)) {}

    NodeId child(std::int64_t k, std::int64_t m) const;
    NodeId prepended(std::int64_t head) const;

    const std::vector<std::int64_t>& path() const noexcept { return path_; }
    std::size_t depth() const noexcept { return path_.size(); }

    /// Length-prefixed zig-zag words: [L, zz(path[0]), ..., zz(path[L-1])].
    std::vector<std::uint64_t> canonical_encoding() const;

    /// "[0,-1,2]"; the root prints as "[]".
    std::string to_string() const;
    static NodeId parse(std::string_view text);

    friend bool operator==(const NodeId&, const NodeId&) = default;
    friend auto operator<=>(const NodeId&, const NodeId&) = default;

private:
    std::vector<std::int64_t> path_;
};

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t rotl(std::uint64_t v, int s) noexcept { return (v << s) | (v >> (64 - s)); }

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint64_t m0 = 0xD2511F53u;
    constexpr std::uint64_t m1 = 0xCD9E8D57u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = m0 * ctr[0];
        const std::uint64_t p1 = m1 * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
    }
    return ctr;
}

/// Both 64-bit lanes of Philox block `block` under `node_key`.
inline std::array<std::uint64_t, 2> philox_block(std::uint64_t node_key, std::uint64_t block) noexcept {
    const auto out = philox4x32_10(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0u, 0u},
        {static_cast<std::uint32_t>(node_key), static_cast<std::uint32_t>(node_key >> 32)});
    return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
}

inline double bits_to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// 52 bits so that k + 0.5 stays exact and the result never rounds to 0 or 1.
inline double bits_to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace detail

/// Standard normal quantile (Wichura AS241, about 1e-16 relative accuracy).
double inverse_normal_cdf(double p) noexcept;

/// Incremental digest of (seed, path). Value type, trivially copyable.
class StreamNode {
public:
    static StreamNode root(std::uint64_t seed) noexcept {
        return StreamNode(detail::mix64(seed ^ 0x6a09e667f3bcc909ULL), 0);
    }

    StreamNode extended(std::int64_t element) const noexcept {
        const std::uint64_t word = detail::mix64(zigzag(element) + 0x9E3779B97F4A7C15ULL);
        return StreamNode(detail::mix64(detail::rotl(chain_, 29) ^ word) + 0xbb67ae8584caa73bULL, depth_ + 1);
    }

    StreamNode child(std::int64_t k, std::int64_t m) const noexcept { return extended(k).extended(m); }

    /// Philox key of this node; the depth is mixed in so that the encoding is
    /// length-prefixed.
    std::uint64_t key() const noexcept {
        return detail::mix64(chain_ ^ detail::mix64(depth_ ^ 0x3c6ef372fe94f82bULL));
    }

    std::uint64_t depth() const noexcept { return depth_; }

private:
    StreamNode(std::uint64_t chain, std::uint64_t depth) : chain_(chain), depth_(depth) {}
    std::uint64_t chain_;
    std::uint64_t depth_;
};

StreamNode stream_node(std::uint64_t seed, const NodeId& node);

struct StreamKey {
    std::uint64_t seed = 0;
    NodeId node;
    std::uint64_t counter = 0;
};

/// 64 raw bits at (node key, counter).
inline std::uint64_t raw_bits(std::uint64_t node_key, std::uint64_t counter) noexcept {
    return detail::philox_block(node_key, counter >> 1)[counter & 1];
}

std::uint64_t raw_bits(const StreamKey& key);

/// Low-level kernels used by the estimator. `node_key` is StreamNode::key().
inline double uniform_at(std::uint64_t node_key, std::uint64_t counter) noexcept {
    return detail::bits_to_unit(raw_bits(node_key, counter));
}

/// Fills `out` with standard normals from slots first_counter, first_counter + 1, ...
void fill_gaussians(std::uint64_t node_key, std::uint64_t first_counter, std::span<double> out) noexcept;

/// out = x + sqrt(variance_scale * elapsed) * Z, Z from the node's Gaussian slots.
void brownian_point_into(std::uint64_t node_key, PointView x, double variance_scale, double elapsed,
                         std::span<double> out) noexcept;

// -- keyed API ------------------------------------------------------------------

double uniform01(const StreamKey& key);
/// d standard normals from counters key.counter .. key.counter + d - 1.
std::vector<double> gaussian_vector(const StreamKey& key, int d);

NodeId child(const NodeId& node, std::int64_t k, std::int64_t m);

/// t * U with U the node's uniform slot.
double sample_time_forward(const NodeId& node, std::uint64_t seed, double t);
/// t + (T - t) U; throws ConfigError when t > T or t < 0.
double sample_time_backward(const NodeId& node, std::uint64_t seed, double t, double horizon);
/// x + sqrt(variance_scale * elapsed) * Z; elapsed = 0 returns x exactly.
Point brownian_point(const NodeId& node, std::uint64_t seed, PointView x, double variance_scale, double elapsed);

// -- golden values ----------------------------------------------------------------

struct GoldenEntry {
    std::uint64_t seed;
    NodeId node;
    std::uint64_t counter;
    std::uint64_t value;
};

/// The frozen (seed, path, counter) -> raw bits table compiled into the library.
std::span<const GoldenEntry> builtin_golden_values();
/// Parses "seed path counter value_hex" lines; '#' starts a comment.
std::vector<GoldenEntry> parse_golden(std::string_view text);
std::string format_golden(std::span<const GoldenEntry> entries);

}  // namespace mlp

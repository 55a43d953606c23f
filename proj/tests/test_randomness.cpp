#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mlp/error.hpp"
#include "mlp/randomness.hpp"

using namespace mlp;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
    ma /= n, mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("philox4x32-10 known-answer vectors") {
    using detail::philox4x32_10;
    using A = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("golden values: file and built-in table agree with the generator") {
    const auto file = parse_golden(read_file(std::string(MLP_TEST_DATA) + "/rng_golden.txt"));
    const auto builtin = builtin_golden_values();
    REQUIRE(file.size() == 10);
    REQUIRE(builtin.size() == file.size());
    for (std::size_t i = 0; i < file.size(); ++i) {
        CHECK(file[i].seed == builtin[i].seed);
        CHECK(file[i].node == builtin[i].node);
        CHECK(file[i].counter == builtin[i].counter);
        CHECK(file[i].value == builtin[i].value);
        CHECK(raw_bits(StreamKey{file[i].seed, file[i].node, file[i].counter}) == file[i].value);
    }
    CHECK(parse_golden(format_golden(file)).size() == file.size());
}

TEST_CASE("golden parser rejects malformed lines") {
    CHECK_THROWS_AS(parse_golden("1 [0] zz"), ConfigError);
    CHECK_THROWS_AS(parse_golden("1 [0 0 ff"), ConfigError);
    CHECK(parse_golden("# only a comment\n\n").empty());
}

TEST_CASE("child appends and distinguishes signs") {
    CHECK(child(NodeId{}, 0, -1) == NodeId({0, -1}));
    CHECK(child(NodeId({0, -1}), 2, 3) == NodeId({0, -1, 2, 3}));
    const NodeId n({4});
    CHECK(child(n, 1, 2) != child(n, -1, 2));
    CHECK(child(n, 0, 2) != child(n, 0, -2));
    CHECK(NodeId({0, -1}).to_string() == "[0,-1]");
    CHECK(NodeId::parse("[0,-1]") == NodeId({0, -1}));
    CHECK(NodeId::parse("[]") == NodeId{});
    CHECK(NodeId({1}).prepended(7) == NodeId({7, 1}));
}

TEST_CASE("zigzag is a bijection on small values") {
    for (std::int64_t v = -1000; v <= 1000; ++v) CHECK(unzigzag(zigzag(v)) == v);
    CHECK(zigzag(0) == 0);
    CHECK(zigzag(-1) == 1);
    CHECK(zigzag(1) == 2);
}

TEST_CASE("canonical encoding is length-prefixed and injective on a sample") {
    std::set<std::vector<std::uint64_t>> enc;
    std::set<std::uint64_t> keys;
    std::vector<NodeId> nodes{NodeId{}};
    for (int a = -3; a <= 3; ++a) {
        nodes.push_back(NodeId({a}));
        for (int b = -3; b <= 3; ++b) {
            nodes.push_back(NodeId({a, b}));
            for (int c = -2; c <= 2; ++c) nodes.push_back(NodeId({a, b, c}));
        }
    }
    for (const auto& n : nodes) {
        enc.insert(n.canonical_encoding());
        keys.insert(stream_node(9, n).key());
    }
    CHECK(enc.size() == nodes.size());
    CHECK(keys.size() == nodes.size());
    CHECK(NodeId({5, -2}).canonical_encoding() == std::vector<std::uint64_t>{2, 10, 3});
}

TEST_CASE("incremental stream nodes match the path form") {
    const NodeId path({3, -1, 0, 7});
    const auto incremental = StreamNode::root(11).extended(3).extended(-1).extended(0).extended(7);
    CHECK(incremental.key() == stream_node(11, path).key());
    CHECK(incremental.depth() == 4);
    CHECK(stream_node(11, path).key() != stream_node(12, path).key());
}

TEST_CASE("determinism of keyed draws") {
    const StreamKey k{5, NodeId({1, 2}), 3};
    CHECK(uniform01(k) == uniform01(k));
    CHECK(gaussian_vector(k, 4) == gaussian_vector(k, 4));
    const auto v = gaussian_vector(k, 4);
    for (int i = 0; i < 4; ++i) CHECK(gaussian_vector(StreamKey{5, NodeId({1, 2}), 3ULL + i}, 1)[0] == v[i]);
}

TEST_CASE("uniform moments over 1e6 keys") {
    double sum = 0, sum2 = 0;
    const int n = 1000000;
    const auto key = StreamNode::root(123).key();
    for (int i = 0; i < n; ++i) {
        const double u = uniform_at(key, 2ULL * i);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 0.002);
    CHECK(std::abs(sum2 / n - mean * mean - 1.0 / 12.0) < 0.001);
}

TEST_CASE("uniforms at distinct nodes are uncorrelated") {
    std::vector<double> a, b, c;
    for (int i = 0; i < 100000; ++i) {
        a.push_back(uniform01(StreamKey{1, NodeId({i}), 0}));
        b.push_back(uniform01(StreamKey{1, NodeId({i, 0}), 0}));
        c.push_back(uniform01(StreamKey{1, NodeId({i}), 1}));
    }
    CHECK(std::abs(correlation(a, b)) < 0.01);
    CHECK(std::abs(correlation(a, c)) < 0.01);
}

TEST_CASE("gaussian moments and 1.96 coverage over 1e6 draws") {
    const int n = 1000000;
    const int d = 2;
    std::vector<double> z(d);
    std::vector<double> sum(d), sum2(d);
    int inside = 0;
    for (int i = 0; i < n; ++i) {
        fill_gaussians(stream_node(77, NodeId({i})).key(), kGaussianSlotBase, z);
        for (int j = 0; j < d; ++j) sum[j] += z[j], sum2[j] += z[j] * z[j];
        inside += std::abs(z[0]) <= 1.96;
    }
    for (int j = 0; j < d; ++j) {
        const double mean = sum[j] / n;
        CHECK(std::abs(mean) < 0.005);
        CHECK(std::abs(sum2[j] / n - mean * mean - 1.0) < 0.01);
    }
    CHECK(std::abs(static_cast<double>(inside) / n - 0.95) < 0.002);
}

TEST_CASE("gaussians at distinct nodes are uncorrelated") {
    std::vector<double> a, b;
    for (int i = 0; i < 100000; ++i) {
        a.push_back(gaussian_vector(StreamKey{3, NodeId({i, 1}), 1}, 1)[0]);
        b.push_back(gaussian_vector(StreamKey{3, NodeId({i, -1}), 1}, 1)[0]);
    }
    CHECK(std::abs(correlation(a, b)) < 0.01);
}

TEST_CASE("inverse normal cdf matches reference quantiles") {
    CHECK(inverse_normal_cdf(0.5) == 0.0);
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(inverse_normal_cdf(0.841344746068543) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inverse_normal_cdf(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-inverse_normal_cdf(0.975)).epsilon(1e-15));
    for (double p : {0.001, 0.02, 0.3, 0.6, 0.9, 0.999}) {
        const double z = inverse_normal_cdf(p);
        CHECK(0.5 * std::erfc(-z / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-13));
    }
}

TEST_CASE("sample_time_forward") {
    const NodeId n({2});
    CHECK(sample_time_forward(n, 1, 0.0) == 0.0);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double r = sample_time_forward(NodeId({i}), 4, 1.0);
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 1.0);
        sum += r;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
    CHECK(sample_time_forward(n, 1, 3.0) == 3.0 * uniform01(StreamKey{1, n, kUniformSlot}));
}

TEST_CASE("sample_time_backward") {
    CHECK(sample_time_backward(NodeId({1}), 1, 2.0, 2.0) == 2.0);
    CHECK_THROWS_AS(sample_time_backward(NodeId({1}), 1, 2.5, 2.0), ConfigError);
    CHECK_THROWS_AS(sample_time_backward(NodeId({1}), 1, -0.1, 2.0), ConfigError);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double r = sample_time_backward(NodeId({i}), 5, 0.0, 2.0);
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 2.0);
        sum += r;
    }
    CHECK(std::abs(sum / 100000 - 1.0) < 0.01);
    const double r = sample_time_backward(NodeId({3}), 5, 0.5, 2.0);
    CHECK(r >= 0.5);
}

TEST_CASE("brownian_point") {
    const Point x{1.0, -2.0};
    CHECK(brownian_point(NodeId({0}), 1, x, 2.0, 0.0) == x);
    double sum = 0, sum2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double v = brownian_point(NodeId({i}), 8, Point{0.0}, 2.0, 0.5)[0];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    CHECK(std::abs(sum2 / n - mean * mean - 1.0) < 0.02);

    std::vector<std::vector<double>> comp(3);
    for (int i = 0; i < n; ++i) {
        const auto p = brownian_point(NodeId({i}), 9, Point{0.0, 0.0, 0.0}, 1.0, 1.0);
        for (int j = 0; j < 3; ++j) comp[j].push_back(p[j]);
    }
    CHECK(std::abs(correlation(comp[0], comp[1])) < 0.01);
    CHECK(std::abs(correlation(comp[0], comp[2])) < 0.01);
    CHECK(std::abs(correlation(comp[1], comp[2])) < 0.01);

    const auto p = brownian_point(NodeId({4}), 2, x, 1.0, 0.25);
    const auto z = gaussian_vector(StreamKey{2, NodeId({4}), kGaussianSlotBase}, 2);
    CHECK(p[0] == x[0] + 0.5 * z[0]);
    CHECK(p[1] == x[1] + 0.5 * z[1]);
}

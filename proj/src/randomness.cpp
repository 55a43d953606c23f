#include "mlp/randomness.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mlp/error.hpp"

namespace mlp {

// -- NodeId -----------------------------------------------------------------------

NodeId NodeId::child(std::int64_t k, std::int64_t m) const {
    std::vector<std::int64_t> p;
    p.reserve(path_.size() + 2);
    p = path_;
    p.push_back(k);
    p.push_back(m);
    return NodeId(std::move(p));
}

NodeId NodeId::prepended(std::int64_t head) const {
    std::vector<std::int64_t> p;
    p.reserve(path_.size() + 1);
    p.push_back(head);
    p.insert(p.end(), path_.begin(), path_.end());
    return NodeId(std::move(p));
}

std::vector<std::uint64_t> NodeId::canonical_encoding() const {
    std::vector<std::uint64_t> out;
    out.reserve(path_.size() + 1);
    out.push_back(path_.size());
    for (auto v : path_) out.push_back(zigzag(v));
    return out;
}

std::string NodeId::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < path_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(path_[i]);
    }
    return s + "]";
}

NodeId NodeId::parse(std::string_view text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw ConfigError("node path must look like [a,b,...]: '" + std::string(text) + "'");
    text = text.substr(1, text.size() - 2);
    std::vector<std::int64_t> path;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size())
            throw ConfigError("bad node path element '" + std::string(item) + "'");
        path.push_back(v);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
        if (text.empty()) throw ConfigError("trailing comma in node path");
    }
    return NodeId(std::move(path));
}

NodeId child(const NodeId& node, std::int64_t k, std::int64_t m) { return node.child(k, m); }

StreamNode stream_node(std::uint64_t seed, const NodeId& node) {
    auto s = StreamNode::root(seed);
    for (auto v : node.path()) s = s.extended(v);
    return s;
}

// -- Gaussian quantile ---------------------------------------------------------------

double inverse_normal_cdf(double p) noexcept {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -HUGE_VAL;
        if (p == 1.0) return HUGE_VAL;
        return std::nan("");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                    4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                    2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                   1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                   1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                   2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                   7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

// -- kernels -----------------------------------------------------------------------

void fill_gaussians(std::uint64_t node_key, std::uint64_t first_counter, std::span<double> out) noexcept {
    std::uint64_t c = first_counter;
    std::size_t i = 0;
    const std::size_t n = out.size();
    if (i < n && (c & 1)) {
        out[i++] = inverse_normal_cdf(detail::bits_to_open_unit(raw_bits(node_key, c)));
        ++c;
    }
    for (; i + 1 < n; i += 2, c += 2) {
        const auto lanes = detail::philox_block(node_key, c >> 1);
        out[i] = inverse_normal_cdf(detail::bits_to_open_unit(lanes[0]));
        out[i + 1] = inverse_normal_cdf(detail::bits_to_open_unit(lanes[1]));
    }
    if (i < n) out[i] = inverse_normal_cdf(detail::bits_to_open_unit(raw_bits(node_key, c)));
}

void brownian_point_into(std::uint64_t node_key, PointView x, double variance_scale, double elapsed,
                         std::span<double> out) noexcept {
    fill_gaussians(node_key, kGaussianSlotBase, out);
    const double sd = std::sqrt(variance_scale * elapsed);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + sd * out[i];
}

// -- keyed API -------------------------------------------------------------------------

std::uint64_t raw_bits(const StreamKey& key) { return raw_bits(stream_node(key.seed, key.node).key(), key.counter); }

double uniform01(const StreamKey& key) { return detail::bits_to_unit(raw_bits(key)); }

std::vector<double> gaussian_vector(const StreamKey& key, int d) {
    if (d < 1) throw ConfigError("gaussian_vector: d must be >= 1");
    std::vector<double> z(static_cast<std::size_t>(d));
    fill_gaussians(stream_node(key.seed, key.node).key(), key.counter, z);
    return z;
}

double sample_time_forward(const NodeId& node, std::uint64_t seed, double t) {
    if (!(t >= 0.0)) throw ConfigError("sample_time_forward: t must be >= 0");
    return t * uniform_at(stream_node(seed, node).key(), kUniformSlot);
}

double sample_time_backward(const NodeId& node, std::uint64_t seed, double t, double horizon) {
    if (!(t >= 0.0) || t > horizon) throw ConfigError("sample_time_backward: requires 0 <= t <= T");
    return t + (horizon - t) * uniform_at(stream_node(seed, node).key(), kUniformSlot);
}

Point brownian_point(const NodeId& node, std::uint64_t seed, PointView x, double variance_scale, double elapsed) {
    if (!(elapsed >= 0.0) || !(variance_scale >= 0.0))
        throw ConfigError("brownian_point: elapsed and variance_scale must be >= 0");
    Point out(x.size());
    brownian_point_into(stream_node(seed, node).key(), x, variance_scale, elapsed, out);
    return out;
}

// -- golden values ------------------------------------------------------------------------

std::vector<GoldenEntry> parse_golden(std::string_view text) {
    std::vector<GoldenEntry> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string seed, path, counter, value;
        if (!(fields >> seed)) continue;
        std::string extra;
        if (!(fields >> path >> counter >> value) || (fields >> extra))
            throw ConfigError("golden line " + std::to_string(lineno) + ": expected 'seed path counter value_hex'");
        try {
            out.push_back({std::stoull(seed), NodeId::parse(path), std::stoull(counter), std::stoull(value, nullptr, 16)});
        } catch (const std::logic_error&) {
            throw ConfigError("golden line " + std::to_string(lineno) + ": bad number");
        }
    }
    return out;
}

std::string format_golden(std::span<const GoldenEntry> entries) {
    std::ostringstream out;
    out << "# seed path counter value_hex\n";
    for (const auto& e : entries) {
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(e.value));
        out << e.seed << ' ' << e.node.to_string() << ' ' << e.counter << ' ' << hex << '\n';
    }
    return out.str();
}

}  // namespace mlp

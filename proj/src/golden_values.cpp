#include "mlp/randomness.hpp"

namespace mlp {

namespace {

const std::vector<GoldenEntry>& table() {
    static const std::vector<GoldenEntry> entries = {
        {0ULL, NodeId{}, 0, 0xfdffec80cf86fb7fULL},
        {0ULL, NodeId({0}), 0, 0xa94a80b7cd593169ULL},
        {1ULL, NodeId({0,-1}), 0, 0xad29c29e0e1e859cULL},
        {42ULL, NodeId({1,2}), 0, 0xd0e6d56e9f476b8fULL},
        {42ULL, NodeId({3,-2,1}), 0, 0xeeb1f9b7de3f27c4ULL},
        {3735928559ULL, NodeId({-5}), 0, 0x98f16a18d84e6f4bULL},
        {18446744073709551615ULL, NodeId({7,7,-7}), 0, 0x3f80a7703fdd0770ULL},
        {0ULL, NodeId{}, 1, 0x270be7a23162de2fULL},
        {42ULL, NodeId({1,2}), 5, 0xaa9c0badc9689394ULL},
        {18446744073709551615ULL, NodeId({7,7,-7}), 5, 0x6a8aeb726c198b0eULL},
    };
    return entries;
}

}  // namespace

std::span<const GoldenEntry> builtin_golden_values() { return table(); }

}  // namespace mlp

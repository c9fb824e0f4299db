#ifndef IQSWITCH_CONFIG_HPP
#define IQSWITCH_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iqswitch/traffic.hpp"

namespace iqswitch {

inline constexpr int kSchemaVersion = 1;

// A run description loaded from JSON:
//   {
//     "n": 3,
//     "nu": [[...], ...] | "uniform",
//     "k": [[...], ...] | "uniform" | "nu",
//     "normalize_k": true,
//     "eps": 0.1,
//     "dist": {"kind": "bernoulli" | "scaled_bernoulli" | "binomial" | "pmf",
//              "scale": 2, "trials": 2, "pmf": [...], "pmfs": [[[...]]]},
//     "a_max": 1, "seed": 1, "horizon": 0, "batch_count": 20
//   }
// Unknown keys are rejected. The traffic is relabeled into canonical port
// order; row_order/col_order map canonical positions back to the file's.
struct RunConfig {
    TrafficSpec spec;
    std::vector<int> row_order;
    std::vector<int> col_order;
    std::uint64_t seed = 1;
    std::uint64_t horizon = 0;
    std::size_t batch_count = 20;
};

// Throws ValidationError with the offending field in the message.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);

}  // namespace iqswitch

#endif  // IQSWITCH_CONFIG_HPP

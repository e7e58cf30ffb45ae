#pragma once

#include <string>
#include <vector>

namespace proxyens {

// A fixed-length sequence of categorical choices; gene g takes values in
// {0, ..., K_g - 1} where the cardinalities K_g live on the owning table.
using Genome = std::vector<int>;

// Text form is dash-separated integers, e.g. "2-0-3-1-1-0".
std::string genome_to_string(const Genome& g);
Genome parse_genome(const std::string& text);

}  // namespace proxyens

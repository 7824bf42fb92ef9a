#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace queue_poa::cli {

/// A parsed grid such as "x_e=1:100:5,log" or "5:1000:log".
struct Range {
  std::optional<std::string> variable;
  std::vector<double> points;
};

/// Grammar: [name=]a:b:n[,log|,lin] or [name=]a:b:log|lin. A log grid
/// without a count gets ceil(log10(b/a)) + 1 points, a linear one 11.
/// Throws wire::ConfigError on malformed input.
Range parse_range(std::string_view text);

}  // namespace queue_poa::cli

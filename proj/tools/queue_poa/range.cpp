#include "range.hpp"

#include <charconv>
#include <cmath>

#include "queue_poa/wire.hpp"

namespace queue_poa::cli {

namespace {

using wire::ConfigError;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

double to_number(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("bad number \"" + std::string(s) + "\" in range \"" + std::string(whole) +
                      "\"");
  }
  return v;
}

}  // namespace

Range parse_range(std::string_view text) {
  Range out;
  std::string_view body = text;
  if (const auto eq = text.find('='); eq != std::string_view::npos) {
    if (eq == 0) throw ConfigError("range variable name is empty in \"" + std::string(text) + "\"");
    out.variable = std::string(text.substr(0, eq));
    body = text.substr(eq + 1);
  }
  const std::vector<std::string_view> parts = split(body, ':');
  if (parts.size() != 3) throw ConfigError("range must look like a:b:n[,log] or a:b:log");

  const double a = to_number(parts[0], text);
  const double b = to_number(parts[1], text);
  bool log_scale = false;
  std::optional<long> count;
  for (std::string_view token : split(parts[2], ',')) {
    if (token == "log") {
      log_scale = true;
    } else if (token == "lin") {
      log_scale = false;
    } else {
      const double n = to_number(token, text);
      if (n < 1 || n != std::floor(n) || n > 1e7) {
        throw ConfigError("range step count must be a positive integer");
      }
      count = static_cast<long>(n);
    }
  }
  if (b < a) throw ConfigError("range end must not be below its start");
  if (log_scale && !(a > 0.0)) throw ConfigError("log range needs a positive start");
  if (!count) {
    count = log_scale ? static_cast<long>(std::ceil(std::log10(b / a) - 1e-12)) + 1 : 11;
  }
  if (*count > 1 && a == b) throw ConfigError("range with several points needs a < b");

  const long n = *count;
  out.points.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    if (n == 1) {
      out.points.push_back(a);
      break;
    }
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    const double lo = std::log10(a);
    const double hi = std::log10(b);
    out.points.push_back(log_scale ? std::pow(10.0, lo + t * (hi - lo)) : a + t * (b - a));
  }
  if (n > 1) {
    out.points.front() = a;
    out.points.back() = b;
  }
  return out;
}

}  // namespace queue_poa::cli

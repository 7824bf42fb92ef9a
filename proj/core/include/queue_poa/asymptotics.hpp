#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "queue_poa/intensity.hpp"
#include "queue_poa/numerics.hpp"

namespace queue_poa::asymptotics {

enum class LimitKind { Converges, Diverges, Oscillates, Undetermined };

std::string_view to_string(LimitKind kind);

struct LimitSample {
  double x = 0.0;
  double ratio = 0.0;
};

/// Heuristic classification of a limit as x grows. `value` is meaningful
/// only for Converges and is then >= 1.
struct LimitEstimate {
  LimitKind classification = LimitKind::Undetermined;
  double value = 0.0;
  std::vector<LimitSample> grid;  ///< strictly increasing in x
  double spread = 0.0;            ///< max - min over the decision window
  bool finite_mass = false;       ///< decided by the bounded-Lambda test
};

/// Lambda(x) / (Lambda(x) - M(x) / x). Throws NumericalError if Lambda(x) = 0.
double t99_ratio(const IntensityFunction& h, double x, const IntegralAccuracy& acc = {});

/// The same ratio written over the unit interval, integral of h(x t) over
/// integral of (1 - t) h(x t), evaluated by quadrature in t.
double pano_ratio(const IntensityFunction& h, double x, const IntegralAccuracy& acc = {});

/// 2 + x h'(x) / h(x) at one point, using a central difference with
/// step 1e-6 max(x, 1) when h has no closed-form derivative.
double tex_ratio(const IntensityFunction& h, double x);

/// Samples tex_ratio on `grid` (strictly increasing) and classifies it.
LimitEstimate tex_limit(const IntensityFunction& h, std::span<const double> grid);

/// Geometric grid 10, 100, ..., 1e7.
std::vector<double> default_grid();

/// True when Lambda grows by a relative amount below 1e-6 from 1e6 to 1e7.
bool has_finite_mass(const IntensityFunction& h, const IntegralAccuracy& acc = {});

/// Classifies the large-x limit of t99_ratio on `grid` (default_grid() when
/// empty). Finite total mass gives Converges(1) directly.
LimitEstimate classify_limit(const IntensityFunction& h, const IntegralAccuracy& acc = {},
                             std::span<const double> grid = {});

/// The decision rule shared by classify_limit and tex_limit. `probes` are
/// extra samples used only for the oscillation test.
LimitEstimate classify_samples(std::vector<LimitSample> samples,
                               std::vector<LimitSample> probes = {});

}  // namespace queue_poa::asymptotics

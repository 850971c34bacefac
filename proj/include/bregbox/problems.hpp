#pragma once

#include "bregbox/bregman.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace bregbox {

/// Thrown when a benchmark builder cannot certify its own reference solution
/// (bad pattern, amplitude too small, plateau not flattenable, ...).
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Declarative description of a benchmark instance; identical specs produce
/// identical instances. Round-trips through the run-config file format.
struct BenchmarkSpec {
    std::string name = "bang_bang_asc";  // attainable | source_condition | bang_bang_asc | mixed_asc
    int n = 201;
    std::string op_kind = "poisson1d";  // poisson1d | fredholm
    double box_lo = -1.0;
    double box_hi = 1.0;
    double amplitude = 1e3;  // source element amplitude M; <= 0 requests auto
    double plateau_lo = 0.4;
    double plateau_hi = 0.6;
    double kernel_sigma = 0.1;  // fredholm Gaussian kernel width
    double v_frequency = 1.0;   // frequency of the sine mismatch pattern
    std::uint64_t seed = 0;
};

/// Canonical parameter sets used throughout the verification experiments.
BenchmarkSpec canonical_benchmark(const std::string& name);

/// Canonical operator for a benchmark kind on the unit interval.
OperatorHandle make_benchmark_operator(const std::string& op_kind, const GridPtr& grid,
                                       double kernel_sigma);

/// Attainable instance: z := S u_interior, so H vanishes at the reference.
/// Defaults to u_interior = P(0), the one attainable solution carrying a
/// trivial source certificate (w = 0).
ProblemInstance make_attainable(const OperatorHandle& op, const BoxConstraints& box,
                                std::optional<GridFunction> u_interior = std::nullopt);

/// Non-attainable instance with a valid source-condition certificate.
/// Sets p := S* v, w := M v, u := P(M p), z := S u + v; for M large enough
/// every node with nonvanishing p is clipped to the bound matching its sign,
/// which makes u optimal. The builder evaluates the stationarity residual of
/// the constructed reference and refuses parameters that fail it.
ProblemInstance make_source_condition(const OperatorHandle& op, const BoxConstraints& box,
                                      const GridFunction& v_pattern, double amplitude);

/// Bang-bang instance: u takes the bound values off the zero set of
/// p = S* v_pattern, which must have isolated (transversal) zeros; the
/// active-set measure then grows linearly (kappa = 1) and the reference
/// carries w = 0 with I = the zero nodes.
ProblemInstance make_bang_bang_asc(const OperatorHandle& op, const BoxConstraints& box,
                                   const GridFunction& v_pattern);

/// Mixed instance: the mismatch pattern is first projected so that p = S* v
/// vanishes on the plateau nodes, then the source construction is applied.
/// The reference carries the plateau (plus any sub-threshold nodes) as I, the
/// rest as A, and the measured kappa. amplitude <= 0 picks the smallest safe
/// clipping amplitude automatically.
ProblemInstance make_mixed_asc(const OperatorHandle& op, const BoxConstraints& box,
                               double plateau_lo, double plateau_hi, const GridFunction& v_pattern,
                               double amplitude);

/// Builds the instance described by a spec (grid, operator, pattern, builder
/// dispatch).
ProblemInstance make_benchmark(const BenchmarkSpec& spec);

}  // namespace bregbox

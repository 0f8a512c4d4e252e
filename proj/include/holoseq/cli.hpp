#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holoseq/characteristics.hpp"
#include "holoseq/montecarlo.hpp"
#include "holoseq/ode.hpp"

namespace holoseq::cli {

enum class RunMode { holomorphic, affine, both };
enum class AffineRoute { riccati, log };

/// Nonzero (alpha, value) pairs of one series, materialized at any order.
struct SeriesSpec {
    std::size_t dim = 1;
    std::vector<std::pair<MultiIndex, cplx>> terms;

    int degree() const;
    CoeffSeries at(int order) const;
};

struct AtomSpec {
    double weight = 0.0;
    std::vector<SeriesSpec> jump;
};

struct KernelSpec {
    SeriesSpec intensity;
    std::vector<AtomSpec> atoms;
};

struct InlineModel {
    std::size_t dim = 1;
    std::vector<SeriesSpec> drift;
    std::vector<SeriesSpec> diffusion;  ///< dim x dim, row-major
    std::vector<KernelSpec> kernels;
    std::optional<Box> box;
    double absorb_below = -1.0;

    Characteristics at(int order) const;
};

/**
 * @brief The test function.
 *
 * `series` gives sequence coordinates u_alpha directly; `polynomial` gives
 * Taylor coefficients (h = sum p_alpha x^alpha). exp, cos and sin are
 * exp(theta.x), cos(theta.x), sin(theta.x). In affine mode the function is
 * the exponent: series/polynomial give h_u, exp gives theta.x.
 */
struct FunctionSpec {
    enum class Family { series, polynomial, exp, cos, sin };
    Family family = Family::series;
    SeriesSpec terms;
    std::vector<cplx> theta;

    std::size_t dim() const;
    /// u with h_u = h (holomorphic mode).
    CoeffSeries holomorphic(int order) const;
    /// u whose exponential is the test function (affine mode).
    CoeffSeries exponent(int order) const;
    /// h(x), evaluated in closed form for the named families.
    cplx value(std::span<const double> x) const;
    /// h_u(x) for the affine exponent.
    cplx exponent_value(std::span<const double> x) const;
};

struct RunSpec {
    std::string preset;  ///< empty when `model` is inline
    std::optional<InlineModel> model;
    FunctionSpec function;
    RunMode mode = RunMode::holomorphic;
    AffineRoute route = AffineRoute::riccati;
    double T = 1.0;
    std::vector<double> x0;
    std::vector<int> orders{20};
    int buffer = 2;
    OdeConfig ode;
    bool closed_form = true;
    std::size_t mc_paths = 0;  ///< 0 disables the Monte Carlo oracle
    McConfig mc;
    bool mc_mode_auto = true;  ///< per_step for absorbing models, else thinning
    std::string out_dir;
    bool flow_csv = false;

    void validate() const;
};

/// Parses the JSON config; ValidationError messages name the offending field.
RunSpec parse_run_spec(const std::string& text);
RunSpec load_run_spec(const std::string& path);
/// The fully resolved spec as JSON (defaults filled in).
std::string echo_run_spec(const RunSpec& spec);

struct ResultRow {
    int order = 0;
    std::string mode;    ///< "holomorphic" or "affine"
    std::string route;   ///< how the engine value was computed
    cplx engine = 0.0;
    double tail = 0.0;
    int trusted = -1;
    std::string oracle;  ///< empty when no oracle applies
    cplx oracle_value = 0.0;
    double oracle_stderr = 0.0;  ///< Monte Carlo only
    double seconds = 0.0;
};

struct RunResult {
    std::vector<ResultRow> rows;
    /// flow CSV text per (mode, order) when requested
    std::vector<std::pair<std::string, std::string>> flow_files;
};

RunResult execute(const RunSpec& spec);

void write_table(std::ostream& os, const RunSpec& spec, const RunResult& r);
void write_results_csv(std::ostream& os, const RunResult& r);
void list_presets(std::ostream& os);

/// Full command line front end; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace holoseq::cli

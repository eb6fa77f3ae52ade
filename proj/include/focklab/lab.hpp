#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <variant>

#include "focklab/convolve.hpp"
#include "focklab/fock.hpp"

namespace focklab {

// ---------------------------------------------------------------------------
// deterministic RNG and seeded state generators

/// mt19937_64 with an explicit Box-Muller normal, so that byte-identical
/// outputs do not depend on the standard library's distribution choices.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }
    double gauss();
    cd cgauss() { return cd(gauss(), gauss()) / std::sqrt(2.0); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Normalized Wishart state G G^dag / tr with complex Gaussian G; decay > 0
/// damps row n by e^{-decay n} to keep weight away from the cutoff boundary.
DensityMatrix random_density(Rng& rng, int nmax, double decay = 0.0);

/// Z3 phase average of a random density: kills <a> and <a^2>, so the state
/// is centered and sits in the Williamson frame while keeping 0-3 coherences.
DensityMatrix random_z3_density(Rng& rng, int nmax, double decay = 0.0);

/// Random pure state supported on every third Fock level (centered, frame-safe).
DensityMatrix random_centered_pure(Rng& rng, int nmax);

Mat random_hermitian(Rng& rng, int dim);
Mat random_complex(Rng& rng, int rows, int cols);

// ---------------------------------------------------------------------------
// experiment configuration

struct PureSpec {
    std::vector<int> cutoff;
    std::map<std::vector<int>, cd> amplitudes;
};
struct ThermalSpec {
    std::vector<int> cutoff;
    std::vector<double> nu;
};
/// Convex mixture of pure/thermal components on a common cutoff.
struct MixtureSpec {
    std::vector<double> weights;
    std::vector<std::variant<PureSpec, ThermalSpec>> components;
};
using StateSpec = std::variant<PureSpec, ThermalSpec, MixtureSpec>;

DensityMatrix build_state(const StateSpec& spec);

struct GridParams {
    double radius = 0.0;  // 0 = choose adaptively
    int points_per_axis = 80;
};

struct ExperimentConfig {
    StateSpec state;
    std::vector<int> n_list;
    int cutoff = 64;             // per-step output cap (CutoffPolicy n_max)
    double tail_budget = 1e-8;
    GridParams grid;
    std::vector<std::string> metrics = {"trace", "hs", "relent", "J"};
    int gap_cutoff = 14;         // used only when "lambda" is selected
    std::uint64_t seed = 1;
    std::string out_dir;
};

struct ConvergenceRecord {
    int n = 0;
    double trace = 0.0;
    double hs = 0.0;
    double relent = 0.0;
    double J = 0.0;
    double tail = 0.0;
    double ms = 0.0;
    std::optional<double> lambda;
    bool tail_aborted = false;
};

/// One record per n: sigma_n = rho^{boxplus n} by Fock convolution, metrics
/// against the synthesized Gaussification. A tail-budget abort marks the
/// record and stops the sweep (partial results are returned).
std::vector<ConvergenceRecord> run_sweep(const ExperimentConfig& config);

void write_csv(const std::vector<ConvergenceRecord>& records, std::ostream& os);
std::string render_svg(const std::vector<ConvergenceRecord>& records,
                       const std::string& metric);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points_used = 0;
};

/// Least squares of log(metric) against log(n). Points with n < 4 are
/// pre-asymptotic and excluded, as are nonpositive metric values; fewer
/// than 4 surviving points is an error.
SlopeFit fit_slope(const std::vector<ConvergenceRecord>& records,
                   const std::string& metric);

/// sqrt(n) |chi_rho(z/sqrt n)^n - chi_G(z)| per n; chi is evaluated in
/// closed form, no Fock convolution.
std::vector<double> chi_rate_probe(const DensityMatrix& rho,
                                   const std::vector<int>& n_list, cd z);

// ---------------------------------------------------------------------------
// invariant suite

struct InvariantEntry {
    std::string name;
    double violation = 0.0;  // max observed
    double threshold = 0.0;
    bool pass = false;
};

struct InvariantReport {
    std::vector<InvariantEntry> entries;
    bool all_pass = true;
    std::string text;  // byte-stable rendering for a fixed seed
};

InvariantReport run_invariant_suite(std::uint64_t seed, int cutoff = 6);

}  // namespace focklab

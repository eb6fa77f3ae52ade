#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "focklab/errors.hpp"

namespace focklab {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Default ceiling on the total dimension of any constructed space.
inline constexpr std::size_t kDimCeiling = 1u << 18;

/// Per-mode photon-number truncation. Mode j keeps the basis
/// {|0>, ..., |N_j>}. Multi-indices are flattened row-major with mode 0
/// slowest, so serialized matrices are bit-comparable across runs.
class FockCutoff {
  public:
    explicit FockCutoff(std::vector<int> per_mode,
                        std::size_t ceiling = kDimCeiling);
    FockCutoff(std::initializer_list<int> per_mode)
        : FockCutoff(std::vector<int>(per_mode)) {}

    int modes() const { return static_cast<int>(per_mode_.size()); }
    int max_photons(int mode) const { return per_mode_.at(mode); }
    const std::vector<int>& per_mode() const { return per_mode_; }
    std::size_t dim() const { return dim_; }

    std::size_t flatten(std::span<const int> occupation) const;
    std::vector<int> unflatten(std::size_t index) const;
    /// Photon number of mode `mode` in flattened basis state `index`.
    int occupation(std::size_t index, int mode) const;
    /// Total photon number of flattened basis state `index`.
    int total_photons(std::size_t index) const;

    bool operator==(const FockCutoff& o) const { return per_mode_ == o.per_mode_; }
    bool operator!=(const FockCutoff& o) const { return !(*this == o); }

  private:
    std::vector<int> per_mode_;
    std::size_t dim_ = 1;
};

/// Truncated density operator with a ledger of the trace weight discarded
/// by truncation so far. Construction hermitizes and renormalizes.
class DensityMatrix {
  public:
    DensityMatrix(FockCutoff cutoff, Mat entries, double tail_mass = 0.0);

    const FockCutoff& cutoff() const { return cutoff_; }
    const Mat& matrix() const { return rho_; }
    double tail_mass() const { return tail_mass_; }
    std::size_t dim() const { return cutoff_.dim(); }
    int modes() const { return cutoff_.modes(); }

    /// Hermiticity / positivity / trace diagnostics (used by the
    /// invariant suite; cheap enough to call in tests).
    double hermiticity_defect() const;
    double min_eigenvalue() const;
    double trace_defect() const;

  private:
    FockCutoff cutoff_;
    Mat rho_;
    double tail_mass_;
};

enum class OperatorKind { annihilation, creation, number, displacement, custom };

/// A (generally non-Hermitian) operator on the truncated space.
struct ModeOperator {
    FockCutoff cutoff;
    Mat matrix;
    OperatorKind kind = OperatorKind::custom;
    int mode = -1;
};

/// Single-mode ladder matrix <n-1|a|n> = sqrt(n) on {|0>..|nmax>}.
Mat annihilation_matrix(int nmax);

/// Single-mode displacement matrix from the exact closed form
/// <p|D_z|q> = sqrt(q!/p!) z^{p-q} e^{-|z|^2/2} L_q^{(p-q)}(|z|^2), p >= q,
/// evaluated with the stable three-term Laguerre recurrence. This makes
/// characteristic functions of truncated operators exact.
Mat displacement_matrix(cd z, int nmax);

ModeOperator annihilation(const FockCutoff& cutoff, int mode);
ModeOperator creation(const FockCutoff& cutoff, int mode);
ModeOperator number_operator(const FockCutoff& cutoff, int mode);
ModeOperator displacement(std::span<const cd> z, const FockCutoff& cutoff);

/// |v><v| from a sparse amplitude map over multi-indices; v is normalized.
DensityMatrix build_pure_state(const std::map<std::vector<int>, cd>& amplitudes,
                               const FockCutoff& cutoff);
/// Single-mode convenience overload.
DensityMatrix build_pure_state(const std::map<int, cd>& amplitudes,
                               const FockCutoff& cutoff);

DensityMatrix vacuum_state(const FockCutoff& cutoff);

/// Kronecker-structured joint state over the concatenated mode list.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b,
                     std::size_t ceiling = kDimCeiling);

/// Reduced state on `keep` (ascending subset of modes).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
Mat partial_trace_matrix(const Mat& joint, const FockCutoff& cutoff,
                         const std::vector<int>& keep);

/// tr(rho X).
cd expectation(const DensityMatrix& rho, const ModeOperator& X);

/// Zero-padded embedding into a larger per-mode cutoff (exact).
DensityMatrix pad_to(const DensityMatrix& rho, const FockCutoff& target);

/// Truncation to a smaller per-mode cutoff; the discarded diagonal weight
/// is returned and added to the tail ledger, then the state renormalizes.
DensityMatrix truncate_to(const DensityMatrix& rho, const FockCutoff& target,
                          double* discarded = nullptr);

/// max(cutA, cutB) per mode; throws if the mode counts differ.
FockCutoff common_cutoff(const FockCutoff& a, const FockCutoff& b);

/// tr(AB) without forming the product.
cd trace_of_product(const Mat& a, const Mat& b);

}  // namespace focklab

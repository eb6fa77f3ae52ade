#pragma once

#include <functional>
#include <string>

#include "focklab/fock.hpp"

namespace focklab {

enum class QuadScheme { gauss_legendre, trapezoid };

/// Tensorized quadrature over [-R, R]^{2m} (axes = Re z_1, Im z_1, ...).
/// Gauss-Legendre by default; uniform trapezoid retained as a cross-check.
class PhaseGrid {
  public:
    PhaseGrid(int modes, double radius, int points_per_axis,
              QuadScheme scheme = QuadScheme::gauss_legendre);

    int modes() const { return modes_; }
    double radius() const { return radius_; }
    int points_per_axis() const { return points_; }
    QuadScheme scheme() const { return scheme_; }
    std::size_t size() const { return size_; }

    /// z in C^m at flattened node index.
    std::vector<cd> node(std::size_t index) const;
    /// Product quadrature weight (for the measure d^{2m}z).
    double weight(std::size_t index) const;
    /// True when any axis sits on the outermost node layer.
    bool is_boundary(std::size_t index) const;

    const std::vector<double>& axis_nodes() const { return axis_nodes_; }
    const std::vector<double>& axis_weights() const { return axis_weights_; }

  private:
    int modes_, points_;
    double radius_;
    QuadScheme scheme_;
    std::size_t size_;
    std::vector<double> axis_nodes_, axis_weights_;
};

struct CharSample {
    PhaseGrid grid;
    std::vector<cd> values;
    std::string source;
};

/// chi_T(z) = tr(T D_z), exact for the truncated T.
cd char_fn(const Mat& T, const FockCutoff& cutoff, std::span<const cd> z);
cd char_fn(const DensityMatrix& rho, std::span<const cd> z);
/// Single-mode convenience.
cd char_fn(const DensityMatrix& rho, cd z);

CharSample sample_char(const Mat& T, const FockCutoff& cutoff,
                       const PhaseGrid& grid, std::string source = {});
void write_char_csv(const CharSample& sample, std::ostream& os);

/// Largest |chi_T| over the outermost node layer of the grid.
double boundary_max_abs_char(const Mat& T, const FockCutoff& cutoff,
                             const PhaseGrid& grid);

/// Smallest radius R (doubling search) with max_{|z|=R} |chi_T| < target.
double choose_radius(const Mat& T, const FockCutoff& cutoff,
                     double target = 1e-10, double start = 3.0);

/// Symplectic Fourier transform of chi at a point, by quadrature:
/// W_T(z) = (1/pi^{2m}) \int chi_T(w) e^{z^T conj(w) - conj(z)^T w} d^{2m}w.
/// Returned as complex so quadrature error stays visible; |Im| is small for
/// Hermitian T. Throws GridError when |chi| at the boundary exceeds 1e-6.
cd wigner(const Mat& T, const FockCutoff& cutoff, std::span<const cd> z,
          const PhaseGrid& grid);
cd wigner(const DensityMatrix& rho, cd z, const PhaseGrid& grid);

/// Quantum Plancherel quadrature (1/pi^m) \int |chi_T|^2 = tr(T^dag T).
/// Returns the squared Hilbert-Schmidt norm. Throws GridError on the
/// boundary check.
double plancherel_hs_norm(const Mat& T, const FockCutoff& cutoff,
                          const PhaseGrid& grid);

/// M_kappa(rho) = tr(rho (H_m + m)^{kappa/2}); (H_m+m) is Fock-diagonal so
/// this is a plain weighted sum over the basis.
double moment(const DensityMatrix& rho, double kappa);

struct CovarianceData {
    Eigen::VectorXd d;       // first moments, (x_1, p_1, ..., x_m, p_m)
    Eigen::MatrixXd gamma;   // covariance, vacuum = identity convention
    Eigen::VectorXd nu;      // symplectic eigenvalues, descending
    Eigen::VectorXd mu;      // tr(rho a_j^dag a_j) + 1/2 per mode
    double uncertainty_defect = 0.0;  // most negative eigenvalue of gamma + i Omega
};

/// First and second moments. Second moments use the exact ladder identities
/// (aa^dag = a^dag a + 1) so the truncated state is treated as a genuine
/// zero-padded infinite-dimensional state. Flags gamma + i Omega eigenvalues
/// below -1e-8 as truncation damage.
CovarianceData covariance(const DensityMatrix& rho);

}  // namespace focklab

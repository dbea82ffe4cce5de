#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "entsim/experiment.hpp"

namespace entsim::quantum {

using Matrix4c = Eigen::Matrix4cd;
using complexd = std::complex<double>;

/// Two-qubit polarization density matrix in the ordered basis
/// (VV, VH, HV, HH), index 1 = V and 2 = H. Validated on construction:
/// Hermitian and unit trace within 1e-10, eigenvalues >= -psd_tol.
class DensityMatrix {
  public:
    static DensityMatrix validated(const Matrix4c& m, double psd_tol = 1e-9);

    /// Lenient validation for raw linear-inversion fixtures, which can be
    /// noticeably non-positive as printed.
    static DensityMatrix fixture_lenient(const Matrix4c& m);

    const Matrix4c& matrix() const { return m_; }
    double min_eigenvalue() const;

    /// Off-diagonal coherence <VV| rho |HH>.
    complexd rho1122() const { return m_(0, 3); }

  private:
    explicit DensityMatrix(Matrix4c m) : m_(std::move(m)) {}
    Matrix4c m_;
};

/// Pure projector onto (|VV> + e^{i phi} |HH>) / sqrt(2).
DensityMatrix bell_state(double phi);

/// rho = V |Phi^phi><Phi^phi| + (1 - V) rho_m with
/// rho_m = (|VV><VV| + |HH><HH|) / 2; V is the fringe visibility.
DensityMatrix visibility_mixed_state(double visibility, double phi);

/// F = <Phi^phi| rho |Phi^phi>.
double fidelity(const DensityMatrix& rho, double phi);

/// max_phi F(phi) = (rho_1111 + rho_2222)/2 + |rho_1122|.
double max_fidelity_over_phi(const DensityMatrix& rho);

/// Wootters concurrence from the spin-flipped product rho (sy x sy) rho* (sy x sy).
double concurrence(const DensityMatrix& rho);

double binary_entropy(double x);

/// Entanglement of formation h((1 + sqrt(1 - C^2)) / 2).
double entanglement_of_formation(const DensityMatrix& rho);

/// Correlation expectation E(phi_s, phi_i) for half-wave-plate angles. The
/// idler analyzer rotates with the opposite sense (the arm is folded by a
/// mirror), which gives the cos(4 phi_s + 4 phi_i) dependence.
double correlation_from_density(const DensityMatrix& rho, double phi_s, double phi_i);

/// S at the four analyzer settings, from projective expectation values.
double chsh_from_density(const DensityMatrix& rho,
                         const experiment::ChshSettings& settings = experiment::ChshSettings::defaults());

/// Builds the ideal two-crystal output state from a normalized off-diagonal
/// ratio: diag(1/2, 0, 0, 1/2) with <VV|rho|HH> = rho1122.
DensityMatrix state_from_rho1122(complexd rho1122);

// ---------------------------------------------------------------------------
// Tomography

/// Single-qubit analyzer states, in the (V, H) basis:
///   V=(1,0), H=(0,1), D=(V+H)/sqrt2, A=(V-H)/sqrt2,
///   R=(V+iH)/sqrt2, L=(V-iH)/sqrt2.
Eigen::Vector2cd projector_state(char label);

struct TomographySetting {
    char signal = 'H';
    char idler = 'H';
};

struct TomographyEntry {
    TomographySetting setting;
    double count = 0.0;
    double time_s = 1.0;
};

struct TomographyRecord {
    std::vector<TomographyEntry> entries;

    /// The standard 16-setting pairwise {H,V,D,A,R,L} set.
    static std::array<TomographySetting, 16> default_settings();
};

enum class TomographyMethod { Linear, LikelihoodProjected };

struct Reconstruction {
    DensityMatrix rho;
    bool positive = false;       // true when the raw inversion was already PSD
    double min_eigenvalue = 0.0;
};

/// Linear inversion of projector count rates; the overall flux scale is a
/// free parameter absorbed by trace normalization. The likelihood-projected
/// method clips negative eigenvalues and renormalizes.
Reconstruction tomography_reconstruct(const TomographyRecord& record, TomographyMethod method);

/// Expected counts scale * Tr(rho P_k) for each setting; the forward model
/// used to synthesize tomography data.
std::vector<double> expected_counts(const DensityMatrix& rho,
                                    std::span<const TomographySetting> settings, double scale);

// ---------------------------------------------------------------------------
// Fixture I/O

/// Plain-text density fixture: a 4x4 real block followed by a 4x4 imaginary
/// block, row-major, '#' comments allowed.
Matrix4c load_density_fixture(const std::string& path);
void save_density_fixture(const std::string& path, const Matrix4c& m);

/// Delimited counts file with header: signal idler count time_s.
TomographyRecord load_counts_file(const std::string& path);

}  // namespace entsim::quantum

#include "entsim/quantum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "entsim/constants.hpp"
#include "entsim/errors.hpp"

namespace entsim::quantum {

namespace {

constexpr double hermiticity_tol = 1e-10;
constexpr double trace_tol = 1e-10;
constexpr double fixture_psd_tol = 0.15;  // raw linear inversion can dip this low

Eigen::Vector4d eigenvalues_hermitian(const Matrix4c& m) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

void check_validity(const Matrix4c& m, double psd_tol) {
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= hermiticity_tol)) {
        throw ValidationError("density matrix not Hermitian (max deviation " +
                              std::to_string(herm) + ")");
    }
    const std::complex<double> tr = m.trace();
    if (!(std::abs(tr - 1.0) <= trace_tol)) {
        std::ostringstream os;
        os << "density matrix trace " << tr << " != 1";
        throw ValidationError(os.str());
    }
    const double min_eig = eigenvalues_hermitian(m).minCoeff();
    if (!(min_eig >= -psd_tol)) {
        throw ValidationError("density matrix not positive semidefinite (min eigenvalue " +
                              std::to_string(min_eig) + ", tolerance " +
                              std::to_string(psd_tol) + ")");
    }
}

// analyzer state after a half-wave plate at angle phi and a PBS, (V,H) basis;
// the idler arm is folded by a mirror, flipping the rotation sense
Eigen::Vector2cd analyzer_state(double analyzer_angle, bool mirrored) {
    const double s = mirrored ? -1.0 : 1.0;
    Eigen::Vector2cd v;
    v << std::cos(analyzer_angle), s * std::sin(analyzer_angle);
    return v;
}

Eigen::Matrix2cd polarizer_observable(double hwp_angle, bool mirrored) {
    const double a = 2.0 * hwp_angle;  // analyzer rotation is twice the HWP angle
    const Eigen::Vector2cd plus = analyzer_state(a, mirrored);
    const Eigen::Vector2cd minus = analyzer_state(a + constants::pi / 2.0, mirrored);
    return plus * plus.adjoint() - minus * minus.adjoint();
}

}  // namespace

DensityMatrix DensityMatrix::validated(const Matrix4c& m, double psd_tol) {
    check_validity(m, psd_tol);
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::fixture_lenient(const Matrix4c& m) {
    check_validity(m, fixture_psd_tol);
    return DensityMatrix(m);
}

double DensityMatrix::min_eigenvalue() const { return eigenvalues_hermitian(m_).minCoeff(); }

DensityMatrix bell_state(double phi) {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = 1.0 / std::sqrt(2.0);                             // |VV>
    psi(3) = std::polar(1.0 / std::sqrt(2.0), phi);            // |HH>
    return DensityMatrix::validated(psi * psi.adjoint());
}

DensityMatrix visibility_mixed_state(double visibility, double phi) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw DomainError("visibility_mixed_state: V = " + std::to_string(visibility) +
                          " outside [0, 1]");
    }
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = m(3, 3) = 0.5;
    m(0, 3) = 0.5 * visibility * std::polar(1.0, -phi);
    m(3, 0) = std::conj(m(0, 3));
    return DensityMatrix::validated(m);
}

double fidelity(const DensityMatrix& rho, double phi) {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = 1.0 / std::sqrt(2.0);
    psi(3) = std::polar(1.0 / std::sqrt(2.0), phi);
    const double f = std::real((psi.adjoint() * rho.matrix() * psi)(0));
    return f;
}

double max_fidelity_over_phi(const DensityMatrix& rho) {
    const auto& m = rho.matrix();
    return 0.5 * std::real(m(0, 0) + m(3, 3)) + std::abs(m(0, 3));
}

double concurrence(const DensityMatrix& rho) {
    Matrix4c flip = Matrix4c::Zero();  // sigma_y x sigma_y in (VV, VH, HV, HH)
    flip(0, 3) = -1.0;
    flip(1, 2) = 1.0;
    flip(2, 1) = 1.0;
    flip(3, 0) = -1.0;
    const Matrix4c product = rho.matrix() * flip * rho.matrix().conjugate() * flip;
    Eigen::ComplexEigenSolver<Matrix4c> solver(product, false);
    std::array<double, 4> lambda{};
    for (int i = 0; i < 4; ++i) {
        lambda[i] = std::sqrt(std::max(0.0, solver.eigenvalues()(i).real()));
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    const double c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    return std::clamp(c, 0.0, 1.0);
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("binary_entropy: argument outside [0, 1]");
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double entanglement_of_formation(const DensityMatrix& rho) {
    const double c = concurrence(rho);
    const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
    return binary_entropy(x);
}

double correlation_from_density(const DensityMatrix& rho, double phi_s, double phi_i) {
    const Eigen::Matrix2cd a = polarizer_observable(phi_s, false);
    const Eigen::Matrix2cd b = polarizer_observable(phi_i, true);
    Matrix4c ab = Matrix4c::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            ab.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return std::real((rho.matrix() * ab).trace());
}

double chsh_from_density(const DensityMatrix& rho, const experiment::ChshSettings& settings) {
    const double e11 = correlation_from_density(rho, settings.signal1, settings.idler1);
    const double e12 = correlation_from_density(rho, settings.signal1, settings.idler2);
    const double e21 = correlation_from_density(rho, settings.signal2, settings.idler1);
    const double e22 = correlation_from_density(rho, settings.signal2, settings.idler2);
    return e11 + e12 + std::abs(e21 - e22);
}

DensityMatrix state_from_rho1122(complexd rho1122) {
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = m(3, 3) = 0.5;
    m(0, 3) = rho1122;
    m(3, 0) = std::conj(rho1122);
    return DensityMatrix::validated(m, 1e-9);
}

// ---------------------------------------------------------------------------
// Tomography

Eigen::Vector2cd projector_state(char label) {
    const double is = 1.0 / std::sqrt(2.0);
    Eigen::Vector2cd v;
    switch (label) {
        case 'V': v << 1.0, 0.0; break;
        case 'H': v << 0.0, 1.0; break;
        case 'D': v << is, is; break;
        case 'A': v << is, -is; break;
        case 'R': v << is, complexd(0.0, is); break;
        case 'L': v << is, complexd(0.0, -is); break;
        default:
            throw ParseError(std::string("unknown projector label '") + label + "'");
    }
    return v;
}

std::array<TomographySetting, 16> TomographyRecord::default_settings() {
    return {{{'H', 'H'}, {'H', 'V'}, {'V', 'V'}, {'V', 'H'},
             {'R', 'H'}, {'R', 'V'}, {'D', 'V'}, {'D', 'H'},
             {'D', 'R'}, {'D', 'D'}, {'R', 'D'}, {'H', 'D'},
             {'V', 'D'}, {'V', 'L'}, {'H', 'L'}, {'R', 'L'}}};
}

namespace {

Matrix4c setting_projector(const TomographySetting& s) {
    const Eigen::Vector2cd a = projector_state(s.signal);
    const Eigen::Vector2cd b = projector_state(s.idler);
    const Eigen::Matrix2cd pa = a * a.adjoint();
    const Eigen::Matrix2cd pb = b * b.adjoint();
    Matrix4c p = Matrix4c::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            p.block<2, 2>(2 * i, 2 * j) = pa(i, j) * pb;
    return p;
}

// Hermitian basis: 4 diagonal units, then (i<j) real and imaginary pair units.
std::array<Matrix4c, 16> hermitian_basis() {
    std::array<Matrix4c, 16> basis;
    int k = 0;
    for (int i = 0; i < 4; ++i) {
        basis[k] = Matrix4c::Zero();
        basis[k](i, i) = 1.0;
        ++k;
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            basis[k] = Matrix4c::Zero();
            basis[k](i, j) = 1.0;
            basis[k](j, i) = 1.0;
            ++k;
            basis[k] = Matrix4c::Zero();
            basis[k](i, j) = complexd(0.0, 1.0);
            basis[k](j, i) = complexd(0.0, -1.0);
            ++k;
        }
    }
    return basis;
}

}  // namespace

Reconstruction tomography_reconstruct(const TomographyRecord& record, TomographyMethod method) {
    const auto& entries = record.entries;
    if (entries.size() < 16) {
        throw ValidationError("tomography_reconstruct: need at least 16 settings, got " +
                              std::to_string(entries.size()));
    }
    double total = 0.0;
    for (const auto& e : entries) {
        if (!(e.count >= 0.0) || !std::isfinite(e.count)) {
            throw ValidationError("tomography_reconstruct: counts must be finite and >= 0");
        }
        if (!(e.time_s > 0.0)) {
            throw ValidationError("tomography_reconstruct: acquisition time must be positive");
        }
        total += e.count;
    }
    if (!(total > 0.0)) {
        throw ValidationError("tomography_reconstruct: all counts are zero");
    }

    const auto basis = hermitian_basis();
    const auto n = static_cast<Eigen::Index>(entries.size());
    Eigen::MatrixXd design(n, 16);
    Eigen::VectorXd rates(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Matrix4c p = setting_projector(entries[r].setting);
        for (int m = 0; m < 16; ++m) {
            design(r, m) = std::real((p * basis[m]).trace());
        }
        rates(r) = entries[r].count / entries[r].time_s;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 16) {
        throw SolverError("tomography_reconstruct: settings are not informationally complete "
                          "(design rank " + std::to_string(qr.rank()) + " < 16)");
    }
    const Eigen::VectorXd x = qr.solve(rates);

    Matrix4c rho = Matrix4c::Zero();
    for (int m = 0; m < 16; ++m) rho += x(m) * basis[m];
    const double tr = std::real(rho.trace());
    if (!(std::abs(tr) > 1e-12)) {
        throw SolverError("tomography_reconstruct: reconstructed state has zero trace");
    }
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint().eval());  // shed solver round-off

    Eigen::SelfAdjointEigenSolver<Matrix4c> eig(rho);
    const double min_eig = eig.eigenvalues().minCoeff();

    if (method == TomographyMethod::Linear) {
        // exact inversion, possibly slightly non-PSD; flagged, not repaired
        return {DensityMatrix::validated(rho, std::max(1.0, -2.0 * min_eig)),
                min_eig >= -1e-9, min_eig};
    }

    // Nearest valid density matrix in Frobenius norm, i.e. the maximum-
    // likelihood state under Gaussian noise: project the spectrum onto the
    // probability simplex (water-filling) instead of clip-and-rescale, which
    // would shrink the dominant eigenvalue.
    const Eigen::Vector4d lam = eig.eigenvalues();  // ascending
    constexpr std::array<int, 4> order{3, 2, 1, 0};
    double csum = 0.0, shift = 0.0;
    int keep = 0;
    for (int i = 0; i < 4; ++i) {
        csum += lam(order[static_cast<std::size_t>(i)]);
        const double candidate = (1.0 - csum) / (i + 1);
        if (lam(order[static_cast<std::size_t>(i)]) + candidate > 0.0) {
            keep = i + 1;
            shift = candidate;
        }
    }
    Matrix4c projected = Matrix4c::Zero();
    for (int i = 0; i < keep; ++i) {
        const auto vec = eig.eigenvectors().col(order[static_cast<std::size_t>(i)]);
        projected += (lam(order[static_cast<std::size_t>(i)]) + shift) * (vec * vec.adjoint());
    }
    return {DensityMatrix::validated(projected, 1e-9), min_eig >= -1e-9, min_eig};
}

std::vector<double> expected_counts(const DensityMatrix& rho,
                                    std::span<const TomographySetting> settings, double scale) {
    std::vector<double> counts;
    counts.reserve(settings.size());
    for (const auto& s : settings) {
        const Matrix4c p = setting_projector(s);
        counts.push_back(scale * std::real((rho.matrix() * p).trace()));
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Fixture I/O

Matrix4c load_density_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open density fixture '" + path + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double v = 0.0;
        while (ss >> v) values.push_back(v);
    }
    if (values.size() != 32) {
        throw ParseError(path + ": expected 32 numbers (4x4 real block then 4x4 imaginary "
                         "block), got " + std::to_string(values.size()));
    }
    Matrix4c m;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            m(i, j) = complexd(values[4 * i + j], values[16 + 4 * i + j]);
        }
    }
    return m;
}

void save_density_fixture(const std::string& path, const Matrix4c& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write density fixture '" + path + "'");
    out.precision(17);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) out << m(i, j).real() << (j == 3 ? "\n" : " ");
    }
    out << "\n";
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) out << m(i, j).imag() << (j == 3 ? "\n" : " ");
    }
}

TomographyRecord load_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open counts file '" + path + "'");
    TomographyRecord record;
    std::string line;
    bool header_seen = false;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // header row: signal idler count time_s
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string sig, idl;
        double count = 0.0, time_s = 0.0;
        if (!(ss >> sig >> idl >> count >> time_s) || sig.size() != 1 || idl.size() != 1) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected 'signal idler count time_s'");
        }
        record.entries.push_back({{sig[0], idl[0]}, count, time_s});
    }
    return record;
}

}  // namespace entsim::quantum

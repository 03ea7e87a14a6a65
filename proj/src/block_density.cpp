#include "qtrack/block_density.hpp"

#include <algorithm>
#include <stdexcept>

namespace qtrack {

BlockDensity BlockDensity::zero(Eigen::Index n) {
    BlockDensity rho;
    rho.e = Eigen::MatrixXcd::Zero(n, n);
    rho.g = Eigen::MatrixXcd::Zero(n, n);
    rho.eg = Eigen::MatrixXcd::Zero(n, n);
    rho.ge = Eigen::MatrixXcd::Zero(n, n);
    return rho;
}

BlockDensity BlockDensity::from_full(const Eigen::MatrixXcd& full) {
    if (full.rows() != full.cols() || full.rows() % 2 != 0) {
        throw std::invalid_argument("BlockDensity::from_full: expected a square 2N x 2N matrix");
    }
    const Eigen::Index n = full.rows() / 2;
    BlockDensity rho;
    rho.e = full.topLeftCorner(n, n);
    rho.eg = full.topRightCorner(n, n);
    rho.ge = full.bottomLeftCorner(n, n);
    rho.g = full.bottomRightCorner(n, n);
    return rho;
}

BlockDensity BlockDensity::pure(const Eigen::VectorXcd& psi_e, const Eigen::VectorXcd& psi_g) {
    if (psi_e.size() != psi_g.size()) {
        throw std::invalid_argument("BlockDensity::pure: component size mismatch");
    }
    BlockDensity rho;
    rho.e = psi_e * psi_e.adjoint();
    rho.g = psi_g * psi_g.adjoint();
    rho.eg = psi_e * psi_g.adjoint();
    rho.ge = psi_g * psi_e.adjoint();
    return rho;
}

Eigen::MatrixXcd BlockDensity::full() const {
    const Eigen::Index n = size();
    Eigen::MatrixXcd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = e;
    out.topRightCorner(n, n) = eg;
    out.bottomLeftCorner(n, n) = ge;
    out.bottomRightCorner(n, n) = g;
    return out;
}

double BlockDensity::max_abs() const {
    return std::max({e.cwiseAbs().maxCoeff(), g.cwiseAbs().maxCoeff(), eg.cwiseAbs().maxCoeff(),
                     ge.cwiseAbs().maxCoeff()});
}

void BlockDensity::hermitize() {
    e = (0.5 * (e + e.adjoint())).eval();
    g = (0.5 * (g + g.adjoint())).eval();
    Eigen::MatrixXcd avg = 0.5 * (eg + ge.adjoint());
    ge = avg.adjoint();
    eg = std::move(avg);
}

BlockDensity& BlockDensity::operator+=(const BlockDensity& other) {
    e += other.e;
    g += other.g;
    eg += other.eg;
    ge += other.ge;
    return *this;
}

BlockDensity& BlockDensity::operator-=(const BlockDensity& other) {
    e -= other.e;
    g -= other.g;
    eg -= other.eg;
    ge -= other.ge;
    return *this;
}

BlockDensity& BlockDensity::operator*=(cplx s) {
    e *= s;
    g *= s;
    eg *= s;
    ge *= s;
    return *this;
}

void BlockDensity::axpy(cplx s, const BlockDensity& other) {
    e.noalias() += s * other.e;
    g.noalias() += s * other.g;
    eg.noalias() += s * other.eg;
    ge.noalias() += s * other.ge;
}

BlockDensity operator+(BlockDensity a, const BlockDensity& b) { return a += b; }
BlockDensity operator-(BlockDensity a, const BlockDensity& b) { return a -= b; }
BlockDensity operator*(cplx s, BlockDensity a) { return a *= s; }

double max_block_difference(const BlockDensity& a, const BlockDensity& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("max_block_difference: size mismatch");
    }
    return std::max({(a.e - b.e).cwiseAbs().maxCoeff(), (a.g - b.g).cwiseAbs().maxCoeff(),
                     (a.eg - b.eg).cwiseAbs().maxCoeff(), (a.ge - b.ge).cwiseAbs().maxCoeff()});
}

double hermiticity_defect(const BlockDensity& rho) {
    return std::max({(rho.e - rho.e.adjoint()).cwiseAbs().maxCoeff(),
                     (rho.g - rho.g.adjoint()).cwiseAbs().maxCoeff(),
                     (rho.ge - rho.eg.adjoint()).cwiseAbs().maxCoeff()});
}

}  // namespace qtrack

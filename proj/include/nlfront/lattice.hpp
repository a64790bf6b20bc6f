#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nlfront/cumulant.hpp"

namespace nlfront {

/// Point masses approximating the density e^{θx}J(x)/M(θ) on the lattice hℤ.
/// Singular points lying on nodes get an Euler-Maclaurin endpoint correction.
struct KernelLattice {
    double h = 0.0;
    long first = 0;              ///< node index of mass[0]; its position is first * h
    std::vector<double> mass;    ///< normalized to sum 1
    double mean = 0.0;
    double variance = 0.0;
    bool corrected = false;      ///< every singular point sat on a node and was corrected

    long last() const { return first + static_cast<long>(mass.size()) - 1; }
};

KernelLattice discretize_kernel(const Kernel& kernel, double theta, double h);

/// Largest spacing of the form base/2^k for which the tilted lattice variance
/// reproduces Λ''(θ) to relative 1e-8 (or the finest spacing tried). `base`
/// is a spacing that puts every singular point on a node when one exists.
double lattice_spacing(const CumulantFunctions& cf, double theta);
/// Spacing that puts all singular points of the kernel on nodes, or 0 if none exists.
double singular_base_spacing(const Kernel& kernel);

/// FFTW real-to-complex pair of fixed length, with planning serialized.
class RealFFT {
public:
    explicit RealFFT(std::size_t n);
    ~RealFFT();
    RealFFT(const RealFFT&) = delete;
    RealFFT& operator=(const RealFFT&) = delete;

    std::size_t size() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    double* real() { return real_; }
    std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_); }

    void forward();   ///< real() -> spectrum()
    void backward();  ///< spectrum() -> real(), unnormalized

private:
    std::size_t n_;
    double* real_;
    void* spec_;
    void* plan_fwd_;
    void* plan_bwd_;
};

std::size_t next_pow2(std::size_t n);

/// z^n by binary exponentiation.
std::complex<double> ipow(std::complex<double> z, unsigned long n);

}  // namespace nlfront

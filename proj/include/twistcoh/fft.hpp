#pragma once

#include <complex>
#include <span>
#include <vector>

namespace twistcoh::fft {

using cplx = std::complex<double>;

// Unnormalized DFTs backed by FFTW:
//   forward:  X_k = sum_j x_j exp(-2 pi i jk/N)
//   backward: x_j = sum_k X_k exp(+2 pi i jk/N)
// Plans are cached per length; execution is safe from multiple threads.
std::vector<cplx> forward(std::span<const cplx> in);
std::vector<cplx> backward(std::span<const cplx> in);

/// Angular frequency of DFT bin k for sample spacing dx, in FFT order
/// (0, 1, ..., N/2-1, -N/2, ..., -1) scaled by 2 pi / (N dx).
double bin_frequency(std::size_t k, std::size_t n, double dx);

}  // namespace twistcoh::fft

#ifndef CONICAL_FFT_HPP
#define CONICAL_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace conical {

using cplx = std::complex<double>;

// Unnormalized forward transform, sum_j x_j e^{-2 pi i j k / n}.
void fft_forward(std::vector<cplx>& data);

// Unnormalized inverse transform (positive exponent); divide by n yourself
// when a true inverse is wanted.
void fft_inverse(std::vector<cplx>& data);

// Transforms along one axis of a row-major [n0][n1] array.
void fft_forward_axis(std::vector<cplx>& data, std::size_t n0, std::size_t n1, int axis);
void fft_inverse_axis(std::vector<cplx>& data, std::size_t n0, std::size_t n1, int axis);

// Wavenumber of bin k on an n-point grid of length len: 2 pi k~ / len with
// k~ the signed index in [-n/2, n/2).
double fft_wavenumber(std::size_t k, std::size_t n, double len);

// Signed bin index in [-n/2, n/2).
long fft_signed_index(std::size_t k, std::size_t n);

bool is_power_of_two(std::size_t n);

}  // namespace conical

#endif

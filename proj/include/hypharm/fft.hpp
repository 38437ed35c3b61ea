#pragma once

#include <span>

#include "hypharm/common.hpp"

namespace hypharm::fft {

// Unnormalized complex DFTs backed by FFTW:
//   forward:  X_k = sum_j x_j e^{-2 pi i jk/n}
//   backward: x_j = sum_k X_k e^{+2 pi i jk/n}
// Plans are cached per size; the in-place variants accept any alignment.
void forward(std::span<Complex> data);
void backward(std::span<Complex> data);

/// Signed integer frequency of DFT bin q for length n (Nyquist bin maps to -n/2).
inline int signed_bin(int q, int n) { return q < (n + 1) / 2 ? q : q - n; }

/// Smallest power of two >= n.
int next_pow2(int n);

}  // namespace hypharm::fft

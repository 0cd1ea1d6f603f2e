#pragma once

#include <complex>
#include <span>

namespace tunnel::fft {

using cd = std::complex<double>;

// Unnormalized length-n transforms backed by FFTW.
//   forward:  out[k] = sum_j in[j] exp(-2 pi i j k / n)
//   backward: out[k] = sum_j in[j] exp(+2 pi i j k / n)
// Plans are created once per (n, direction) and cached; planning is serialized
// behind a mutex, execution is thread safe. in and out may alias.
void forward(std::span<const cd> in, std::span<cd> out);
void backward(std::span<const cd> in, std::span<cd> out);

}  // namespace tunnel::fft

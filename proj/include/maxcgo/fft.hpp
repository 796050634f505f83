#pragma once

#include <complex>
#include <vector>

namespace maxcgo {

// In-place unnormalized complex DFT of a row-major array with the last
// listed dimension fastest. Plans are shared and cached by shape.
class Fft {
 public:
  explicit Fft(std::vector<int> dims);
  void forward(std::complex<double>* data) const;
  void backward(std::complex<double>* data) const;
  std::size_t size() const { return size_; }

 private:
  void* fwd_;
  void* bwd_;
  std::size_t size_;
};

// Box transform for an n^3 array stored x-fastest.
Fft box_fft(int n);

}  // namespace maxcgo

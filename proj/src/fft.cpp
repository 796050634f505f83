#include "maxcgo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace maxcgo {

namespace {

struct PlanPair {
  fftw_plan fwd;
  fftw_plan bwd;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair get_plans(const std::vector<int>& dims, std::size_t size) {
  static std::map<std::vector<int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(dims);
  if (it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(size);
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  int rank = static_cast<int>(dims.size());
  PlanPair p{fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_FORWARD, flags),
             fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_BACKWARD, flags)};
  fftw_free(buf);
  cache.emplace(dims, p);
  return p;
}

}  // namespace

Fft::Fft(std::vector<int> dims) {
  size_ = 1;
  for (int d : dims) size_ *= static_cast<std::size_t>(d);
  PlanPair p = get_plans(dims, size_);
  fwd_ = p.fwd;
  bwd_ = p.bwd;
}

void Fft::forward(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), d, d);
}

void Fft::backward(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), d, d);
}

Fft box_fft(int n) { return Fft({n, n, n}); }

}  // namespace maxcgo

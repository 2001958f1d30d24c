#include "twistcoh/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace twistcoh::fft {

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread-safe; execution via fftw_execute_dft is.
fftw_plan cached_plan(std::size_t n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, PlanHandle> plans;
  std::lock_guard lock(mu);
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second.get();
  std::vector<cplx> scratch_in(n), scratch_out(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                 reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(key, PlanHandle(p));
  return p;
}

std::vector<cplx> execute(std::span<const cplx> in, int sign) {
  std::vector<cplx> src(in.begin(), in.end());
  std::vector<cplx> out(in.size());
  if (in.empty()) return out;
  fftw_plan p = cached_plan(in.size(), sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> in) { return execute(in, FFTW_FORWARD); }

std::vector<cplx> backward(std::span<const cplx> in) { return execute(in, FFTW_BACKWARD); }

double bin_frequency(std::size_t k, std::size_t n, double dx) {
  const auto signed_k = (k < (n + 1) / 2) ? static_cast<double>(k)
                                          : static_cast<double>(k) - static_cast<double>(n);
  return 2.0 * std::numbers::pi * signed_k / (static_cast<double>(n) * dx);
}

}  // namespace twistcoh::fft

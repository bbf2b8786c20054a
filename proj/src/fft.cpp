#include "fhqr/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "fhqr/error.hpp"

namespace fhqr {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("FFTW could not plan a transform of size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::vector<cplx> unitary_dft(std::span<const cplx> in, FftDirection dir) {
  if (in.empty()) throw InvalidInput("unitary_dft: empty input");
  const int n = static_cast<int>(in.size());
  const int sign = dir == FftDirection::kForward ? FFTW_FORWARD : FFTW_BACKWARD;
  std::vector<cplx> out(in.begin(), in.end());
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans().get(n, sign), buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace fhqr

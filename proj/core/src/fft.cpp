#include "phasent/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "phasent/errors.hpp"

namespace phasent::fft {
namespace {

// FFTW planner calls are not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)), size(n) {
    if (ptr == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* ptr;
  std::size_t size;
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw DomainError("FFTW could not create a plan");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

void copy_in(std::span<const cplx> src, FftwBuffer& buf) {
  std::copy(src.begin(), src.end(), reinterpret_cast<cplx*>(buf.ptr));
}

void copy_out(const FftwBuffer& buf, std::span<cplx> dst, double scale) {
  const cplx* p = reinterpret_cast<const cplx*>(buf.ptr);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = p[i] * scale;
}

int sign(Direction d) { return d == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD; }

}  // namespace

void along_axis(std::span<cplx> data, std::size_t n1, std::size_t n2, int axis, Direction dir) {
  if (data.size() != n1 * n2) throw DomainError("fft: data size does not match shape");
  if (axis != 1 && axis != 2) throw DomainError("fft: axis must be 1 or 2");
  FftwBuffer buf(data.size());
  const int len = static_cast<int>(axis == 1 ? n1 : n2);
  const int howmany = static_cast<int>(axis == 1 ? n2 : n1);
  const int stride = axis == 1 ? static_cast<int>(n2) : 1;
  const int dist = axis == 1 ? 1 : static_cast<int>(n2);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_many_dft(1, &len, howmany, buf.ptr, nullptr, stride, dist, buf.ptr, nullptr, stride, dist,
                             sign(dir), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  copy_in(data, buf);
  plan.execute();
  copy_out(buf, data, dir == Direction::inverse ? 1.0 / len : 1.0);
}

void two_d(std::span<cplx> data, std::size_t n1, std::size_t n2, Direction dir) {
  if (data.size() != n1 * n2) throw DomainError("fft: data size does not match shape");
  FftwBuffer buf(data.size());
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), buf.ptr, buf.ptr, sign(dir), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  copy_in(data, buf);
  plan.execute();
  copy_out(buf, data, dir == Direction::inverse ? 1.0 / static_cast<double>(n1 * n2) : 1.0);
}

void one_d(std::span<cplx> data, Direction dir) { along_axis(data, 1, data.size(), 2, dir); }

std::string backend_version() { return fftw_version; }

}  // namespace phasent::fft

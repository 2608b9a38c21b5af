#include "lgra/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "lgra/denoiser.hpp"

namespace lgra {

namespace {

// Below this many multiply-accumulates thread start-up dominates.
constexpr std::size_t kParallelWork = 1u << 16;
// Rows per task block in the forward product.
constexpr std::size_t kRowBlock = 64;

}  // namespace

Backend resolve_backend(Backend requested, std::size_t work) {
  if (requested != Backend::kAuto) return requested;
  if (omp_in_parallel() || omp_get_max_threads() <= 1 || work < kParallelWork) return Backend::kSerial;
  return Backend::kOpenMP;
}

namespace kernels {

void matvec_serial(const ComplexMatrix& a, const CVector& x, CVector& y) {
  const std::size_t rows = a.rows();
  y.assign(rows, cdouble(0.0, 0.0));
  for (std::size_t c = 0; c < a.cols(); ++c) {
    const cdouble xc = x[c];
    if (xc == cdouble(0.0, 0.0)) continue;
    const cdouble* col = a.column(c);
    for (std::size_t r = 0; r < rows; ++r) y[r] += col[r] * xc;
  }
}

void matvec_omp(const ComplexMatrix& a, const CVector& x, CVector& y) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  y.assign(rows, cdouble(0.0, 0.0));
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((rows + kRowBlock - 1) / kRowBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kRowBlock;
    const std::size_t hi = std::min(rows, lo + kRowBlock);
    for (std::size_t c = 0; c < cols; ++c) {
      const cdouble xc = x[c];
      if (xc == cdouble(0.0, 0.0)) continue;
      const cdouble* col = a.column(c);
      for (std::size_t r = lo; r < hi; ++r) y[r] += col[r] * xc;
    }
  }
}

void adjoint_serial(const ComplexMatrix& a, const CVector& z, CVector& r) {
  const std::size_t rows = a.rows();
  r.assign(a.cols(), cdouble(0.0, 0.0));
  for (std::size_t c = 0; c < a.cols(); ++c) {
    const cdouble* col = a.column(c);
    cdouble acc(0.0, 0.0);
    for (std::size_t i = 0; i < rows; ++i) acc += std::conj(col[i]) * z[i];
    r[c] = acc;
  }
}

void adjoint_omp(const ComplexMatrix& a, const CVector& z, CVector& r) {
  const std::size_t rows = a.rows();
  const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(a.cols());
  r.assign(a.cols(), cdouble(0.0, 0.0));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < cols; ++c) {
    const cdouble* col = a.column(static_cast<std::size_t>(c));
    cdouble acc(0.0, 0.0);
    for (std::size_t i = 0; i < rows; ++i) acc += std::conj(col[i]) * z[i];
    r[static_cast<std::size_t>(c)] = acc;
  }
}

void denoise_serial(const CVector& r, double tau, const RVector& g, const RVector& lambda, CVector& x,
                    RVector& deriv) {
  const std::size_t n = r.size();
  x.resize(n);
  deriv.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Denoised d = mmse_denoise(r[m], tau, g[m], lambda[m]);
    x[m] = d.value;
    deriv[m] = d.derivative;
  }
}

void denoise_omp(const CVector& r, double tau, const RVector& g, const RVector& lambda, CVector& x,
                 RVector& deriv) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(r.size());
  x.resize(r.size());
  deriv.resize(r.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    const Denoised d = mmse_denoise(r[m], tau, g[m], lambda[m]);
    x[m] = d.value;
    deriv[m] = d.derivative;
  }
}

void matvec(const ComplexMatrix& a, const CVector& x, CVector& y, Backend backend) {
  if (resolve_backend(backend, a.rows() * a.cols()) == Backend::kOpenMP) {
    matvec_omp(a, x, y);
  } else {
    matvec_serial(a, x, y);
  }
}

void adjoint(const ComplexMatrix& a, const CVector& z, CVector& r, Backend backend) {
  if (resolve_backend(backend, a.rows() * a.cols()) == Backend::kOpenMP) {
    adjoint_omp(a, z, r);
  } else {
    adjoint_serial(a, z, r);
  }
}

void denoise(const CVector& r, double tau, const RVector& g, const RVector& lambda, CVector& x, RVector& deriv,
             Backend backend) {
  // The denoiser costs roughly fifty multiply-accumulates per element.
  if (resolve_backend(backend, 50 * r.size()) == Backend::kOpenMP) {
    denoise_omp(r, tau, g, lambda, x, deriv);
  } else {
    denoise_serial(r, tau, g, lambda, x, deriv);
  }
}

}  // namespace kernels

}  // namespace lgra

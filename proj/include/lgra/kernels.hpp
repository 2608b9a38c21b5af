#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lgra {

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble>;
using RVector = std::vector<double>;

// Dense column-major complex matrix. Column m is the preamble of group m.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cdouble& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  const cdouble& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  const cdouble* column(std::size_t c) const { return data_.data() + c * rows_; }
  cdouble* column(std::size_t c) { return data_.data() + c * rows_; }
  const cdouble* data() const { return data_.data(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> data_;
};

enum class Backend { kSerial, kOpenMP, kAuto };

// Backend::kAuto resolves to OpenMP for large problems outside an enclosing
// parallel region and to the serial path otherwise.
Backend resolve_backend(Backend requested, std::size_t work);

// Both backends produce bit-identical results: every output element is
// accumulated in the same order regardless of thread count.
namespace kernels {

// y = A x
void matvec_serial(const ComplexMatrix& a, const CVector& x, CVector& y);
void matvec_omp(const ComplexMatrix& a, const CVector& x, CVector& y);

// r = A^H z
void adjoint_serial(const ComplexMatrix& a, const CVector& z, CVector& r);
void adjoint_omp(const ComplexMatrix& a, const CVector& z, CVector& r);

// Elementwise MMSE denoiser: x[m] = eta(r[m]), deriv[m] = eta'(r[m]).
void denoise_serial(const CVector& r, double tau, const RVector& g, const RVector& lambda, CVector& x,
                    RVector& deriv);
void denoise_omp(const CVector& r, double tau, const RVector& g, const RVector& lambda, CVector& x,
                 RVector& deriv);

void matvec(const ComplexMatrix& a, const CVector& x, CVector& y, Backend backend);
void adjoint(const ComplexMatrix& a, const CVector& z, CVector& r, Backend backend);
void denoise(const CVector& r, double tau, const RVector& g, const RVector& lambda, CVector& x, RVector& deriv,
             Backend backend);

}  // namespace kernels

}  // namespace lgra

// types.hpp - shared numeric aliases, strong enums and the library error type
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fheom {

using cplx = std::complex<double>;
using DenseMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SparseMat = Eigen::SparseMatrix<cplx>;
using SparseRowMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx I{0.0, 1.0};

enum class Parity { even, odd };

// Correlation branch: plus pairs B^dagger(t2) B(t1), minus pairs B(t2) B^dagger(t1).
enum class Sigma : int { plus = 1, minus = -1 };

constexpr int sign(Sigma s) { return static_cast<int>(s); }
constexpr Sigma flip(Sigma s) { return s == Sigma::plus ? Sigma::minus : Sigma::plus; }

enum class ErrorCode {
  invalid_argument = 1,
  config = 2,
  solver = 3,
  io = 4,
  unsupported_sector = 5,
  quadrature = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace fheom

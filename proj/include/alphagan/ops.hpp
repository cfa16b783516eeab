#pragma once

#include <cstddef>
#include <vector>

#include "alphagan/tensor.hpp"

namespace alphagan {

// Primitive tensor ops. Every op records itself on the inputs' tape when at
// least one input is tape-attached; pure-constant inputs stay off-tape.
// Shapes are checked up front and mismatches name both operands.

Tensor matmul(const Tensor& a, const Tensor& b);

// elementwise, identical shapes
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scalar_mul(const Tensor& a, double c);
Tensor scalar_add(const Tensor& a, double c);

Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor log(const Tensor& a);   // requires strictly positive input
Tensor exp(const Tensor& a);   // requires |x| <= 700
Tensor abs(const Tensor& a);   // subgradient 0 at exactly 0
Tensor sqrt(const Tensor& a);  // requires non-negative input
Tensor reciprocal(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor maximum(const Tensor& a, double c);

Tensor sum(const Tensor& a);                     // -> [1]
Tensor sum(const Tensor& a, std::size_t axis);   // 2-D, keeps reduced axis as 1
Tensor mean(const Tensor& a);                    // -> [1]
Tensor mean(const Tensor& a, std::size_t axis);  // 2-D, keeps reduced axis as 1

Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis);             // 2-D
Tensor narrow(const Tensor& a, std::size_t axis, std::size_t start, std::size_t len);  // 2-D
Tensor reshape(const Tensor& a, Shape shape);
Tensor softmax(const Tensor& a, std::size_t axis);  // 2-D, max-subtracted

/// x: [B,n], bias: [n]; adds the bias to every row.
Tensor bias_add(const Tensor& x, const Tensor& bias);

/// x: [B,n], s: [B,1]; scales row i of x by s[i].
Tensor rowwise_scale(const Tensor& x, const Tensor& s);

/// Mean NLL of softmax(logits) at the given labels; logits [B,C]. Fused for
/// stability; backward is (softmax - onehot)/B.
Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double c) { return scalar_mul(a, c); }
inline Tensor operator*(double c, const Tensor& a) { return scalar_mul(a, c); }
inline Tensor operator+(const Tensor& a, double c) { return scalar_add(a, c); }
inline Tensor operator-(const Tensor& a, double c) { return scalar_add(a, -c); }
inline Tensor operator-(const Tensor& a) { return scalar_mul(a, -1.0); }

// raw kernels, shared with the backward rules
namespace kernels {
// c[M,N] += / = a[M,K] * b[K,N]
void matmul_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
// c[M,K] += a[M,N] * b[K,N]^T
void matmul_nt_accum(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k);
// c[K,N] += a[M,K]^T * b[M,N]
void matmul_tn_accum(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
}  // namespace kernels

}  // namespace alphagan

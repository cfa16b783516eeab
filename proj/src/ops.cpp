#include "alphagan/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace alphagan {

namespace kernels {

void matmul_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n) {
    std::fill(c, c + m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// a[M,N] * b[K,N]^T, accumulated into c[M,K]. Transposing b first keeps the
// inner loop a contiguous saxpy, which vectorizes without -ffast-math.
void matmul_nt_accum(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                     std::size_t k) {
    std::vector<double> bt(n * k);  // b^T, [N,K]
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t p = 0; p < n; ++p) bt[p * k + j] = b[j * n + p];
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * n;
        double* crow = c + i * k;
        for (std::size_t p = 0; p < n; ++p) {
            const double av = arow[p];
            const double* btrow = bt.data() + p * k;
            for (std::size_t j = 0; j < k; ++j) crow[j] += av * btrow[j];
        }
    }
}

void matmul_tn_accum(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                     std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        const double* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            double* crow = c + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

}  // namespace kernels

namespace {

std::shared_ptr<const std::vector<double>> share(const Tensor& t) {
    // tensors share immutable storage; keep the buffer alive inside closures
    return t.storage();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
}

void require_2d(const Tensor& a, const char* op) {
    if (a.rank() != 2) {
        throw ShapeError(std::string(op) + ": expected a 2-D tensor, got shape " +
                         shape_str(a.shape()));
    }
}

// Elementwise unary op: out = f(x), dx = dfdx(x, y) * dy.
template <typename F, typename DF>
Tensor unary_op(const Tensor& a, F f, DF dfdx) {
    const std::vector<double>& x = a.values();
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
    Tape* tape = common_tape({&a});
    if (!tape) return Tensor(a.shape(), std::move(y));
    auto xs = share(a);
    auto ys = std::make_shared<std::vector<double>>(y);
    int an = a.node();
    return tape->emit(a.shape(), std::move(y),
                      [xs, ys, an, dfdx](Tape& t, const std::vector<double>& dy) {
                          std::vector<double> dx(dy.size());
                          for (std::size_t i = 0; i < dy.size(); ++i)
                              dx[i] = dfdx((*xs)[i], (*ys)[i]) * dy[i];
                          t.accumulate(an, dx.data(), dx.size());
                      });
}

double stable_softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul");
    require_2d(b, "matmul");
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: shape mismatch " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> y(m * n);
    kernels::matmul_nn(a.values().data(), b.values().data(), y.data(), m, k, n);
    Tape* tape = common_tape({&a, &b});
    if (!tape) return Tensor({m, n}, std::move(y));
    auto as = share(a), bs = share(b);
    int an = a.node(), bn = b.node();
    return tape->emit({m, n}, std::move(y),
                      [as, bs, an, bn, m, k, n](Tape& t, const std::vector<double>& dy) {
                          if (an >= 0) {
                              std::vector<double> da(m * k, 0.0);
                              kernels::matmul_nt_accum(dy.data(), bs->data(), da.data(), m, n, k);
                              t.accumulate(an, da.data(), da.size());
                          }
                          if (bn >= 0) {
                              std::vector<double> db(k * n, 0.0);
                              kernels::matmul_tn_accum(as->data(), dy.data(), db.data(), m, k, n);
                              t.accumulate(bn, db.data(), db.size());
                          }
                      });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    std::vector<double> y(a.numel());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = pa[i] + pb[i];
    Tape* tape = common_tape({&a, &b});
    if (!tape) return Tensor(a.shape(), std::move(y));
    int an = a.node(), bn = b.node();
    return tape->emit(a.shape(), std::move(y), [an, bn](Tape& t, const std::vector<double>& dy) {
        t.accumulate(an, dy.data(), dy.size());
        t.accumulate(bn, dy.data(), dy.size());
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    std::vector<double> y(a.numel());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = pa[i] - pb[i];
    Tape* tape = common_tape({&a, &b});
    if (!tape) return Tensor(a.shape(), std::move(y));
    int an = a.node(), bn = b.node();
    return tape->emit(a.shape(), std::move(y), [an, bn](Tape& t, const std::vector<double>& dy) {
        t.accumulate(an, dy.data(), dy.size());
        if (bn >= 0) {
            std::vector<double> db(dy.size());
            for (std::size_t i = 0; i < dy.size(); ++i) db[i] = -dy[i];
            t.accumulate(bn, db.data(), db.size());
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    std::vector<double> y(a.numel());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = pa[i] * pb[i];
    Tape* tape = common_tape({&a, &b});
    if (!tape) return Tensor(a.shape(), std::move(y));
    auto as = share(a), bs = share(b);
    int an = a.node(), bn = b.node();
    return tape->emit(a.shape(), std::move(y),
                      [as, bs, an, bn](Tape& t, const std::vector<double>& dy) {
                          std::vector<double> d(dy.size());
                          if (an >= 0) {
                              for (std::size_t i = 0; i < dy.size(); ++i) d[i] = dy[i] * (*bs)[i];
                              t.accumulate(an, d.data(), d.size());
                          }
                          if (bn >= 0) {
                              for (std::size_t i = 0; i < dy.size(); ++i) d[i] = dy[i] * (*as)[i];
                              t.accumulate(bn, d.data(), d.size());
                          }
                      });
}

Tensor scalar_mul(const Tensor& a, double c) {
    return unary_op(a, [c](double x) { return x * c; }, [c](double, double) { return c; });
}

Tensor scalar_add(const Tensor& a, double c) {
    return unary_op(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor relu(const Tensor& a) {
    return unary_op(a, [](double x) { return x > 0.0 ? x : 0.0; },
                    [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
    return unary_op(a, [slope](double x) { return x > 0.0 ? x : slope * x; },
                    [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Tensor sigmoid(const Tensor& a) {
    return unary_op(a,
                    [](double x) {
                        return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                        : std::exp(x) / (1.0 + std::exp(x));
                    },
                    [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
    return unary_op(a, [](double x) { return std::tanh(x); },
                    [](double, double y) { return 1.0 - y * y; });
}

Tensor log(const Tensor& a) {
    for (double x : a.values()) {
        if (!(x > 0.0)) throw DomainError("log: input must be strictly positive, got " + std::to_string(x));
    }
    return unary_op(a, [](double x) { return std::log(x); },
                    [](double x, double) { return 1.0 / x; });
}

Tensor exp(const Tensor& a) {
    for (double x : a.values()) {
        if (std::fabs(x) > 700.0) throw DomainError("exp: |input| > 700 overflows, got " + std::to_string(x));
    }
    return unary_op(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor abs(const Tensor& a) {
    return unary_op(a, [](double x) { return std::fabs(x); },
                    [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor sqrt(const Tensor& a) {
    for (double x : a.values()) {
        if (x < 0.0) throw DomainError("sqrt: input must be non-negative, got " + std::to_string(x));
    }
    return unary_op(a, [](double x) { return std::sqrt(x); },
                    [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor reciprocal(const Tensor& a) {
    for (double x : a.values()) {
        if (x == 0.0) throw DomainError("reciprocal: input must be non-zero");
    }
    return unary_op(a, [](double x) { return 1.0 / x; },
                    [](double, double y) { return -y * y; });
}

Tensor softplus(const Tensor& a) {
    return unary_op(a, [](double x) { return stable_softplus(x); },
                    [](double x, double) {
                        return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                        : std::exp(x) / (1.0 + std::exp(x));
                    });
}

Tensor maximum(const Tensor& a, double c) {
    return unary_op(a, [c](double x) { return x > c ? x : c; },
                    [c](double x, double) { return x > c ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
    double acc = 0.0;
    for (double x : a.values()) acc += x;
    Tape* tape = common_tape({&a});
    if (!tape) return Tensor::scalar(acc);
    int an = a.node();
    std::size_t n = a.numel();
    return tape->emit({1}, {acc}, [an, n](Tape& t, const std::vector<double>& dy) {
        std::vector<double> dx(n, dy[0]);
        t.accumulate(an, dx.data(), n);
    });
}

Tensor mean(const Tensor& a) {
    const double inv = 1.0 / static_cast<double>(a.numel());
    return scalar_mul(sum(a), inv);
}

Tensor sum(const Tensor& a, std::size_t axis) {
    require_2d(a, "sum");
    if (axis > 1) throw ShapeError("sum: axis out of range for 2-D tensor");
    const std::size_t r = a.rows(), c = a.cols();
    Shape oshape = axis == 0 ? Shape{1, c} : Shape{r, 1};
    std::vector<double> y(axis == 0 ? c : r, 0.0);
    const std::vector<double>& x = a.values();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) y[axis == 0 ? j : i] += x[i * c + j];
    Tape* tape = common_tape({&a});
    if (!tape) return Tensor(std::move(oshape), std::move(y));
    int an = a.node();
    return tape->emit(std::move(oshape), std::move(y),
                      [an, r, c, axis](Tape& t, const std::vector<double>& dy) {
                          std::vector<double> dx(r * c);
                          for (std::size_t i = 0; i < r; ++i)
                              for (std::size_t j = 0; j < c; ++j)
                                  dx[i * c + j] = dy[axis == 0 ? j : i];
                          t.accumulate(an, dx.data(), dx.size());
                      });
}

Tensor mean(const Tensor& a, std::size_t axis) {
    require_2d(a, "mean");
    const double inv = 1.0 / static_cast<double>(axis == 0 ? a.rows() : a.cols());
    return scalar_mul(sum(a, axis), inv);
}

Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis) {
    require_2d(a, "concat");
    require_2d(b, "concat");
    if (axis > 1) throw ShapeError("concat: axis out of range for 2-D tensor");
    const std::size_t other = 1 - axis;
    if (a.shape()[other] != b.shape()[other]) {
        throw ShapeError("concat: shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()) + " on axis " + std::to_string(axis));
    }
    Shape oshape = a.shape();
    oshape[axis] += b.shape()[axis];
    std::vector<double> y(oshape[0] * oshape[1]);
    const std::size_t ar = a.rows(), ac = a.cols(), bc = b.cols();
    if (axis == 0) {
        std::copy(a.values().begin(), a.values().end(), y.begin());
        std::copy(b.values().begin(), b.values().end(), y.begin() + static_cast<long>(a.numel()));
    } else {
        for (std::size_t i = 0; i < ar; ++i) {
            std::copy_n(a.values().begin() + static_cast<long>(i * ac), ac, y.begin() + static_cast<long>(i * (ac + bc)));
            std::copy_n(b.values().begin() + static_cast<long>(i * bc), bc, y.begin() + static_cast<long>(i * (ac + bc) + ac));
        }
    }
    Tape* tape = common_tape({&a, &b});
    if (!tape) return Tensor(std::move(oshape), std::move(y));
    int an = a.node(), bn = b.node();
    std::size_t an_count = a.numel();
    return tape->emit(std::move(oshape), std::move(y),
                      [an, bn, ar, ac, bc, an_count, axis](Tape& t, const std::vector<double>& dy) {
                          if (axis == 0) {
                              t.accumulate(an, dy.data(), an_count);
                              t.accumulate(bn, dy.data() + an_count, dy.size() - an_count);
                              return;
                          }
                          std::vector<double> da(ar * ac), db(ar * bc);
                          for (std::size_t i = 0; i < ar; ++i) {
                              std::copy_n(dy.begin() + static_cast<long>(i * (ac + bc)), ac, da.begin() + static_cast<long>(i * ac));
                              std::copy_n(dy.begin() + static_cast<long>(i * (ac + bc) + ac), bc, db.begin() + static_cast<long>(i * bc));
                          }
                          t.accumulate(an, da.data(), da.size());
                          t.accumulate(bn, db.data(), db.size());
                      });
}

Tensor narrow(const Tensor& a, std::size_t axis, std::size_t start, std::size_t len) {
    require_2d(a, "narrow");
    if (axis > 1) throw ShapeError("narrow: axis out of range for 2-D tensor");
    if (start + len > a.shape()[axis]) {
        throw ShapeError("narrow: range [" + std::to_string(start) + "," + std::to_string(start + len) +
                         ") exceeds shape " + shape_str(a.shape()) + " on axis " + std::to_string(axis));
    }
    const std::size_t r = a.rows(), c = a.cols();
    Shape oshape = axis == 0 ? Shape{len, c} : Shape{r, len};
    std::vector<double> y(oshape[0] * oshape[1]);
    const std::vector<double>& x = a.values();
    if (axis == 0) {
        std::copy_n(x.begin() + static_cast<long>(start * c), len * c, y.begin());
    } else {
        for (std::size_t i = 0; i < r; ++i)
            std::copy_n(x.begin() + static_cast<long>(i * c + start), len, y.begin() + static_cast<long>(i * len));
    }
    Tape* tape = common_tape({&a});
    if (!tape) return Tensor(std::move(oshape), std::move(y));
    int an = a.node();
    return tape->emit(std::move(oshape), std::move(y),
                      [an, r, c, start, len, axis](Tape& t, const std::vector<double>& dy) {
                          std::vector<double> dx(r * c, 0.0);
                          if (axis == 0) {
                              std::copy(dy.begin(), dy.end(), dx.begin() + static_cast<long>(start * c));
                          } else {
                              for (std::size_t i = 0; i < r; ++i)
                                  std::copy_n(dy.begin() + static_cast<long>(i * len), len,
                                              dx.begin() + static_cast<long>(i * c + start));
                          }
                          t.accumulate(an, dx.data(), dx.size());
                      });
}

Tensor reshape(const Tensor& a, Shape shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    if (n != a.numel()) {
        throw ShapeError("reshape: " + shape_str(a.shape()) + " has " + std::to_string(a.numel()) +
                         " elements, target " + shape_str(shape) + " has " + std::to_string(n));
    }
    std::vector<double> y = a.values();
    Tape* tape = common_tape({&a});
    if (!tape) return Tensor(std::move(shape), std::move(y));
    int an = a.node();
    return tape->emit(std::move(shape), std::move(y),
                      [an](Tape& t, const std::vector<double>& dy) {
                          t.accumulate(an, dy.data(), dy.size());
                      });
}

Tensor softmax(const Tensor& a, std::size_t axis) {
    require_2d(a, "softmax");
    if (axis > 1) throw ShapeError("softmax: axis out of range for 2-D tensor");
    const std::size_t r = a.rows(), c = a.cols();
    const std::vector<double>& x = a.values();
    std::vector<double> y(r * c);
    const std::size_t outer = axis == 1 ? r : c;
    const std::size_t inner = axis == 1 ? c : r;
    const auto idx = [axis, c](std::size_t o, std::size_t i) {
        return axis == 1 ? o * c + i : i * c + o;
    };
    for (std::size_t o = 0; o < outer; ++o) {
        double mx = x[idx(o, 0)];
        for (std::size_t i = 1; i < inner; ++i) mx = std::max(mx, x[idx(o, i)]);
        double z = 0.0;
        for (std::size_t i = 0; i < inner; ++i) {
            double e = std::exp(x[idx(o, i)] - mx);
            y[idx(o, i)] = e;
            z += e;
        }
        for (std::size_t i = 0; i < inner; ++i) y[idx(o, i)] /= z;
    }
    Tape* tape = common_tape({&a});
    if (!tape) return Tensor({r, c}, std::move(y));
    auto ys = std::make_shared<std::vector<double>>(y);
    int an = a.node();
    return tape->emit({r, c}, std::move(y),
                      [ys, an, r, c, axis, outer, inner, idx](Tape& t, const std::vector<double>& dy) {
                          std::vector<double> dx(r * c);
                          for (std::size_t o = 0; o < outer; ++o) {
                              double dot = 0.0;
                              for (std::size_t i = 0; i < inner; ++i)
                                  dot += dy[idx(o, i)] * (*ys)[idx(o, i)];
                              for (std::size_t i = 0; i < inner; ++i)
                                  dx[idx(o, i)] = (*ys)[idx(o, i)] * (dy[idx(o, i)] - dot);
                          }
                          t.accumulate(an, dx.data(), dx.size());
                      });
}

Tensor bias_add(const Tensor& x, const Tensor& bias) {
    require_2d(x, "bias_add");
    if (bias.rank() != 1 || bias.shape()[0] != x.cols()) {
        throw ShapeError("bias_add: shape mismatch " + shape_str(x.shape()) + " vs " +
                         shape_str(bias.shape()));
    }
    const std::size_t r = x.rows(), c = x.cols();
    const double* px = x.values().data();
    const double* pbias = bias.values().data();
    std::vector<double> y(r * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) y[i * c + j] = px[i * c + j] + pbias[j];
    Tape* tape = common_tape({&x, &bias});
    if (!tape) return Tensor({r, c}, std::move(y));
    int xn = x.node(), bn = bias.node();
    return tape->emit({r, c}, std::move(y),
                      [xn, bn, r, c](Tape& t, const std::vector<double>& dy) {
                          t.accumulate(xn, dy.data(), dy.size());
                          if (bn >= 0) {
                              std::vector<double> db(c, 0.0);
                              for (std::size_t i = 0; i < r; ++i)
                                  for (std::size_t j = 0; j < c; ++j) db[j] += dy[i * c + j];
                              t.accumulate(bn, db.data(), c);
                          }
                      });
}

Tensor rowwise_scale(const Tensor& x, const Tensor& s) {
    require_2d(x, "rowwise_scale");
    if (s.rank() != 2 || s.rows() != x.rows() || s.cols() != 1) {
        throw ShapeError("rowwise_scale: scale must be [rows,1], got " + shape_str(s.shape()) +
                         " for " + shape_str(x.shape()));
    }
    const std::size_t r = x.rows(), c = x.cols();
    const double* px = x.values().data();
    const double* ps = s.values().data();
    std::vector<double> y(r * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) y[i * c + j] = px[i * c + j] * ps[i];
    Tape* tape = common_tape({&x, &s});
    if (!tape) return Tensor({r, c}, std::move(y));
    auto xs = share(x), ss = share(s);
    int xn = x.node(), sn = s.node();
    return tape->emit({r, c}, std::move(y),
                      [xs, ss, xn, sn, r, c](Tape& t, const std::vector<double>& dy) {
                          if (xn >= 0) {
                              std::vector<double> dx(r * c);
                              for (std::size_t i = 0; i < r; ++i)
                                  for (std::size_t j = 0; j < c; ++j)
                                      dx[i * c + j] = dy[i * c + j] * (*ss)[i];
                              t.accumulate(xn, dx.data(), dx.size());
                          }
                          if (sn >= 0) {
                              std::vector<double> ds(r, 0.0);
                              for (std::size_t i = 0; i < r; ++i)
                                  for (std::size_t j = 0; j < c; ++j)
                                      ds[i] += dy[i * c + j] * (*xs)[i * c + j];
                              t.accumulate(sn, ds.data(), r);
                          }
                      });
}

Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels) {
    require_2d(logits, "softmax_cross_entropy");
    const std::size_t b = logits.rows(), c = logits.cols();
    if (labels.size() != b) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for batch of " + std::to_string(b));
    }
    for (std::size_t lab : labels) {
        if (lab >= c) throw ShapeError("softmax_cross_entropy: label out of range");
    }
    const std::vector<double>& x = logits.values();
    std::vector<double> probs(b * c);
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double mx = x[i * c];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, x[i * c + j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            probs[i * c + j] = std::exp(x[i * c + j] - mx);
            z += probs[i * c + j];
        }
        for (std::size_t j = 0; j < c; ++j) probs[i * c + j] /= z;
        loss += -(x[i * c + labels[i]] - mx - std::log(z));
    }
    loss /= static_cast<double>(b);
    Tape* tape = common_tape({&logits});
    if (!tape) return Tensor::scalar(loss);
    auto ps = std::make_shared<std::vector<double>>(std::move(probs));
    auto labs = std::make_shared<std::vector<std::size_t>>(labels);
    int ln = logits.node();
    return tape->emit({1}, {loss}, [ps, labs, ln, b, c](Tape& t, const std::vector<double>& dy) {
        std::vector<double> dx(b * c);
        const double scale = dy[0] / static_cast<double>(b);
        for (std::size_t i = 0; i < b; ++i)
            for (std::size_t j = 0; j < c; ++j)
                dx[i * c + j] = scale * ((*ps)[i * c + j] - (j == (*labs)[i] ? 1.0 : 0.0));
        t.accumulate(ln, dx.data(), dx.size());
    });
}

}  // namespace alphagan

#include "alphagan/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace alphagan {

double grad_check(const ScalarFn& f, const Tensor& point, double step) {
    if (!(step > 0.0 && step <= 1e-2)) {
        throw DomainError("grad_check: step must be in (0, 1e-2]");
    }
    Tape tape;
    Tensor x = tape.watch(point);
    Tensor y = f(x);
    tape.backward(y);
    const std::vector<double>* g = x.grad();

    std::vector<double> probe = point.values();
    double worst = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + step;
        const double up = f(Tensor(point.shape(), probe)).value();
        probe[i] = saved - step;
        const double down = f(Tensor(point.shape(), probe)).value();
        probe[i] = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double analytic = g ? (*g)[i] : 0.0;
        const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
        worst = std::max(worst, std::fabs(analytic - numeric) / denom);
    }
    return worst;
}

}  // namespace alphagan

#include "mtdea/gradcheck.hpp"

#include <cmath>

#include "mtdea/errors.hpp"

namespace mtdea {

double finite_diff_check(const std::function<double()>& eval, const std::function<std::vector<Tensor>()>& grad,
                         std::span<Tensor* const> params, double step) {
    if (!(step > 0.0)) throw ContractViolation("finite_diff_check: step must be positive");
    std::vector<Tensor> autodiff = grad();
    if (autodiff.size() != params.size()) throw ContractViolation("finite_diff_check: gradient count mismatch");

    double max_rel = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        if (!autodiff[i].same_shape(p)) throw ContractViolation("finite_diff_check: gradient shape mismatch");
        for (std::int64_t j = 0; j < p.size(); ++j) {
            const double saved = p[j];
            p[j] = saved + step;
            const double up = eval();
            p[j] = saved - step;
            const double down = eval();
            p[j] = saved;
            if (!std::isfinite(up) || !std::isfinite(down))
                throw NumericError("finite_diff_check: non-finite objective evaluation");
            const double fd = (up - down) / (2.0 * step);
            const double rel = std::abs(autodiff[i][j] - fd) / std::max(1.0, std::abs(fd));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace mtdea

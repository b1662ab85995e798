#include "mtdea/tensor.hpp"

#include <cmath>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "mtdea/errors.hpp"

namespace mtdea {

#if defined(__GLIBC__)
// Tape buffers sit right at glibc's default mmap threshold, and the
// mmap/munmap round trips dominate training time if left alone. Keep large
// blocks on the heap and stop trimming so buffers get reused across steps.
namespace {
struct MallocTuning {
    MallocTuning() {
        mallopt(M_MMAP_THRESHOLD, 1 << 30);
        mallopt(M_TRIM_THRESHOLD, 1 << 30);
    }
};
const MallocTuning malloc_tuning;
}  // namespace
#endif

std::int64_t shape_numel(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ContractViolation("tensor shape entries must be positive");
        n *= d;
    }
    return n;
}

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_numel(shape_)), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_numel(shape_) != static_cast<std::int64_t>(data_.size()))
        throw ContractViolation("tensor data length does not match shape");
}

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::ones(std::vector<int> shape) { return full(std::move(shape), 1.0); }

Tensor Tensor::full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = v;
    return t;
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

int Tensor::rows() const {
    if (shape_.size() != 2) throw ContractViolation("rows(): tensor is not 2-d: " + shape_str());
    return shape_[0];
}

int Tensor::cols() const {
    if (shape_.size() != 2) throw ContractViolation("cols(): tensor is not 2-d: " + shape_str());
    return shape_[1];
}

double& Tensor::at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols() + j]; }

double Tensor::at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols() + j]; }

double Tensor::item() const {
    if (data_.size() != 1) throw ContractViolation("item(): tensor has " + std::to_string(data_.size()) + " elements");
    return data_[0];
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
}

}  // namespace mtdea

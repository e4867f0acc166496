#include "ahcrf/crf.hpp"
#include "ahcrf/error.hpp"
#include "ahcrf/kernels.hpp"

namespace ahcrf {

ModelParameters::ModelParameters(std::size_t classes, std::size_t poses, std::size_t dim)
    : classes_(classes), poses_(poses), dim_(dim), values_(poses * dim + classes * poses + classes * poses * poses) {
  if (classes == 0 || poses == 0 || dim == 0) throw InvalidInput("model parameters: all sizes must be >= 1");
}

double ModelParameters::squared_norm() const noexcept { return kernels::dot(values_, values_); }

}  // namespace ahcrf

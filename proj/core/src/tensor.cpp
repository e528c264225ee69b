#include "spikemark/tensor.hpp"

#include <cmath>

#include "spikemark/errors.hpp"

namespace spikemark {

void Tensor::validate(const std::string& what) const {
    std::size_t expect = 1;
    for (std::size_t d : shape) expect *= d;
    if (shape.empty()) expect = 0;
    if (expect != data.size())
        throw data_error(what + ": shape implies " + std::to_string(expect) +
                         " values but " + std::to_string(data.size()) + " are present");
    for (double v : data)
        if (!std::isfinite(v)) throw data_error(what + ": non-finite value");
}

}  // namespace spikemark

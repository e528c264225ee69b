#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spikemark {

/// Dense 64-bit value container with an explicit shape (row-major).
/// Activations in this codebase are rank-1; weights rank-2.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {}

    static Tensor vec(std::vector<double> values) {
        const std::size_t n = values.size();
        return Tensor({n}, std::move(values));
    }

    static Tensor mat(std::size_t rows, std::size_t cols, std::vector<double> values) {
        return Tensor({rows, cols}, std::move(values));
    }

    std::size_t size() const { return data.size(); }

    /// Throws data_error if the shape product disagrees with the data length
    /// or any value is non-finite. `what` names the tensor in the message.
    void validate(const std::string& what) const;
};

}  // namespace spikemark

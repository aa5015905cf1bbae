#pragma once

#include <cmath>
#include <vector>

#include "common.hpp"

namespace nic {

// Input/output log {u_t, y_t}, t = 1-L .. 0.  Element i of each sequence is
// sample t = i - (L - 1).
struct DataSet {
    std::vector<double> u;
    std::vector<double> y;
    double sample_period = 1.0;  // seconds; metadata only

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }

    // Time index t of element i.
    [[nodiscard]] long time_of(std::size_t i) const {
        return static_cast<long>(i) - static_cast<long>(size()) + 1;
    }

    void validate() const {
        if (u.size() != y.size())
            throw DataError("DataSet: u has " + std::to_string(u.size()) + " samples, y has " +
                            std::to_string(y.size()));
        if (y.size() < 2)
            throw DataError("DataSet: need at least 2 samples");
        for (std::size_t i = 0; i < y.size(); ++i)
            if (!std::isfinite(u[i]) || !std::isfinite(y[i]))
                throw DataError("DataSet: non-finite sample at index " + std::to_string(i));
    }
};

struct Normalization {
    double rho_y = 1.0;
    double rho_u = 1.0;
    bool y_degenerate = false;  // sum of squares was 0 and replaced by 1
    bool u_degenerate = false;
};

// rho_y = sum y_t^2, rho_u = sum u_t^2; a zero sum is replaced by 1.
inline Normalization normalization_constants(const DataSet& data) {
    if (data.size() == 0 || data.u.size() != data.y.size())
        throw DataError("normalization_constants: empty or inconsistent data");
    Normalization n;
    double sy = 0.0, su = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        sy += data.y[i] * data.y[i];
        su += data.u[i] * data.u[i];
    }
    n.y_degenerate = !(sy > 0.0);
    n.u_degenerate = !(su > 0.0);
    n.rho_y = n.y_degenerate ? 1.0 : sy;
    n.rho_u = n.u_degenerate ? 1.0 : su;
    return n;
}

}  // namespace nic

#ifndef QSD_SOLUTION_HPP
#define QSD_SOLUTION_HPP

#include <optional>
#include <string>

#include "qsd/measurement.hpp"

namespace qsd {

enum class Regime { minimum_error, general_povm, projective_single_state, large_q };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::minimum_error: return "minimum-error";
        case Regime::general_povm: return "general-POVM";
        case Regime::projective_single_state: return "projective-single-state";
        case Regime::large_q: return "large-Q";
    }
    return "?";
}

struct Solution {
    double q = 0.0;
    double pc_max = 0.0;
    Regime regime = Regime::general_povm;
    Measurement measurement;
    std::optional<DualCertificate> certificate;

    double pe() const { return 1.0 - q - pc_max; }
    double rc() const { return pc_max / (1.0 - q); }
};

}  // namespace qsd

#endif

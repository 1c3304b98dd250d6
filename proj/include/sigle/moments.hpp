#pragma once

#include "sigle/numerics.hpp"

namespace sigle {

/// Monte-Carlo estimates of conditional expectations shared by every test
/// statistic: pi_tilde, G_tilde, theta_tilde (selected model), Gamma_tilde.
struct ConditionalMoments {
    Vector pi_bar;
    Matrix G_bar;
    Vector theta_bar;  // empty unless the selected model filled it
    Matrix gamma_bar;  // empty unless requested

    bool has_theta() const { return theta_bar.size() > 0; }
    bool has_gamma() const { return gamma_bar.size() > 0; }
};

}  // namespace sigle

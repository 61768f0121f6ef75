#ifndef RINGFC_TESTS_HELPERS_HPP
#define RINGFC_TESTS_HELPERS_HPP

#include "ringfc/ringfc.hpp"

namespace ringfc_tests {

// The bundled reference device, loaded once.
inline const ringfc::RunConfig& paper_config() {
    static const ringfc::RunConfig rc = ringfc::load_config("paper-device");
    return rc;
}

// Calibrated operating point of the reference device, computed once.
inline const ringfc::OperatingPoint& paper_op() {
    static const ringfc::OperatingPoint op = ringfc::operating_point(paper_config());
    return op;
}

// Ring variant with the signal band critically coupled (Q_c = Q_i), same
// intrinsic loss as the reference device.
inline ringfc::RingParams critical_ring() {
    ringfc::RingParams r = paper_config().ring;
    r.signal = ringfc::band_from_qs(r.signal.omega_hat, r.round_trip_time,
                                    r.signal.q_intrinsic, r.signal.q_intrinsic);
    return r;
}

} // namespace ringfc_tests

#endif // RINGFC_TESTS_HELPERS_HPP

#ifndef RINGFC_RINGFC_HPP
#define RINGFC_RINGFC_HPP

#include "ringfc/cmt.hpp"
#include "ringfc/config.hpp"
#include "ringfc/constants.hpp"
#include "ringfc/dispersion.hpp"
#include "ringfc/errors.hpp"
#include "ringfc/fitting.hpp"
#include "ringfc/oracle.hpp"
#include "ringfc/photonstats.hpp"
#include "ringfc/ring.hpp"
#include "ringfc/spectral.hpp"
#include "ringfc/sweeps.hpp"
#include "ringfc/voigt.hpp"

#endif // RINGFC_RINGFC_HPP

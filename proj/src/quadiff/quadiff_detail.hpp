#pragma once

#include <vector>

#include "sfl/numerics.hpp"

namespace sfl::detail {

/// Companion-matrix roots, Newton-polished, in no particular order.
std::vector<cplx> roots(const std::vector<cplx>& coeffs);

/// The square root of v closest to ref.
cplx tracked_sqrt(cplx v, cplx ref);

}  // namespace sfl::detail

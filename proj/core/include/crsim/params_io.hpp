#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "crsim/ecm_device.hpp"

namespace crsim {

/// Reads `key=value` lines over the defaults. Blank lines and `#` comments
/// are skipped. Keys: r_el l rho_m a_fil m_me sigma_fil sigma_ion dw0 m_eff
/// t alpha z j0 x_min. Throws ArgumentError on unknown keys or bad numbers.
EcmParams parse_params(std::istream& in);
EcmParams load_params(const std::string& path);

/// Canonical text: every key in fixed order, 17 significant digits.
std::string format_params(const EcmParams& p);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace crsim

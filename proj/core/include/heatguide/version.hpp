#ifndef HEATGUIDE_VERSION_HPP
#define HEATGUIDE_VERSION_HPP

namespace heatguide {

inline constexpr const char* kVersion = "0.1.0";

} // namespace heatguide

#endif

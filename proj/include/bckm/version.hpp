#ifndef BCKM_VERSION_HPP
#define BCKM_VERSION_HPP

namespace bckm {

inline constexpr const char* version = "0.1.0";

} // namespace bckm

#endif

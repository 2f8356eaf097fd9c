#ifndef EPKIT_VERSION_HPP
#define EPKIT_VERSION_HPP

namespace epkit {
inline constexpr const char* kVersion = "0.1.0";
}

#endif

#ifndef GRAPHHEAT_VERSION_HPP
#define GRAPHHEAT_VERSION_HPP

#define GRAPHHEAT_VERSION_MAJOR 0
#define GRAPHHEAT_VERSION_MINOR 1
#define GRAPHHEAT_VERSION_PATCH 0

namespace graphheat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace graphheat

#endif  // GRAPHHEAT_VERSION_HPP

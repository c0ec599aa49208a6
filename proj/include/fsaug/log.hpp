#pragma once

#include <cstdio>
#include <string>

namespace fsaug {

inline void log_warning(const std::string& msg) {
  std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

}  // namespace fsaug

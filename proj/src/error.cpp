#include "driftsurv/error.hpp"

#include <spdlog/spdlog.h>

namespace driftsurv {

void set_log_level(const std::string& level) {
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace driftsurv

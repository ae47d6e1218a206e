#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frak {

enum class ErrorCode {
    // PGM input/output
    io_failure,
    malformed_header,
    unsupported_maxval,
    truncated_pixel_data,
    // configuration
    unsupported_dimensions,
    invalid_config,
    empty_pool,
    dimension_mismatch,
    // compressed stream parsing
    bad_magic,
    version_mismatch,
    malformed_stream_header,
    truncated_stream,
    address_out_of_range,
    s_index_out_of_range,
    step_inconsistency,
    trailing_data,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above so
/// callers (and tests) can distinguish defects without parsing messages.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace frak
